"""Command-line interface.

    veeswarm-viz plot --kind trajectory --run <dir> --out fig.png [--snapshots 0,414,1242]

Kinds: trajectory, distances, error, consecutive, order, activations,
animation. ``--run`` points at a directory holding trajectory.csv,
metrics.csv and summary.json as written by the simulator; ``--scenario``
optionally substitutes a scenario file for the summary's embedded echo.
Animations go to .gif (portable) or .mp4 (needs ffmpeg).
"""

from __future__ import annotations

import argparse
import sys

from .figures import FIGURE_KINDS, emit
from .io import InputError


def _parse_snapshots(text: str | None):
    if not text:
        return None
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise InputError(f"--snapshots must be comma-separated integers: {exc}") from exc


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="veeswarm-viz", description="Emit figures from veeswarm run artifacts"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_plot = sub.add_parser("plot", help="render one figure kind")
    p_plot.add_argument("--kind", required=True, choices=(*FIGURE_KINDS, "animation"))
    p_plot.add_argument("--run", required=True, help="run directory with the CSV/JSON artifacts")
    p_plot.add_argument("--out", required=True, help="output image/video path")
    p_plot.add_argument("--scenario", default=None, help="scenario file overriding the echo")
    p_plot.add_argument("--snapshots", default=None,
                        help="comma-separated step indices for formation snapshots")
    p_plot.add_argument("--dpi", type=int, default=150)
    p_plot.add_argument("--frame-stride", type=int, default=25,
                        help="animation: one frame per this many steps")
    args = parser.parse_args(argv)

    try:
        out = emit(
            args.kind,
            args.run,
            args.out,
            scenario_path=args.scenario,
            snapshots=_parse_snapshots(args.snapshots),
            dpi=args.dpi,
            frame_stride=args.frame_stride,
        )
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"{args.kind} -> {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
