"""Command-line interface.

    veeswarm run --scenario <path> --out <dir> [--seed N] [--override key=value ...]
    veeswarm sweep --scenarios <dir> --out <dir> [--jobs K]
    veeswarm metrics --trajectory <csv> --scenario <path> --out <csv>

``run`` executes one scenario and writes trajectory.csv, metrics.csv and
summary.json into the output directory. ``sweep`` runs every ``*.scn`` file in
a directory (optionally in parallel; results are independent of K), writes the
per-run artifacts into ``<out>/<scenario-stem>/`` and emits ``table.csv``.
``metrics`` recomputes the metric series from a stored trajectory.

The ``VEE_SWARM_OUT`` environment variable supplies the default output
directory when ``--out`` is omitted. Exit codes: 0 success, 2 bad scenario or
arguments, 1 runtime failure (including sweeps with failed scenarios).
"""

from __future__ import annotations

import argparse
import multiprocessing
import os
import sys
from pathlib import Path

from .metrics import TerminationReason
from .scenario_io import (
    Scenario,
    ScenarioError,
    load_scenario,
    read_trajectory,
    recompute_series,
    serialize_metrics,
    write_logs,
)
from .simulator import SpawnError, run


def _parse_overrides(pairs: list[str]) -> dict[str, str]:
    overrides: dict[str, str] = {}
    for pair in pairs:
        if "=" not in pair:
            raise ScenarioError(f"override {pair!r} is not of the form key=value")
        key, value = pair.split("=", 1)
        overrides[key.strip()] = value.strip()
    return overrides


def _default_out(explicit: str | None) -> Path:
    if explicit:
        return Path(explicit)
    env = os.environ.get("VEE_SWARM_OUT")
    if env:
        return Path(env)
    raise ScenarioError("no output directory: pass --out or set VEE_SWARM_OUT")


def _run_scenario_to(scenario: Scenario, out_dir: Path) -> "tuple":
    log, series, summary = run(scenario)
    write_logs(log, series, summary, scenario, out_dir)
    return log, series, summary


def cmd_run(args: argparse.Namespace) -> int:
    overrides = _parse_overrides(args.override)
    if args.seed is not None:
        overrides["sim.seed"] = str(args.seed)
    scenario = load_scenario(args.scenario, overrides=overrides)
    out_dir = _default_out(args.out)
    _, _, summary = _run_scenario_to(scenario, out_dir)
    print(
        f"{scenario.name}: {summary.termination.value} after {summary.steps_used} steps "
        f"(avg_error {summary.avg_error_mean:.5f} m, min_pairwise "
        f"{summary.min_pairwise_overall:.5f} m, avg_consecutive "
        f"{summary.avg_consecutive_mean:.5f} m) -> {out_dir}"
    )
    return 0


def _sweep_one(task: tuple[str, str]) -> dict:
    """Worker for sweep: run one scenario file, return a table row."""
    scenario_path, out_dir = task
    row = {"scenario": Path(scenario_path).stem, "status": "", "failed": True,
           "n": "", "d": "", "alpha": "", "avg_error_m": "",
           "min_distance_m": "", "avg_consecutive_m": ""}
    try:
        scenario = load_scenario(scenario_path)
        row["scenario"] = scenario.name
        row["n"] = str(scenario.formation.n)
        row["d"] = repr(scenario.formation.d)
        row["alpha"] = repr(scenario.formation.alpha)
        _, _, summary = _run_scenario_to(scenario, Path(out_dir))
        row["avg_error_m"] = repr(summary.avg_error_mean)
        row["min_distance_m"] = repr(summary.min_pairwise_overall)
        row["avg_consecutive_m"] = repr(summary.avg_consecutive_mean)
        row["status"] = summary.termination.value
        row["failed"] = summary.termination is TerminationReason.OBSTACLE_PENETRATION
    except (ScenarioError, SpawnError, OSError) as exc:
        # the status lands in a CSV cell: keep it one comma-free line
        message = " ".join(str(exc).split()).replace(",", ";")
        row["status"] = f"Error: {message}"
    return row


def cmd_sweep(args: argparse.Namespace) -> int:
    scenario_dir = Path(args.scenarios)
    paths = sorted(scenario_dir.glob("*.scn"))
    if not paths:
        print(f"error: no *.scn files in {scenario_dir}", file=sys.stderr)
        return 2
    out_root = _default_out(args.out)
    out_root.mkdir(parents=True, exist_ok=True)
    tasks = [(str(p), str(out_root / p.stem)) for p in paths]

    if args.jobs > 1:
        with multiprocessing.Pool(args.jobs) as pool:
            rows = pool.map(_sweep_one, tasks)
    else:
        rows = [_sweep_one(task) for task in tasks]

    rows.sort(key=lambda r: r["scenario"])
    table_path = out_root / "table.csv"
    header = "scenario,n,d,alpha,avg_error_m,min_distance_m,avg_consecutive_m,status"
    lines = [header]
    for row in rows:
        lines.append(
            f"{row['scenario']},{row['n']},{row['d']},{row['alpha']},"
            f"{row['avg_error_m']},{row['min_distance_m']},"
            f"{row['avg_consecutive_m']},{row['status']}"
        )
    table_path.write_text("\n".join(lines) + "\n")

    failed = [row for row in rows if row["failed"]]
    for row in rows:
        print(f"{row['scenario']}: {row['status']}")
    print(f"table -> {table_path}")
    if failed:
        print(f"error: {len(failed)} scenario(s) failed", file=sys.stderr)
        return 1
    return 0


def cmd_metrics(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    log = read_trajectory(args.trajectory)
    series = recompute_series(log, scenario)
    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(serialize_metrics(series))
    print(f"recomputed {len(series)} steps -> {out_path}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="veeswarm",
        description="Deterministic multi-UAV V-formation simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario")
    p_run.add_argument("--scenario", required=True)
    p_run.add_argument("--out", default=None)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--override", action="append", default=[],
                       metavar="KEY=VALUE", help="override any scenario key")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run every *.scn in a directory")
    p_sweep.add_argument("--scenarios", required=True)
    p_sweep.add_argument("--out", default=None)
    p_sweep.add_argument("--jobs", type=int, default=1)
    p_sweep.set_defaults(func=cmd_sweep)

    p_metrics = sub.add_parser("metrics", help="recompute metrics from a trajectory")
    p_metrics.add_argument("--trajectory", required=True)
    p_metrics.add_argument("--scenario", required=True)
    p_metrics.add_argument("--out", required=True)
    p_metrics.set_defaults(func=cmd_metrics)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SpawnError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
