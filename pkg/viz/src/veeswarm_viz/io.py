"""Readers for veeswarm run artifacts and scenario files.

This package talks to the simulator only through its file formats:
``trajectory.csv``, ``metrics.csv``, ``summary.json`` and the flat
``key = value`` scenario format. Everything is parsed into plain dicts and
numpy arrays; nothing here imports the simulator.
"""

from __future__ import annotations

import json
import math
import re
from pathlib import Path

import numpy as np

TRAJECTORY_COLUMNS = [
    "step", "time_s", "uav_id", "x_m", "y_m", "vx_mps", "vy_mps", "psi_rad",
    "uf_x", "uf_y", "ug_x", "ug_y", "uo_x", "uo_y", "uc_x", "uc_y",
    "ur_x", "ur_y", "reconfig_active",
]
METRICS_COLUMNS = [
    "step", "time_s", "phi", "avg_error_m", "min_pairwise_m",
    "avg_consecutive_m", "n_reconfig_active",
]


class InputError(ValueError):
    """Raised for missing columns, malformed files or log/scenario mismatches."""


def _read_csv(path: Path, expected: list[str]) -> dict[str, np.ndarray]:
    lines = path.read_text().splitlines()
    if not lines:
        raise InputError(f"{path}: empty file")
    header = lines[0].split(",")
    missing = [c for c in expected if c not in header]
    if missing:
        raise InputError(f"{path}: missing column(s) {', '.join(missing)}")
    table = np.genfromtxt(lines[1:], delimiter=",", dtype=float).reshape(-1, len(header))
    return {name: table[:, k] for k, name in enumerate(header)}


def read_trajectory(path: str | Path) -> dict[str, np.ndarray]:
    return _read_csv(Path(path), TRAJECTORY_COLUMNS)


def read_metrics(path: str | Path) -> dict[str, np.ndarray]:
    return _read_csv(Path(path), METRICS_COLUMNS)


def read_summary(path: str | Path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: not valid JSON ({exc})") from exc


_PI_RE = re.compile(r"^(-?\d*\.?\d*)\s*pi\s*(?:/\s*(\d*\.?\d+))?$")


def _value(text: str) -> float:
    m = _PI_RE.match(text.strip())
    if m:
        a = float(m.group(1)) if m.group(1) not in ("", "-") else (-1.0 if m.group(1) == "-" else 1.0)
        b = float(m.group(2)) if m.group(2) else 1.0
        return a * math.pi / b
    return float(text)


def read_scenario_file(path: str | Path) -> dict:
    """Parse a flat scenario file into the same structure as the summary echo."""
    flat: dict[str, str] = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{path}: expected `key = value`, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        flat[key] = value

    obstacles = []
    indices = sorted(
        {int(k.split(".")[1]) for k in flat if k.startswith("obstacle.")}
    )
    for idx in indices:
        kind = flat.get(f"obstacle.{idx}.type")
        if kind == "circle":
            obstacles.append({
                "type": "circle",
                "center": [_value(flat[f"obstacle.{idx}.center_x"]),
                           _value(flat[f"obstacle.{idx}.center_y"])],
                "radius": _value(flat[f"obstacle.{idx}.radius"]),
            })
        elif kind == "rect":
            x0, y0 = _value(flat[f"obstacle.{idx}.min_x"]), _value(flat[f"obstacle.{idx}.min_y"])
            x1, y1 = _value(flat[f"obstacle.{idx}.max_x"]), _value(flat[f"obstacle.{idx}.max_y"])
            obstacles.append({
                "type": "polygon",
                "vertices": [[x0, y0], [x1, y0], [x1, y1], [x0, y1]],
            })
        elif kind == "polygon":
            vertices = [
                [float(a) for a in token.split(",")]
                for token in flat[f"obstacle.{idx}.vertices"].split()
            ]
            obstacles.append({"type": "polygon", "vertices": vertices})
        else:
            raise InputError(f"{path}: obstacle.{idx}.type: unknown kind {kind!r}")

    def number(key, default=None):
        return _value(flat[key]) if key in flat else default

    return {
        "name": flat.get("name", Path(path).stem),
        "formation": {
            "n": int(flat["formation.n"]),
            "d": number("formation.d", 0.8),
            "alpha": number("formation.alpha", 3 * math.pi / 4),
        },
        "sim": {
            "dt": number("sim.dt", 0.02),
            "r_a": number("sim.r_a", 0.3),
            "r_s": number("sim.r_s", 2.0),
            "seed": int(flat.get("sim.seed", "0")),
        },
        "start": [number("start.x"), number("start.y")],
        "goal": [number("goal.x"), number("goal.y")],
        "obstacles": obstacles,
    }


def load_run(run_dir: str | Path, scenario_path: str | Path | None = None) -> dict:
    """Load a run directory into arrays plus the scenario description.

    The scenario comes from the ``summary.json`` echo unless an explicit
    scenario file is given. The trajectory is checked against the scenario's
    UAV count.
    """
    run_dir = Path(run_dir)
    trajectory = read_trajectory(run_dir / "trajectory.csv")
    metrics = read_metrics(run_dir / "metrics.csv")
    summary = read_summary(run_dir / "summary.json")
    scenario = read_scenario_file(scenario_path) if scenario_path else summary["scenario"]

    n = int(scenario["formation"]["n"])
    ids = np.unique(trajectory["uav_id"]).astype(int)
    if len(ids) != n or ids.min() != 1 or ids.max() != n:
        raise InputError(
            f"trajectory has UAV ids {ids.tolist()}, scenario expects 1..{n}; "
            "scenario/log mismatch"
        )
    if len(trajectory["step"]) != n * len(metrics["step"]):
        raise InputError("trajectory and metrics row counts disagree; mixed runs?")
    return {
        "trajectory": trajectory,
        "metrics": metrics,
        "summary": summary,
        "scenario": scenario,
    }


def per_uav(trajectory: dict[str, np.ndarray], n: int) -> list[dict[str, np.ndarray]]:
    """Split the flat trajectory table into one dict of arrays per UAV id."""
    out = []
    for uav_id in range(1, n + 1):
        mask = trajectory["uav_id"].astype(int) == uav_id
        out.append({key: column[mask] for key, column in trajectory.items()})
    return out
