"""Scenario files, trajectory/metrics serialization, and log recomputation.

Scenario file format (``*.scn``): one ``key = value`` per line, ``#`` starts a
comment, keys are dotted paths. Angles accept plain radians or ``<a>pi[/<b>]``
(e.g. ``3pi/4``). Omitted gain/sim keys take the module defaults.

    name = narrow_passage
    formation.n = 5
    formation.d = 0.8
    formation.alpha = 3pi/4
    formation.leader = 3            # optional, default ceil(n/2)
    gains.k_f = 1.0                 # k_f k_g k_o k_c k_r beta_c beta_r
    sim.dt = 0.02                   # max_steps v_max r_a r_s goal_tolerance
    sim.seed = 7                    # seed spawn_radius m_max
    reconfig_mode = signed          # or literal
    leader_delay = 0                # or 1
    start.x = 2.0
    start.y = 0.0
    goal.x = 44.0
    goal.y = 0.0
    obstacle.1.type = rect          # min_x min_y max_x max_y
    obstacle.2.type = circle        # center_x center_y radius
    obstacle.3.type = polygon       # vertices = x1,y1 x2,y2 ... (CCW)

Axis-aligned ``rect`` obstacles are sugar desugared to a CCW ConvexPolygon.

Output files (all floats written with full round-trip precision, well beyond
9 significant digits, so reruns are byte-identical and metrics recompute
exactly):

    trajectory.csv  one row per (step, uav), columns as TrajectoryRow
    metrics.csv     step,time_s,phi,avg_error_m,min_pairwise_m,avg_consecutive_m,n_reconfig_active
    summary.json    RunSummary fields plus the full scenario echo
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .behaviors import Gains, ReconfigMode, SensingRanges, combine_control
from .formation import FormationSpec, UavState, leader_index
from .geometry import Circle, ConvexPolygon, Obstacle, Vec2, obstacle_distance
from .metrics import MetricsSeries, RunSummary, TerminationReason
from .simulator import SimConfig, TrajectoryLog, TrajectoryRow, WorldState

TRAJECTORY_COLUMNS = (
    "step", "time_s", "uav_id", "x_m", "y_m", "vx_mps", "vy_mps", "psi_rad",
    "uf_x", "uf_y", "ug_x", "ug_y", "uo_x", "uo_y", "uc_x", "uc_y",
    "ur_x", "ur_y", "reconfig_active",
)
METRICS_COLUMNS = (
    "step", "time_s", "phi", "avg_error_m", "min_pairwise_m",
    "avg_consecutive_m", "n_reconfig_active",
)


class ScenarioError(ValueError):
    """Scenario parse or validation failure; names the offending key/line."""


@dataclass(frozen=True)
class Scenario:
    """A fully specified, seeded experiment: the unit of reproducible runs."""

    name: str
    formation: FormationSpec
    gains: Gains
    sim: SimConfig
    start: Vec2
    goal: Vec2
    obstacles: tuple[Obstacle, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        for label, point in (("start", self.start), ("goal", self.goal)):
            for k, obstacle in enumerate(self.obstacles, start=1):
                if obstacle_distance(obstacle, point) <= 0.0:
                    raise ScenarioError(
                        f"{label}: point ({point.x}, {point.y}) lies inside or on "
                        f"obstacle.{k}"
                    )


# --- value parsing -----------------------------------------------------------

_PI_RE = re.compile(r"^(-?\d*\.?\d*)\s*pi\s*(?:/\s*(\d*\.?\d+))?$")


def _parse_angle(text: str) -> float:
    m = _PI_RE.match(text.strip())
    if m:
        a = float(m.group(1)) if m.group(1) not in ("", "-") else (-1.0 if m.group(1) == "-" else 1.0)
        b = float(m.group(2)) if m.group(2) else 1.0
        return a * math.pi / b
    return float(text)


def _flatten(text: str) -> dict[str, tuple[str, int]]:
    """Parse `key = value` lines into {key: (value, line_no)}."""
    flat: dict[str, tuple[str, int]] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError(f"line {line_no}: expected `key = value`, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ScenarioError(f"line {line_no}: empty key or value in {raw!r}")
        if key in flat:
            raise ScenarioError(f"line {line_no}: duplicate key {key!r}")
        flat[key] = (value, line_no)
    return flat


class _KeyReader:
    """Consumes flat keys with typed accessors; tracks leftovers."""

    def __init__(self, flat: Mapping[str, tuple[str, int]]):
        self._flat = dict(flat)

    def pop(self, key: str) -> str | None:
        entry = self._flat.pop(key, None)
        return entry[0] if entry else None

    def _converted(self, key: str, convert, default):
        raw = self.pop(key)
        if raw is None:
            return default
        try:
            return convert(raw)
        except ValueError as exc:
            raise ScenarioError(f"{key}: {exc}") from exc

    def text(self, key: str, default: str | None = None) -> str | None:
        return self._converted(key, str, default)

    def number(self, key: str, default: float | None = None) -> float | None:
        return self._converted(key, float, default)

    def angle(self, key: str, default: float | None = None) -> float | None:
        return self._converted(key, _parse_angle, default)

    def integer(self, key: str, default: int | None = None) -> int | None:
        return self._converted(key, lambda s: int(s, 10), default)

    def leftovers(self) -> list[str]:
        return sorted(self._flat)


def _build_obstacle(reader: _KeyReader, prefix: str) -> Obstacle:
    kind = reader.text(f"{prefix}.type")
    try:
        if kind == "circle":
            center = Vec2(
                reader.number(f"{prefix}.center_x"), reader.number(f"{prefix}.center_y")
            )
            return Circle(center, reader.number(f"{prefix}.radius"))
        if kind == "rect":
            min_x = reader.number(f"{prefix}.min_x")
            min_y = reader.number(f"{prefix}.min_y")
            max_x = reader.number(f"{prefix}.max_x")
            max_y = reader.number(f"{prefix}.max_y")
            if not (min_x < max_x and min_y < max_y):
                raise ScenarioError(f"{prefix}: rect needs min_x < max_x and min_y < max_y")
            return ConvexPolygon(
                (Vec2(min_x, min_y), Vec2(max_x, min_y), Vec2(max_x, max_y), Vec2(min_x, max_y))
            )
        if kind == "polygon":
            raw = reader.text(f"{prefix}.vertices")
            if raw is None:
                raise ScenarioError(f"{prefix}.vertices: missing")
            points = []
            for token in raw.split():
                xs, ys = token.split(",")
                points.append(Vec2(float(xs), float(ys)))
            return ConvexPolygon(tuple(points))
    except ScenarioError:
        raise
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"{prefix}: {exc}") from exc
    raise ScenarioError(f"{prefix}.type: expected circle|rect|polygon, got {kind!r}")


def _build_scenario(flat: Mapping[str, tuple[str, int]], default_name: str) -> Scenario:
    reader = _KeyReader(flat)

    name = reader.text("name", default_name)

    n = reader.integer("formation.n")
    if n is None:
        raise ScenarioError("formation.n: required")
    d = reader.number("formation.d", 0.8)
    alpha = reader.angle("formation.alpha", 3.0 * math.pi / 4.0)
    leader = reader.integer("formation.leader", 0)
    try:
        spec = FormationSpec(n=n, d=d, alpha=alpha, leader=leader)
    except ValueError as exc:
        raise ScenarioError(f"formation: {exc}") from exc

    defaults = Gains()
    try:
        gains = Gains(
            k_f=reader.number("gains.k_f", defaults.k_f),
            k_g=reader.number("gains.k_g", defaults.k_g),
            k_o=reader.number("gains.k_o", defaults.k_o),
            k_c=reader.number("gains.k_c", defaults.k_c),
            k_r=reader.number("gains.k_r", defaults.k_r),
            beta_c=reader.number("gains.beta_c", defaults.beta_c),
            beta_r=reader.number("gains.beta_r", defaults.beta_r),
        )
    except ValueError as exc:
        raise ScenarioError(f"gains: {exc}") from exc

    mode_text = reader.text("reconfig_mode", ReconfigMode.SIGNED.value)
    try:
        mode = ReconfigMode(mode_text)
    except ValueError as exc:
        raise ScenarioError(
            f"reconfig_mode: expected signed|literal, got {mode_text!r}"
        ) from exc

    sim_defaults = SimConfig()
    try:
        ranges = SensingRanges(
            r_a=reader.number("sim.r_a", sim_defaults.ranges.r_a),
            r_s=reader.number("sim.r_s", sim_defaults.ranges.r_s),
        )
        sim = SimConfig(
            dt=reader.number("sim.dt", sim_defaults.dt),
            max_steps=reader.integer("sim.max_steps", sim_defaults.max_steps),
            v_max=reader.number("sim.v_max", sim_defaults.v_max),
            ranges=ranges,
            goal_tolerance=reader.number("sim.goal_tolerance", sim_defaults.goal_tolerance),
            seed=reader.integer("sim.seed", sim_defaults.seed),
            spawn_radius=reader.number("sim.spawn_radius", sim_defaults.spawn_radius),
            reconfig_mode=mode,
            leader_delay=reader.integer("leader_delay", 0),
            m_max=reader.number("sim.m_max", None),
        )
    except ScenarioError:
        raise
    except ValueError as exc:
        raise ScenarioError(f"sim: {exc}") from exc

    start_x = reader.number("start.x")
    start_y = reader.number("start.y")
    if start_x is None or start_y is None:
        raise ScenarioError("start.x/start.y: required")
    start = Vec2(start_x, start_y)
    goal_x = reader.number("goal.x")
    goal_y = reader.number("goal.y")
    if goal_x is None or goal_y is None:
        raise ScenarioError("goal.x/goal.y: required")
    goal = Vec2(goal_x, goal_y)

    indices = set()
    for key in reader.leftovers():
        if key.startswith("obstacle."):
            token = key.split(".")[1]
            if not token.isdigit():
                raise ScenarioError(f"{key}: obstacle index must be an integer")
            indices.add(int(token))
    obstacles = tuple(_build_obstacle(reader, f"obstacle.{k}") for k in sorted(indices))

    unknown = reader.leftovers()
    if unknown:
        raise ScenarioError(f"unknown key(s): {', '.join(unknown)}")

    return Scenario(
        name=name, formation=spec, gains=gains, sim=sim,
        start=start, goal=goal, obstacles=obstacles,
    )


def parse_scenario(text: str, default_name: str = "scenario",
                   overrides: Mapping[str, str] | None = None) -> Scenario:
    """Parse scenario text; ``overrides`` replace/extend flat keys before validation."""
    flat = _flatten(text)
    if overrides:
        for key, value in overrides.items():
            flat[key] = (value, 0)
    return _build_scenario(flat, default_name)


def load_scenario(path: str | Path, overrides: Mapping[str, str] | None = None) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file {path}: {exc}") from exc
    return parse_scenario(text, default_name=path.stem, overrides=overrides)


# --- serialization -----------------------------------------------------------

def _fmt(x: float) -> str:
    """Shortest round-trip decimal form: full precision, byte-stable."""
    return repr(float(x))


def _scenario_lines(s: Scenario) -> Iterable[str]:
    yield f"name = {s.name}"
    yield f"formation.n = {s.formation.n}"
    yield f"formation.d = {_fmt(s.formation.d)}"
    yield f"formation.alpha = {_fmt(s.formation.alpha)}"
    yield f"formation.leader = {s.formation.leader}"
    g = s.gains
    for key in ("k_f", "k_g", "k_o", "k_c", "k_r", "beta_c", "beta_r"):
        yield f"gains.{key} = {_fmt(getattr(g, key))}"
    sim = s.sim
    yield f"sim.dt = {_fmt(sim.dt)}"
    yield f"sim.max_steps = {sim.max_steps}"
    yield f"sim.v_max = {_fmt(sim.v_max)}"
    yield f"sim.r_a = {_fmt(sim.ranges.r_a)}"
    yield f"sim.r_s = {_fmt(sim.ranges.r_s)}"
    yield f"sim.goal_tolerance = {_fmt(sim.goal_tolerance)}"
    yield f"sim.seed = {sim.seed}"
    yield f"sim.spawn_radius = {_fmt(sim.spawn_radius)}"
    if sim.m_max is not None:
        yield f"sim.m_max = {_fmt(sim.m_max)}"
    yield f"reconfig_mode = {sim.reconfig_mode.value}"
    yield f"leader_delay = {sim.leader_delay}"
    yield f"start.x = {_fmt(s.start.x)}"
    yield f"start.y = {_fmt(s.start.y)}"
    yield f"goal.x = {_fmt(s.goal.x)}"
    yield f"goal.y = {_fmt(s.goal.y)}"
    for k, obstacle in enumerate(s.obstacles, start=1):
        if isinstance(obstacle, Circle):
            yield f"obstacle.{k}.type = circle"
            yield f"obstacle.{k}.center_x = {_fmt(obstacle.center.x)}"
            yield f"obstacle.{k}.center_y = {_fmt(obstacle.center.y)}"
            yield f"obstacle.{k}.radius = {_fmt(obstacle.radius)}"
        else:
            yield f"obstacle.{k}.type = polygon"
            verts = " ".join(f"{_fmt(v.x)},{_fmt(v.y)}" for v in obstacle.vertices)
            yield f"obstacle.{k}.vertices = {verts}"


def serialize_scenario(s: Scenario) -> str:
    return "\n".join(_scenario_lines(s)) + "\n"


def scenario_to_dict(s: Scenario) -> dict:
    """JSON-ready nested echo of a scenario (used in summary.json)."""
    obstacles = []
    for obstacle in s.obstacles:
        if isinstance(obstacle, Circle):
            obstacles.append({
                "type": "circle",
                "center": [obstacle.center.x, obstacle.center.y],
                "radius": obstacle.radius,
            })
        else:
            obstacles.append({
                "type": "polygon",
                "vertices": [[v.x, v.y] for v in obstacle.vertices],
            })
    return {
        "name": s.name,
        "formation": {
            "n": s.formation.n,
            "d": s.formation.d,
            "alpha": s.formation.alpha,
            "leader": s.formation.leader,
        },
        "gains": {
            key: getattr(s.gains, key)
            for key in ("k_f", "k_g", "k_o", "k_c", "k_r", "beta_c", "beta_r")
        },
        "sim": {
            "dt": s.sim.dt,
            "max_steps": s.sim.max_steps,
            "v_max": s.sim.v_max,
            "r_a": s.sim.ranges.r_a,
            "r_s": s.sim.ranges.r_s,
            "goal_tolerance": s.sim.goal_tolerance,
            "seed": s.sim.seed,
            "spawn_radius": s.sim.spawn_radius,
            "m_max": s.sim.m_max,
        },
        "reconfig_mode": s.sim.reconfig_mode.value,
        "leader_delay": s.sim.leader_delay,
        "start": [s.start.x, s.start.y],
        "goal": [s.goal.x, s.goal.y],
        "obstacles": obstacles,
    }


def scenario_from_dict(data: Mapping) -> Scenario:
    try:
        formation = FormationSpec(
            n=int(data["formation"]["n"]),
            d=float(data["formation"]["d"]),
            alpha=float(data["formation"]["alpha"]),
            leader=int(data["formation"]["leader"]),
        )
        gains = Gains(**{k: float(v) for k, v in data["gains"].items()})
        sim_data = data["sim"]
        sim = SimConfig(
            dt=float(sim_data["dt"]),
            max_steps=int(sim_data["max_steps"]),
            v_max=float(sim_data["v_max"]),
            ranges=SensingRanges(float(sim_data["r_a"]), float(sim_data["r_s"])),
            goal_tolerance=float(sim_data["goal_tolerance"]),
            seed=int(sim_data["seed"]),
            spawn_radius=float(sim_data["spawn_radius"]),
            reconfig_mode=ReconfigMode(data["reconfig_mode"]),
            leader_delay=int(data["leader_delay"]),
            m_max=None if sim_data["m_max"] is None else float(sim_data["m_max"]),
        )
        obstacles: list[Obstacle] = []
        for entry in data["obstacles"]:
            if entry["type"] == "circle":
                obstacles.append(
                    Circle(Vec2(*map(float, entry["center"])), float(entry["radius"]))
                )
            else:
                obstacles.append(
                    ConvexPolygon(tuple(Vec2(float(x), float(y)) for x, y in entry["vertices"]))
                )
        return Scenario(
            name=str(data["name"]),
            formation=formation,
            gains=gains,
            sim=sim,
            start=Vec2(*map(float, data["start"])),
            goal=Vec2(*map(float, data["goal"])),
            obstacles=tuple(obstacles),
        )
    except ScenarioError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"bad scenario dict: {exc}") from exc


# --- run artifacts -----------------------------------------------------------

def write_logs(
    log: TrajectoryLog,
    series: MetricsSeries,
    summary: RunSummary,
    scenario: Scenario,
    out_dir: str | Path,
) -> dict[str, Path]:
    """Write trajectory.csv, metrics.csv and summary.json into out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    traj_path = out / "trajectory.csv"
    lines = [",".join(TRAJECTORY_COLUMNS)]
    for r in log.rows:
        lines.append(
            f"{r.step},{_fmt(r.time_s)},{r.uav_id},{_fmt(r.x_m)},{_fmt(r.y_m)},"
            f"{_fmt(r.vx_mps)},{_fmt(r.vy_mps)},{_fmt(r.psi_rad)},"
            f"{_fmt(r.uf_x)},{_fmt(r.uf_y)},{_fmt(r.ug_x)},{_fmt(r.ug_y)},"
            f"{_fmt(r.uo_x)},{_fmt(r.uo_y)},{_fmt(r.uc_x)},{_fmt(r.uc_y)},"
            f"{_fmt(r.ur_x)},{_fmt(r.ur_y)},{int(r.reconfig_active)}"
        )
    traj_path.write_text("\n".join(lines) + "\n")

    metrics_path = out / "metrics.csv"
    metrics_path.write_text(serialize_metrics(series))

    summary_path = out / "summary.json"
    payload = {
        "avg_error_mean_m": summary.avg_error_mean,
        "min_pairwise_overall_m": summary.min_pairwise_overall,
        "avg_consecutive_mean_m": summary.avg_consecutive_mean,
        "termination": summary.termination.value,
        "steps_used": summary.steps_used,
        "scenario": scenario_to_dict(scenario),
    }
    summary_path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")

    return {"trajectory": traj_path, "metrics": metrics_path, "summary": summary_path}


def serialize_metrics(series: MetricsSeries) -> str:
    lines = [",".join(METRICS_COLUMNS)]
    for k in range(len(series)):
        lines.append(
            f"{series.steps[k]},{_fmt(series.times[k])},{_fmt(series.phi[k])},"
            f"{_fmt(series.avg_error[k])},{_fmt(series.min_pairwise[k])},"
            f"{_fmt(series.avg_consecutive[k])},{series.n_reconfig_active[k]}"
        )
    return "\n".join(lines) + "\n"


def read_trajectory(path: str | Path) -> TrajectoryLog:
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines or lines[0] != ",".join(TRAJECTORY_COLUMNS):
        raise ScenarioError(f"{path}: missing or wrong trajectory header")
    log = TrajectoryLog()
    for line_no, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != len(TRAJECTORY_COLUMNS):
            raise ScenarioError(f"{path}:{line_no}: expected {len(TRAJECTORY_COLUMNS)} fields")
        log.rows.append(
            TrajectoryRow(
                step=int(parts[0]),
                time_s=float(parts[1]),
                uav_id=int(parts[2]),
                x_m=float(parts[3]),
                y_m=float(parts[4]),
                vx_mps=float(parts[5]),
                vy_mps=float(parts[6]),
                psi_rad=float(parts[7]),
                uf_x=float(parts[8]),
                uf_y=float(parts[9]),
                ug_x=float(parts[10]),
                ug_y=float(parts[11]),
                uo_x=float(parts[12]),
                uo_y=float(parts[13]),
                uc_x=float(parts[14]),
                uc_y=float(parts[15]),
                ur_x=float(parts[16]),
                ur_y=float(parts[17]),
                reconfig_active=bool(int(parts[18])),
            )
        )
    return log


def recompute_series(log: TrajectoryLog, scenario: Scenario) -> MetricsSeries:
    """Recompute the metric series from a stored trajectory.

    Rebuilds each step's world snapshot and behavior vectors from the log and
    feeds them through the same metric code path as the live run, so the
    result matches the original series exactly. The saturated total and the
    activation flag are recomputed from the logged terms, not trusted.
    """
    n = scenario.formation.n
    rows = log.rows
    if len(rows) % n != 0:
        raise ScenarioError(
            f"trajectory has {len(rows)} rows, not a multiple of n={n}; "
            "scenario/log mismatch"
        )
    series = MetricsSeries()
    for base in range(0, len(rows), n):
        chunk = rows[base:base + n]
        ids = [r.uav_id for r in chunk]
        if ids != list(range(1, n + 1)) or len({r.step for r in chunk}) != 1:
            raise ScenarioError(f"trajectory rows misordered near data row {base + 1}")
        uavs = tuple(
            UavState(r.uav_id, Vec2(r.x_m, r.y_m), Vec2(r.vx_mps, r.vy_mps), r.psi_rad)
            for r in chunk
        )
        world = WorldState(
            step=chunk[0].step,
            time=chunk[0].time_s,
            uavs=uavs,
            obstacles=scenario.obstacles,
            goal=scenario.goal,
        )
        breakdowns = tuple(
            combine_control(
                r.uav_id == scenario.formation.leader,
                Vec2(r.uf_x, r.uf_y),
                Vec2(r.ug_x, r.ug_y),
                Vec2(r.uo_x, r.uo_y),
                Vec2(r.uc_x, r.uc_y),
                Vec2(r.ur_x, r.ur_y),
                scenario.sim.v_max,
            )
            for r in chunk
        )
        series.record(world, breakdowns, scenario.formation)
    return series
