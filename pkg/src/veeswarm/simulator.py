"""Deterministic discrete-time world: sensing, control evaluation, integration.

Within a tick the leader's control is evaluated first; every follower's
slot-tracking term then uses the leader's control and heading from this same
tick (the leader's combination has no slot term, so there is no cycle). With
``leader_delay = 1`` followers instead receive the previous tick's leader
control, emulating one tick of broadcast latency. States integrate by forward
Euler at a fixed control period; two runs of the same scenario produce
bit-identical trajectories.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Sequence

import numpy as np

from . import metrics
from .behaviors import (
    BehaviorBreakdown,
    Gains,
    ReconfigMode,
    SensingRanges,
    collision_behavior,
    combine_control,
    formation_behavior,
    goal_behavior,
    obstacle_behavior,
    reconfiguration_behavior,
)
from .formation import FormationSpec, UavState, desired_position, same_wing
from .geometry import (
    EPS_ZERO,
    ZERO,
    Obstacle,
    Vec2,
    closest_boundary_point,
    norm,
    obstacle_distance,
    strictly_inside,
)

if TYPE_CHECKING:
    from .scenario_io import Scenario


class SpawnError(RuntimeError):
    """Raised when rejection sampling cannot place the requested UAVs."""


@dataclass(frozen=True)
class SimConfig:
    """Simulation parameters; defaults follow the reference setup.

    ``m_max`` clamps each pairwise behavior term; None means 10x v_max.
    """

    dt: float = 0.02
    max_steps: int = 5000
    v_max: float = 2.0
    ranges: SensingRanges = SensingRanges()
    goal_tolerance: float = 0.1
    seed: int = 0
    spawn_radius: float = 1.0
    reconfig_mode: ReconfigMode = ReconfigMode.SIGNED
    leader_delay: int = 0
    m_max: float | None = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.dt) and self.dt > 0.0):
            raise ValueError(f"dt must be > 0, got {self.dt!r}")
        if self.max_steps < 1:
            raise ValueError(f"max_steps must be >= 1, got {self.max_steps!r}")
        if not (math.isfinite(self.v_max) and self.v_max > 0.0):
            raise ValueError(f"v_max must be > 0, got {self.v_max!r}")
        if not (math.isfinite(self.goal_tolerance) and self.goal_tolerance > 0.0):
            raise ValueError(f"goal_tolerance must be > 0, got {self.goal_tolerance!r}")
        if not (math.isfinite(self.spawn_radius) and self.spawn_radius > 0.0):
            raise ValueError(f"spawn_radius must be > 0, got {self.spawn_radius!r}")
        if self.leader_delay not in (0, 1):
            raise ValueError(f"leader_delay must be 0 or 1, got {self.leader_delay!r}")
        if self.m_max is not None and not (math.isfinite(self.m_max) and self.m_max > 0.0):
            raise ValueError(f"m_max must be > 0, got {self.m_max!r}")

    def clamp_magnitude(self) -> float:
        return self.m_max if self.m_max is not None else 10.0 * self.v_max


@dataclass(frozen=True)
class WorldState:
    """Snapshot of the world; ``breakdowns`` are from the tick that produced it."""

    step: int
    time: float
    uavs: tuple[UavState, ...]
    obstacles: tuple[Obstacle, ...]
    goal: Vec2
    breakdowns: tuple[BehaviorBreakdown, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "uavs", tuple(self.uavs))
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        object.__setattr__(self, "breakdowns", tuple(self.breakdowns))
        ids = [u.id for u in self.uavs]
        if ids != list(range(1, len(ids) + 1)):
            raise ValueError(f"UAV ids must be 1..n in order, got {ids}")


@dataclass(frozen=True)
class TrajectoryRow:
    step: int
    time_s: float
    uav_id: int
    x_m: float
    y_m: float
    vx_mps: float
    vy_mps: float
    psi_rad: float
    uf_x: float
    uf_y: float
    ug_x: float
    ug_y: float
    uo_x: float
    uo_y: float
    uc_x: float
    uc_y: float
    ur_x: float
    ur_y: float
    reconfig_active: bool


@dataclass
class TrajectoryLog:
    """Flat per-(step, uav) log, strictly ordered by (step, uav_id)."""

    rows: list[TrajectoryRow] = field(default_factory=list)

    def record(self, world: WorldState, breakdowns: Sequence[BehaviorBreakdown]) -> None:
        for uav, bd in zip(world.uavs, breakdowns):
            self.rows.append(
                TrajectoryRow(
                    step=world.step,
                    time_s=world.time,
                    uav_id=uav.id,
                    x_m=uav.position.x,
                    y_m=uav.position.y,
                    vx_mps=uav.velocity.x,
                    vy_mps=uav.velocity.y,
                    psi_rad=uav.heading,
                    uf_x=bd.u_f.x,
                    uf_y=bd.u_f.y,
                    ug_x=bd.u_g.x,
                    ug_y=bd.u_g.y,
                    uo_x=bd.u_o.x,
                    uo_y=bd.u_o.y,
                    uc_x=bd.u_c.x,
                    uc_y=bd.u_c.y,
                    ur_x=bd.u_r.x,
                    ur_y=bd.u_r.y,
                    reconfig_active=bd.reconfig_active,
                )
            )


def spawn(n: int, start: Vec2, spawn_radius: float, r_a: float, seed: int) -> tuple[UavState, ...]:
    """Place n UAVs uniformly in a disk around start, pairwise >= r_a apart.

    Draws come from a seeded PCG64 stream (radius then angle per candidate),
    so the same (n, start, spawn_radius, seed) always yields the same layout.
    Candidates closer than r_a to an accepted position are redrawn; after 1000
    rejections the disk is considered too crowded.
    """
    if n < 2:
        raise ValueError(f"need at least 2 UAVs, got {n}")
    rng = np.random.Generator(np.random.PCG64(seed))
    placed: list[Vec2] = []
    rejects = 0
    while len(placed) < n:
        radius = spawn_radius * math.sqrt(rng.random())
        theta = 2.0 * math.pi * rng.random()
        cand = Vec2(start.x + radius * math.cos(theta), start.y + radius * math.sin(theta))
        if any(norm(cand - prev) < r_a for prev in placed):
            rejects += 1
            if rejects >= 1000:
                raise SpawnError(
                    f"failed to place {n} UAVs with spacing {r_a} in a disk of "
                    f"radius {spawn_radius} after 1000 rejections"
                )
            continue
        placed.append(cand)
    return tuple(UavState(i + 1, p, ZERO, 0.0) for i, p in enumerate(placed))


def sense_obstacles(
    p_i: Vec2, obstacles: Sequence[Obstacle], r_s: float
) -> list[tuple[Vec2, float]]:
    """(closest boundary point, distance) for each obstacle within r_s."""
    sensed = []
    for obstacle in obstacles:
        dist = obstacle_distance(obstacle, p_i)
        if dist < r_s:
            sensed.append((closest_boundary_point(obstacle, p_i), dist))
    return sensed


def compute_breakdowns(
    world: WorldState, spec: FormationSpec, gains: Gains, cfg: SimConfig
) -> tuple[BehaviorBreakdown, ...]:
    """Evaluate every UAV's behaviors at this state, leader first."""
    l = spec.leader
    states = world.uavs
    leader_state = states[l - 1]
    ranges = cfg.ranges
    m_max = cfg.clamp_magnitude()

    def pair_terms(i: int, p_i: Vec2) -> tuple[Vec2, Vec2]:
        everyone = [(u.id, u.position) for u in states if u.id != i]
        wing_mates = [(j, p) for j, p in everyone if same_wing(i, j, l)]
        u_c = collision_behavior(i, p_i, everyone, l, ranges, gains.k_c, gains.beta_c, m_max)
        u_r = reconfiguration_behavior(
            i, p_i, wing_mates, spec.d, ranges, gains.k_r, gains.beta_r,
            cfg.reconfig_mode, m_max,
        )
        return u_c, u_r

    u_g = goal_behavior(leader_state.position, world.goal, gains.k_g)
    u_o = obstacle_behavior(leader_state.position, world.obstacles, ranges, gains.k_o)
    u_c, u_r = pair_terms(l, leader_state.position)
    leader_bd = combine_control(True, ZERO, u_g, u_o, u_c, u_r, cfg.v_max)

    if cfg.leader_delay == 0:
        u_l = leader_bd.u_total
    else:
        u_l = world.breakdowns[l - 1].u_total if world.breakdowns else ZERO

    breakdowns: list[BehaviorBreakdown] = []
    for uav in states:
        if uav.id == l:
            breakdowns.append(leader_bd)
            continue
        slot = desired_position(leader_state.position, leader_state.heading, uav.id, spec)
        u_f = formation_behavior(uav.position, slot, u_l, gains.k_f)
        u_o_i = obstacle_behavior(uav.position, world.obstacles, ranges, gains.k_o)
        u_c_i, u_r_i = pair_terms(uav.id, uav.position)
        breakdowns.append(combine_control(False, u_f, ZERO, u_o_i, u_c_i, u_r_i, cfg.v_max))
    return tuple(breakdowns)


def apply_controls(
    world: WorldState, breakdowns: Sequence[BehaviorBreakdown], cfg: SimConfig
) -> WorldState:
    """Forward-Euler step: p += u*dt; heading follows u unless u is degenerate."""
    new_uavs = []
    for uav, bd in zip(world.uavs, breakdowns):
        u = bd.u_total
        position = Vec2(uav.position.x + u.x * cfg.dt, uav.position.y + u.y * cfg.dt)
        if norm(u) > EPS_ZERO:
            heading = math.atan2(u.y, u.x)
            if heading <= -math.pi:  # atan2(-0.0, x<0) returns -pi; normalize to (-pi, pi]
                heading = math.pi
        else:
            heading = uav.heading
        new_uavs.append(UavState(uav.id, position, u, heading))
    step = world.step + 1
    return WorldState(
        step=step,
        time=step * cfg.dt,
        uavs=tuple(new_uavs),
        obstacles=world.obstacles,
        goal=world.goal,
        breakdowns=tuple(breakdowns),
    )


def tick(world: WorldState, spec: FormationSpec, gains: Gains, cfg: SimConfig) -> WorldState:
    """One full control period: evaluate behaviors, then integrate."""
    return apply_controls(world, compute_breakdowns(world, spec, gains, cfg), cfg)


def _penetrated(world: WorldState) -> bool:
    return any(
        strictly_inside(obstacle, uav.position)
        for obstacle in world.obstacles
        for uav in world.uavs
    )


def run(scenario: "Scenario") -> tuple[TrajectoryLog, metrics.MetricsSeries, metrics.RunSummary]:
    """Run a scenario to termination, logging every step.

    Each logged step pairs the state with the controls evaluated at that
    state. The run ends when the leader is within goal_tolerance of the goal,
    when max_steps ticks have been integrated, or (as a failure) when any UAV
    penetrates an obstacle.
    """
    cfg = scenario.sim
    spec = scenario.formation
    gains = scenario.gains
    uavs = spawn(spec.n, scenario.start, cfg.spawn_radius, cfg.ranges.r_a, cfg.seed)
    world = WorldState(0, 0.0, uavs, tuple(scenario.obstacles), scenario.goal)

    log = TrajectoryLog()
    series = metrics.MetricsSeries()
    while True:
        breakdowns = compute_breakdowns(world, spec, gains, cfg)
        log.record(world, breakdowns)
        series.record(world, breakdowns, spec)
        if _penetrated(world):
            termination = metrics.TerminationReason.OBSTACLE_PENETRATION
            break
        leader_pos = world.uavs[spec.leader - 1].position
        if norm(leader_pos - world.goal) < cfg.goal_tolerance:
            termination = metrics.TerminationReason.GOAL_REACHED
            break
        if world.step >= cfg.max_steps:
            termination = metrics.TerminationReason.MAX_STEPS
            break
        world = apply_controls(world, breakdowns, cfg)

    summary = metrics.summarize(series, termination, world.step)
    return log, series, summary
