"""Evaluation quantities: heading order, formation error, spacing statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Sequence

from .behaviors import ACTIVATION_EPS, BehaviorBreakdown
from .formation import FormationSpec, desired_position
from .geometry import norm

if TYPE_CHECKING:
    from .simulator import WorldState


class TerminationReason(Enum):
    GOAL_REACHED = "GoalReached"
    MAX_STEPS = "MaxSteps"
    OBSTACLE_PENETRATION = "ObstaclePenetration"


def order_metric(headings: Sequence[float]) -> float:
    """Mean resultant length of the heading unit vectors, in [0, 1].

    1 means all UAVs share a heading; clamped against 1-ulp float excess so
    the [0, 1] range holds exactly.
    """
    if not headings:
        raise ValueError("order metric needs at least one heading")
    sx = sum(math.cos(psi) for psi in headings)
    sy = sum(math.sin(psi) for psi in headings)
    return min(1.0, math.hypot(sx, sy) / len(headings))


def avg_formation_error(world: "WorldState", spec: FormationSpec) -> float:
    """Mean follower distance to its slot at the current leader pose.

    The leader is excluded: slot error is the quantity the slot-tracking
    behavior regulates, and it vanishes exactly in the ideal V.
    """
    leader = world.uavs[spec.leader - 1]
    total = 0.0
    count = 0
    for uav in world.uavs:
        if uav.id == spec.leader:
            continue
        slot = desired_position(leader.position, leader.heading, uav.id, spec)
        total += norm(uav.position - slot)
        count += 1
    return total / count


def pairwise_stats(world: "WorldState") -> tuple[float, list[tuple[tuple[int, int], float]]]:
    """Minimum pairwise distance plus the full per-pair list for logging."""
    pairs: list[tuple[tuple[int, int], float]] = []
    smallest = math.inf
    uavs = world.uavs
    for a in range(len(uavs)):
        for b in range(a + 1, len(uavs)):
            dist = norm(uavs[a].position - uavs[b].position)
            pairs.append(((uavs[a].id, uavs[b].id), dist))
            if dist < smallest:
                smallest = dist
    return smallest, pairs


def avg_consecutive_distance(world: "WorldState") -> float:
    """Mean distance over index-consecutive pairs (R_i, R_i+1).

    Every index-consecutive pair is wing-consecutive (the two pairs flanking
    the leader included), so the ideal value is the wing spacing d.
    """
    uavs = world.uavs
    total = 0.0
    for a in range(len(uavs) - 1):
        total += norm(uavs[a].position - uavs[a + 1].position)
    return total / (len(uavs) - 1)


def reconfig_activation_count(
    breakdowns: Sequence[BehaviorBreakdown], eps_act: float = ACTIVATION_EPS
) -> int:
    """Number of UAVs whose reconfiguration output exceeds eps_act."""
    return sum(1 for bd in breakdowns if norm(bd.u_r) > eps_act)


@dataclass
class MetricsSeries:
    """Per-step metric traces, appended as the simulation runs."""

    steps: list[int] = field(default_factory=list)
    times: list[float] = field(default_factory=list)
    phi: list[float] = field(default_factory=list)
    avg_error: list[float] = field(default_factory=list)
    min_pairwise: list[float] = field(default_factory=list)
    avg_consecutive: list[float] = field(default_factory=list)
    n_reconfig_active: list[int] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.steps)

    def record(
        self,
        world: "WorldState",
        breakdowns: Sequence[BehaviorBreakdown],
        spec: FormationSpec,
    ) -> None:
        self.steps.append(world.step)
        self.times.append(world.time)
        self.phi.append(order_metric([u.heading for u in world.uavs]))
        self.avg_error.append(avg_formation_error(world, spec))
        self.min_pairwise.append(pairwise_stats(world)[0])
        self.avg_consecutive.append(avg_consecutive_distance(world))
        self.n_reconfig_active.append(reconfig_activation_count(breakdowns))


@dataclass(frozen=True)
class RunSummary:
    """Whole-run statistics: time-means over every recorded step.

    Means deliberately include the assembly transient, so they sit above the
    steady-state error floor.
    """

    avg_error_mean: float
    min_pairwise_overall: float
    avg_consecutive_mean: float
    termination: TerminationReason
    steps_used: int


def summarize(
    series: MetricsSeries, termination: TerminationReason, steps_used: int
) -> RunSummary:
    if len(series) == 0:
        raise ValueError("cannot summarize an empty metric series")
    return RunSummary(
        avg_error_mean=sum(series.avg_error) / len(series),
        min_pairwise_overall=min(series.min_pairwise),
        avg_consecutive_mean=sum(series.avg_consecutive) / len(series),
        termination=termination,
        steps_used=steps_used,
    )
