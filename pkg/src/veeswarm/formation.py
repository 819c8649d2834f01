"""V-formation geometry: leader slot, wing membership, desired poses.

A formation of n UAVs (1-based ids) flies two straight wings that meet at the
leader R_l, l = ceil(n/2). Wing rays leave the leader at bearing psi_l + alpha
(ids below l) and psi_l - alpha (ids above l), with consecutive slots d apart,
so the slot of UAV i sits d*|l - i| from the leader along its wing ray. The
leader belongs to both wings: it is the shared apex of the two rays, and the
straight-wing spacing rule d_ij = d*|i - j| holds across it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .geometry import EPS_ZERO, Vec2, norm


class Wing(Enum):
    LEADER = "leader"
    LEFT = "left"  # ids below the leader's
    RIGHT = "right"  # ids above the leader's


def leader_index(n: int) -> int:
    """Leader slot for an n-UAV formation: ceil(n/2), 1-based."""
    if n < 2:
        raise ValueError(f"formation needs at least 2 UAVs, got {n}")
    return (n + 1) // 2


@dataclass(frozen=True)
class FormationSpec:
    """Blueprint of the V: size, wing spacing, wing bearing and leader id."""

    n: int
    d: float
    alpha: float
    leader: int = 0  # 0 selects the default ceil(n/2)

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"formation needs at least 2 UAVs, got {self.n}")
        if not (math.isfinite(self.d) and self.d > 0.0):
            raise ValueError(f"wing spacing d must be > 0, got {self.d!r}")
        if not (math.pi / 2 < self.alpha < math.pi):
            raise ValueError(
                f"wing bearing alpha must lie in (pi/2, pi), got {self.alpha!r}"
            )
        if self.leader == 0:
            object.__setattr__(self, "leader", leader_index(self.n))
        if not 1 <= self.leader <= self.n:
            raise ValueError(f"leader index {self.leader} outside 1..{self.n}")


@dataclass(frozen=True)
class UavState:
    """One UAV: id, position (m), velocity (m/s), heading (rad, (-pi, pi])."""

    id: int
    position: Vec2
    velocity: Vec2
    heading: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.heading):
            raise ValueError(f"non-finite heading {self.heading!r}")
        if norm(self.velocity) > EPS_ZERO:
            expected = math.atan2(self.velocity.y, self.velocity.x)
            diff = (self.heading - expected + math.pi) % (2.0 * math.pi) - math.pi
            if abs(diff) > 1e-9:
                raise ValueError(
                    f"heading {self.heading} inconsistent with velocity "
                    f"({self.velocity.x}, {self.velocity.y})"
                )


def wing_of(i: int, l: int) -> Wing:
    if i == l:
        return Wing.LEADER
    return Wing.LEFT if i < l else Wing.RIGHT


def same_wing(i: int, j: int, l: int) -> bool:
    """True when i and j share a wing; the leader counts as on both wings."""
    return (i <= l and j <= l) or (i >= l and j >= l)


def desired_offset(i: int, spec: FormationSpec, psi_l: float) -> tuple[float, float]:
    """Polar offset (d_i, alpha_i) of slot i relative to the leader.

    d_i = d*|l - i|; alpha_i = psi_l + alpha on the low-id wing and
    psi_l - alpha on the high-id wing. The leader has no offset.
    """
    l = spec.leader
    if not 1 <= i <= spec.n:
        raise ValueError(f"UAV index {i} outside 1..{spec.n}")
    if i == l:
        raise ValueError("the leader has no formation offset")
    d_i = spec.d * abs(l - i)
    alpha_i = psi_l + spec.alpha if i < l else psi_l - spec.alpha
    return d_i, alpha_i


def desired_position(p_l: Vec2, psi_l: float, i: int, spec: FormationSpec) -> Vec2:
    """Slot position for UAV i given the leader pose: p_l + d_i*[cos a_i, sin a_i]."""
    d_i, alpha_i = desired_offset(i, spec, psi_l)
    return Vec2(p_l.x + d_i * math.cos(alpha_i), p_l.y + d_i * math.sin(alpha_i))


def desired_pair_distance(i: int, j: int, d: float, l: int) -> float:
    """Target spacing d*|i - j| for a same-wing pair (leader-inclusive)."""
    if i == j:
        raise ValueError("pair distance needs two distinct UAVs")
    if not same_wing(i, j, l):
        raise ValueError(
            f"UAVs {i} and {j} are on opposite wings; d*|i-j| does not apply"
        )
    return d * abs(i - j)
