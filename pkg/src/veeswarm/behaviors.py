"""The five distributed behaviors and the per-UAV combination law.

Each behavior is a pure function from locally observable state to a velocity
contribution (m/s). Per UAV the active contributions are summed and saturated
to the speed limit:

    leader:   u = u_g + u_r + u_c + u_o
    follower: u = u_f + u_r + u_c + u_o

Pairwise terms (collision, reconfiguration) diverge as the pair distance
approaches the alert radius; their per-pair magnitude is clamped to ``m_max``
so the integrator stays bounded. The clamp preserves direction and is
invisible after saturation at any sane setting (default 10x the speed limit).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .formation import same_wing
from .geometry import EPS_ZERO, ZERO, Obstacle, Vec2, closest_boundary_point, norm, obstacle_distance, unit

_log = logging.getLogger(__name__)

# Reconfiguration outputs below this speed count as inactive when counting
# "UAVs currently reconfiguring" (see the metrics module).
ACTIVATION_EPS = 1e-3


@dataclass(frozen=True)
class Gains:
    """Behavior coefficients; all strictly positive.

    Defaults are tuned for the reference scales (d = 0.8 m, r_a = 0.3 m,
    r_s = 2 m, v_max = 2 m/s, courses of a few tens of meters). Four couplings
    matter:

    * k_g must keep the leader's cruise below v_max on the intended course
      lengths. A saturated leader erases followers' catch-up headroom and the
      wing-drag feedback (a trailing wing mate slows the leader through the
      reconfiguration term), freezing any trailing error until terminal
      deceleration.
    * k_o sets the height of the repulsion barrier between the entry corners
      of a narrow passage; it must stay below the leader's goal pull there or
      the formation stalls hunting along the obstacle face.
    * k_r must dominate the slot pull k_f near obstacles, so a blocked wing
      folds along its chain instead of every UAV pinning itself against the
      wall chasing a slot buried inside it; too-weak cohesion stretches wing
      links past r_s and sheds UAVs.
    * beta_c must be large enough that cross-wing repulsion has died off at
      settled-V separations (~1.1-1.8 m here); a slow decay leaves a residual
      push that holds the wings off their slots and keeps the reconfiguration
      term active even in steady cruise.
    """

    k_f: float = 1.0
    k_g: float = 0.05
    k_o: float = 0.25
    k_c: float = 0.5
    k_r: float = 4.0
    beta_c: float = 8.0
    beta_r: float = 1.5

    def __post_init__(self) -> None:
        for name in ("k_f", "k_g", "k_o", "k_c", "k_r", "beta_c", "beta_r"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"gain {name} must be > 0, got {value!r}")


@dataclass(frozen=True)
class SensingRanges:
    """Alert radius r_a (hard safety distance) and sensing radius r_s, r_a < r_s."""

    r_a: float = 0.3
    r_s: float = 2.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.r_a) and math.isfinite(self.r_s)):
            raise ValueError("sensing ranges must be finite")
        if not 0.0 < self.r_a < self.r_s:
            raise ValueError(
                f"ranges must satisfy 0 < r_a < r_s, got r_a={self.r_a!r}, r_s={self.r_s!r}"
            )


class ReconfigMode(Enum):
    """Direction rule for the wing-distance-regulating force.

    LITERAL pushes same-wing neighbors apart regardless of their spacing
    error. SIGNED (default) repels a pair that is too close and attracts one
    that is too far, which is what actually restores the wing spacing; a
    purely repulsive term cannot pull an over-extended wing back together.
    """

    LITERAL = "literal"
    SIGNED = "signed"


@dataclass(frozen=True)
class BehaviorBreakdown:
    """Per-UAV record of each behavior term and the saturated total."""

    u_f: Vec2
    u_g: Vec2
    u_o: Vec2
    u_c: Vec2
    u_r: Vec2
    u_total: Vec2
    reconfig_active: bool


def formation_behavior(p_i: Vec2, p_i_desired: Vec2, u_l: Vec2, k_f: float) -> Vec2:
    """Slot-tracking term -k_f*(p_i - p_i_desired) + u_l.

    ``u_l`` is the leader's control for this tick (feedforward); the caller is
    responsible for evaluating the leader first.
    """
    return Vec2(
        k_f * (p_i_desired.x - p_i.x) + u_l.x,
        k_f * (p_i_desired.y - p_i.y) + u_l.y,
    )


def goal_behavior(p_i: Vec2, p_g: Vec2, k_g: float) -> Vec2:
    """Goal-tracking term -k_g*(p_i - p_g); runs on the leader only."""
    return Vec2(k_g * (p_g.x - p_i.x), k_g * (p_g.y - p_i.y))


def obstacle_behavior(
    p_i: Vec2, obstacles: Sequence[Obstacle], ranges: SensingRanges, k_o: float
) -> Vec2:
    """Repulsion away from every obstacle sensed within r_s.

    Per obstacle at boundary distance d < r_s the contribution has magnitude
    k_o*(1/d^2 - 1/r_s^2), directed from the closest boundary point toward the
    UAV; it fades to zero continuously at the sensing boundary. A UAV exactly
    on an obstacle boundary has no usable direction and contributes zero.
    """
    total = ZERO
    inv_rs2 = 1.0 / (ranges.r_s * ranges.r_s)
    for obstacle in obstacles:
        d = obstacle_distance(obstacle, p_i)
        if d >= ranges.r_s:
            continue
        if d < EPS_ZERO:
            _log.warning("obstacle repulsion degenerate: UAV on obstacle boundary")
            continue
        away = unit(p_i - closest_boundary_point(obstacle, p_i))
        total = total + away * (k_o * (1.0 / (d * d) - inv_rs2))
    return total


def _pair_clamp(raw: float, m_max: float) -> float:
    return raw if raw < m_max else m_max


def collision_behavior(
    i: int,
    p_i: Vec2,
    others: Sequence[tuple[int, Vec2]],
    leader: int,
    ranges: SensingRanges,
    k_c: float,
    beta_c: float,
    m_max: float,
) -> Vec2:
    """Repulsion between opposite-wing UAVs inside each other's sensing area.

    Per qualifying pair the magnitude is k_c*exp(-beta_c*(r - r_a))/(r - r_a)
    with r the pair distance, clamped to m_max; pairs at or below the alert
    radius contribute the full m_max. Same-wing safety is handled by the
    reconfiguration term instead. Coincident UAVs have no direction, so they
    are pushed along +x at m_max, deterministically.
    """
    total = ZERO
    for j, p_j in others:
        if j == i or same_wing(i, j, leader):
            continue
        p_ij = p_i - p_j
        r = norm(p_ij)
        if r >= ranges.r_s:
            continue
        if r < EPS_ZERO:
            _log.warning("collision term degenerate: UAVs %d and %d coincide", i, j)
            total = total + Vec2(m_max, 0.0)
            continue
        x = r - ranges.r_a
        if x <= EPS_ZERO:
            mag = m_max
        else:
            mag = _pair_clamp(k_c * math.exp(-beta_c * x) / x, m_max)
        total = total + unit(p_ij) * mag
    return total


def reconfiguration_behavior(
    i: int,
    p_i: Vec2,
    same_wing_others: Sequence[tuple[int, Vec2]],
    d: float,
    ranges: SensingRanges,
    k_r: float,
    beta_r: float,
    mode: ReconfigMode,
    m_max: float,
) -> Vec2:
    """Wing-spacing regulation against same-wing neighbors within r_s.

    Per pair the magnitude is k_r*|r - d_ij|^beta_r / (r - r_a)^2 with
    d_ij = d*|i - j|, clamped to m_max (and held at m_max at or below the
    alert radius). In SIGNED mode the force points away from the neighbor
    when the pair is too close and toward it when too far; LITERAL mode always
    points away. This term doubles as same-wing collision avoidance, so it
    applies to every same-wing pair in range, consecutive or not.
    """
    total = ZERO
    for j, p_j in same_wing_others:
        if j == i:
            continue
        p_ij = p_i - p_j
        r = norm(p_ij)
        if r >= ranges.r_s:
            continue
        if r < EPS_ZERO:
            _log.warning("reconfiguration term degenerate: UAVs %d and %d coincide", i, j)
            total = total + Vec2(m_max, 0.0)
            continue
        d_ij = d * abs(i - j)
        x = r - ranges.r_a
        if x <= EPS_ZERO:
            mag = m_max
        else:
            mag = _pair_clamp(k_r * abs(r - d_ij) ** beta_r / (x * x), m_max)
        direction = unit(p_ij)
        if mode is ReconfigMode.SIGNED and r > d_ij:
            direction = -direction
        total = total + direction * mag
    return total


def combine_control(
    leader: bool,
    u_f: Vec2,
    u_g: Vec2,
    u_o: Vec2,
    u_c: Vec2,
    u_r: Vec2,
    v_max: float,
    eps_act: float = ACTIVATION_EPS,
) -> BehaviorBreakdown:
    """Sum the role-appropriate terms and saturate to the speed limit.

    The leader combines the goal term and no formation term; followers the
    reverse (the role-inappropriate term is recorded as zero). If the raw sum
    exceeds v_max it is rescaled to norm v_max, preserving direction.
    """
    u_f = ZERO if leader else u_f
    u_g = u_g if leader else ZERO
    primary = u_g if leader else u_f
    raw = Vec2(
        primary.x + u_r.x + u_c.x + u_o.x,
        primary.y + u_r.y + u_c.y + u_o.y,
    )
    speed = norm(raw)
    u_total = raw * (v_max / speed) if speed > v_max else raw
    return BehaviorBreakdown(
        u_f=u_f,
        u_g=u_g,
        u_o=u_o,
        u_c=u_c,
        u_r=u_r,
        u_total=u_total,
        reconfig_active=norm(u_r) > eps_act,
    )
