"""Closest safe heading for a fixed-speed evader.

With speed fixed at ``v_o`` the velocity lives on a circle and each
half-plane ``c . u + d >= 0`` cuts out one arc of admissible headings. The
filter intersects the arcs and returns the admissible heading nearest the
nominal one, which is the same point that minimises ``|u - u_nominal|^2`` on
the circle. When no heading satisfies every constraint it falls back to the
heading that maximises the smallest margin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .dynamics import EvaderAction, wrap_angle
from .shield import BarrierConstraint

MARGIN_TOL = 1e-9
UNIT_TOL = 1e-6


class FilterError(ValueError):
    pass


@dataclass(frozen=True)
class FilterResult:
    safe_action: EvaderAction
    corrected: bool
    deviation: float  # rad, in [0, pi]
    feasible: bool
    margin: float  # min_i c_i . u_safe + d_i, m/s

    @property
    def objective(self) -> float:
        """Half squared distance between unit-speed nominal and safe velocities, per v_o**2."""
        return 1.0 - math.cos(self.deviation)


def _margins(theta: float, v_o: float, constraints: Sequence[BarrierConstraint]) -> float:
    ct, st = math.cos(theta), math.sin(theta)
    return min(v_o * (c.c[0] * ct + c.c[1] * st) + c.d for c in constraints)


def _arc_endpoints(v_o: float, constraints: Sequence[BarrierConstraint]) -> list[float]:
    """Endpoints of every non-trivial arc ``cos(theta - phi) >= -d / v_o``."""
    points = []
    for c in constraints:
        ratio = -c.d / v_o
        if -1.0 < ratio <= 1.0:
            phi = math.atan2(c.c[1], c.c[0])
            half = math.acos(ratio)
            points.append(wrap_angle(phi + half))
            points.append(wrap_angle(phi - half))
    return points


def _pick_nearest(candidates: list[float], nominal: float) -> float:
    # ties go counterclockwise: compare (distance, -signed offset)
    def key(theta: float):
        offset = wrap_angle(theta - nominal)
        return (abs(offset), -offset)

    return min(candidates, key=key)


def _crossings(v_o: float, a: BarrierConstraint, b: BarrierConstraint) -> list[float]:
    """Headings where the margins of two constraints are equal."""
    kx, ky = a.c[0] - b.c[0], a.c[1] - b.c[1]
    r = math.hypot(kx, ky)
    if r < 1e-15:
        return []
    ratio = (b.d - a.d) / (v_o * r)
    if not -1.0 <= ratio <= 1.0:
        return []
    psi = math.atan2(ky, kx)
    half = math.acos(ratio)
    return [wrap_angle(psi + half), wrap_angle(psi - half)]


def least_violating_heading(v_o: float, constraints: Sequence[BarrierConstraint], nominal: float) -> float:
    """Maximiser of ``min_i (c_i . u(theta) + d_i)``.

    The max-min of sinusoids is attained either at the peak of one of them
    or where two of them cross, so the candidate set is finite.
    """
    candidates = [math.atan2(c.c[1], c.c[0]) for c in constraints]
    for i in range(len(constraints)):
        for j in range(i + 1, len(constraints)):
            candidates.extend(_crossings(v_o, constraints[i], constraints[j]))
    scored = [(_margins(t, v_o, constraints), t) for t in candidates]
    best = max(s for s, _ in scored)
    # near-equal optima resolved towards the nominal heading for determinism
    ties = [t for s, t in scored if s >= best - 1e-12]
    return _pick_nearest(ties, nominal)


def filter_action(
    nominal: EvaderAction, constraints: Sequence[BarrierConstraint], v_o: float
) -> FilterResult:
    if not v_o > 0:
        raise FilterError(f"v_o must be positive, got {v_o!r}")
    for c in constraints:
        if not (math.isfinite(c.c[0]) and math.isfinite(c.c[1]) and math.isfinite(c.d)):
            raise FilterError(f"non-finite constraint {c!r}")
        if abs(math.hypot(*c.c) - 1.0) > UNIT_TOL:
            raise FilterError(f"constraint direction is not a unit vector: {c.c!r}")

    theta0 = nominal.theta_o
    if not constraints:
        return FilterResult(nominal, False, 0.0, True, math.inf)

    m0 = _margins(theta0, v_o, constraints)
    if m0 >= 0.0:
        return FilterResult(nominal, False, 0.0, True, m0)

    feasible = [t for t in _arc_endpoints(v_o, constraints) if _margins(t, v_o, constraints) >= -MARGIN_TOL]
    if feasible:
        theta = _pick_nearest(feasible, theta0)
        ok = True
    else:
        theta = least_violating_heading(v_o, constraints, theta0)
        ok = False
    deviation = abs(wrap_angle(theta - theta0))
    return FilterResult(EvaderAction(theta), deviation > 0.0, deviation, ok, _margins(theta, v_o, constraints))
