"""Barrier functions and their linear velocity constraints.

Each barrier is ``h = |p_evader - p_other| - d_safe``. With the linear
class-K choice ``alpha(h) = gamma * h`` the condition ``hdot + gamma*h >= 0``
is affine in the evader velocity ``u``::

    c . u + d >= 0,   c = dp / |dp|,   d = -c . v_other + gamma * h

where ``v_other`` is the obstacle velocity or the pursuer's forward velocity.
The constraints of several barriers are enforced jointly, which keeps the
composite ``min_i h_i`` non-negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import DdrParams, DdrState, ObstacleState, OrState
from .world import WorldState

SINGULAR_DISTANCE = 1e-9  # m

PURSUER = "pursuer"
OBSTACLE = "obstacle"


class SingularityError(ValueError):
    """The evader coincides with another entity, so no direction is defined."""

    def __init__(self, kind: str, index: int | None = None):
        self.kind = kind
        self.index = index
        where = kind if index is None else f"{kind}[{index}]"
        super().__init__(f"evader coincides with {where}; barrier gradient undefined")


@dataclass(frozen=True)
class ShieldConfig:
    gamma_oc: float = 1.0
    gamma_pv: float = 1.2
    d_oc: float = 0.2  # m
    d_pv: float = 0.2  # m

    def __post_init__(self) -> None:
        for name in ("gamma_oc", "gamma_pv", "d_oc", "d_pv"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be strictly positive, got {value!r}")


@dataclass(frozen=True)
class BarrierValue:
    h: float
    kind: str
    index: int | None = None

    @property
    def safe(self) -> bool:
        return self.h >= 0.0


@dataclass(frozen=True)
class BarrierConstraint:
    """Half-plane ``c . u + d >= 0`` on the evader velocity."""

    c: tuple[float, float]
    d: float
    kind: str
    index: int | None = None

    def value(self, u) -> float:
        return self.c[0] * u[0] + self.c[1] * u[1] + self.d


def _offset(or_state: OrState, x: float, y: float, kind: str, index: int | None):
    dx = or_state.x_o - x
    dy = or_state.y_o - y
    dist = math.hypot(dx, dy)
    if dist < SINGULAR_DISTANCE:
        raise SingularityError(kind, index)
    return dx, dy, dist


def h_obstacle(or_state: OrState, obs: ObstacleState, cfg: ShieldConfig, index: int | None = 0) -> BarrierValue:
    _, _, dist = _offset(or_state, obs.x_c, obs.y_c, OBSTACLE, index)
    return BarrierValue(dist - cfg.d_oc, OBSTACLE, index)


def h_pursuer(or_state: OrState, ddr: DdrState, cfg: ShieldConfig) -> BarrierValue:
    _, _, dist = _offset(or_state, ddr.x_d, ddr.y_d, PURSUER, None)
    return BarrierValue(dist - cfg.d_pv, PURSUER, None)


def _constraint(dx, dy, dist, v_other, gamma, d_safe, kind, index) -> BarrierConstraint:
    cx, cy = dx / dist, dy / dist
    d = -(cx * v_other[0] + cy * v_other[1]) + gamma * (dist - d_safe)
    return BarrierConstraint((cx, cy), d, kind, index)


def constraint_obstacle(
    or_state: OrState, obs: ObstacleState, cfg: ShieldConfig, index: int | None = 0
) -> BarrierConstraint:
    dx, dy, dist = _offset(or_state, obs.x_c, obs.y_c, OBSTACLE, index)
    return _constraint(dx, dy, dist, (obs.v_cx, obs.v_cy), cfg.gamma_oc, cfg.d_oc, OBSTACLE, index)


def constraint_pursuer(
    or_state: OrState, ddr: DdrState, params: DdrParams, cfg: ShieldConfig, speed: float | None = None
) -> BarrierConstraint:
    """Pursuer constraint; ``speed`` is the pursuer's current translational speed (default ``v_d``)."""
    dx, dy, dist = _offset(or_state, ddr.x_d, ddr.y_d, PURSUER, None)
    v = params.v_d if speed is None else speed
    v_ddr = (v * math.cos(ddr.theta_d), v * math.sin(ddr.theta_d))
    return _constraint(dx, dy, dist, v_ddr, cfg.gamma_pv, cfg.d_pv, PURSUER, None)


def barrier_values(world: WorldState, cfg: ShieldConfig) -> list[BarrierValue]:
    """All barrier values, obstacles by index first, then the pursuer."""
    values = [h_obstacle(world.or_state, obs, cfg, i) for i, obs in enumerate(world.obstacles)]
    values.append(h_pursuer(world.or_state, world.ddr_state, cfg))
    return values


def assemble(
    world: WorldState, cfg: ShieldConfig, ddr_params: DdrParams = DdrParams(), pursuer_speed: float | None = None
) -> list[BarrierConstraint]:
    """Constraint system for the conjunction of all barriers.

    Order is obstacles by index, then the pursuer.
    """
    constraints = [constraint_obstacle(world.or_state, obs, cfg, i) for i, obs in enumerate(world.obstacles)]
    constraints.append(constraint_pursuer(world.or_state, world.ddr_state, ddr_params, cfg, pursuer_speed))
    return constraints


def unit_norm_error(constraint: BarrierConstraint) -> float:
    return abs(float(np.hypot(*constraint.c)) - 1.0)
