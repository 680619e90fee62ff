"""Kinematic models and explicit-Euler stepping.

Three bodies share the plane: an omnidirectional evader that moves at a fixed
speed along a commanded heading, a differential-drive pursuer steered by two
wheel speeds, and obstacles drifting at constant velocity. Every step function
is pure and returns a new frozen state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_DT = 0.05


class DynamicsError(ValueError):
    """Raised when a state, command or step size is invalid."""


def wrap_angle(theta: float) -> float:
    """Wrap an angle to the half-open interval (-pi, pi]."""
    w = math.remainder(theta, 2.0 * math.pi)
    if w <= -math.pi:
        w += 2.0 * math.pi
    return w


def _check_finite(*values: float) -> None:
    if not all(math.isfinite(v) for v in values):
        raise DynamicsError(f"non-finite value in {values!r}")


def _check_dt(dt: float) -> None:
    if not (math.isfinite(dt) and dt > 0.0):
        raise DynamicsError(f"dt must be positive and finite, got {dt!r}")


@dataclass(frozen=True)
class OrState:
    x_o: float
    y_o: float

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x_o, self.y_o])


@dataclass(frozen=True)
class OrParams:
    v_o: float = 0.1574

    def __post_init__(self) -> None:
        if not self.v_o > 0:
            raise DynamicsError(f"v_o must be positive, got {self.v_o}")


@dataclass(frozen=True)
class DdrState:
    x_d: float
    y_d: float
    theta_d: float

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x_d, self.y_d])


@dataclass(frozen=True)
class DdrParams:
    """Pursuer parameters.

    ``b`` is the centre-to-wheel distance. Wheel "angular velocities" are
    expressed in the same units as ``v_d`` (the translational speed is their
    mean), so ``u_max_wheel`` defaults to twice the cruise speed.
    """

    v_d: float = 0.2
    b: float = 0.8
    u_max_wheel: float | None = None

    def __post_init__(self) -> None:
        if not (self.v_d > 0 and self.b > 0):
            raise DynamicsError(f"v_d and b must be positive, got v_d={self.v_d}, b={self.b}")
        if self.u_max_wheel is None:
            object.__setattr__(self, "u_max_wheel", 2.0 * self.v_d)
        if not self.u_max_wheel > 0:
            raise DynamicsError(f"u_max_wheel must be positive, got {self.u_max_wheel}")


@dataclass(frozen=True)
class DdrCommand:
    u1: float  # left wheel
    u2: float  # right wheel

    @property
    def speed(self) -> float:
        return 0.5 * (self.u1 + self.u2)


@dataclass(frozen=True)
class ObstacleState:
    x_c: float
    y_c: float
    v_cx: float = 0.0
    v_cy: float = 0.0

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x_c, self.y_c])

    @property
    def velocity(self) -> np.ndarray:
        return np.array([self.v_cx, self.v_cy])


@dataclass(frozen=True)
class EvaderAction:
    theta_o: float

    def __post_init__(self) -> None:
        _check_finite(self.theta_o)
        object.__setattr__(self, "theta_o", wrap_angle(self.theta_o))

    def velocity(self, v_o: float) -> np.ndarray:
        return np.array([v_o * math.cos(self.theta_o), v_o * math.sin(self.theta_o)])


def step_or(s: OrState, p: OrParams, a: EvaderAction, dt: float = DEFAULT_DT) -> OrState:
    _check_dt(dt)
    _check_finite(s.x_o, s.y_o)
    return OrState(
        s.x_o + p.v_o * math.cos(a.theta_o) * dt,
        s.y_o + p.v_o * math.sin(a.theta_o) * dt,
    )


def step_ddr(s: DdrState, p: DdrParams, c: DdrCommand, dt: float = DEFAULT_DT) -> DdrState:
    """Advance the differential-drive robot by one Euler step.

    Raises:
        DynamicsError: if either wheel speed exceeds ``p.u_max_wheel``.
    """
    _check_dt(dt)
    _check_finite(s.x_d, s.y_d, s.theta_d, c.u1, c.u2)
    bound = p.u_max_wheel
    # small slack so commands built at exactly the bound survive rounding
    if abs(c.u1) > bound * (1 + 1e-12) or abs(c.u2) > bound * (1 + 1e-12):
        raise DynamicsError(
            f"wheel command out of bounds: |u1|={abs(c.u1):.6g}, |u2|={abs(c.u2):.6g}, "
            f"limit={bound:.6g}"
        )
    v = 0.5 * (c.u1 + c.u2)
    omega = (c.u2 - c.u1) / (2.0 * p.b)
    return DdrState(
        s.x_d + v * math.cos(s.theta_d) * dt,
        s.y_d + v * math.sin(s.theta_d) * dt,
        wrap_angle(s.theta_d + omega * dt),
    )


def step_obstacle(s: ObstacleState, dt: float = DEFAULT_DT) -> ObstacleState:
    _check_dt(dt)
    _check_finite(s.x_c, s.y_c, s.v_cx, s.v_cy)
    return ObstacleState(s.x_c + s.v_cx * dt, s.y_c + s.v_cy * dt, s.v_cx, s.v_cy)
