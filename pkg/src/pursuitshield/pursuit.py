"""Pursuer steering law.

The pursuer stands in for a time-optimal Nash pursuer with a simple proxy
assembled from the same two motion primitives such trajectories are made of:
rotation in place and straight-line driving.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .dynamics import DdrCommand, DdrParams, DdrState, OrState, wrap_angle

PURSUIT_MODES = ("turn-then-chase", "pure-pursuit")


@dataclass(frozen=True)
class PursuitConfig:
    mode: str = "turn-then-chase"
    angle_tolerance: float = 0.05  # rad; hysteresis-free branch switch
    angular_gain: float = 2.0  # pure-pursuit only

    def __post_init__(self) -> None:
        if self.mode not in PURSUIT_MODES:
            raise ValueError(f"unknown pursuit mode {self.mode!r}; expected one of {PURSUIT_MODES}")
        if self.angle_tolerance < 0 or self.angular_gain < 0:
            raise ValueError("angle_tolerance and angular_gain must be non-negative")


def bearing_error(d: DdrState, evader: OrState) -> float:
    """Signed angle from the pursuer heading to the line of sight, in (-pi, pi]."""
    bearing = math.atan2(evader.y_o - d.y_d, evader.x_o - d.x_d)
    return wrap_angle(bearing - d.theta_d)


def pursue(d: DdrState, p: DdrParams, evader: OrState, cfg: PursuitConfig = PursuitConfig()) -> DdrCommand:
    err = bearing_error(d, evader)
    if cfg.mode == "turn-then-chase":
        if abs(err) > cfg.angle_tolerance:
            w = p.u_max_wheel if err > 0 else -p.u_max_wheel
            return DdrCommand(-w, w)
        v = min(p.v_d, p.u_max_wheel)
        return DdrCommand(v, v)

    # pure pursuit: cruise at v_d, turn rate proportional to the bearing error,
    # scaled down uniformly if a wheel would exceed its bound
    omega = cfg.angular_gain * err
    u1 = p.v_d - omega * p.b
    u2 = p.v_d + omega * p.b
    peak = max(abs(u1), abs(u2))
    if peak > p.u_max_wheel:
        scale = p.u_max_wheel / peak
        u1, u2 = u1 * scale, u2 * scale
    return DdrCommand(u1, u2)
