"""Target-aligned observation and action encoding for the evader policy.

Everything is expressed in a frame whose x axis points from the evader to
the target, so the policy is invariant to translations and rotations of the
whole scene. The action is a heading offset from the target bearing: a raw
action of 0 means "head straight for the target".
"""

from __future__ import annotations

import math

import numpy as np

from ..dynamics import wrap_angle
from ..world import WorldState

OBS_DIM = 10
NORM_LENGTH = 5.0  # m
FINE_LENGTH = 0.01  # m, resolution of the log-distance feature near the target


def target_bearing(world: WorldState) -> float:
    o = world.or_state
    return math.atan2(world.target[1] - o.y_o, world.target[0] - o.x_o)


def observe(world: WorldState, norm_length: float = NORM_LENGTH) -> np.ndarray:
    """Observation vector in the target-aligned frame.

    Layout: ``[target_dist, target_log_dist, pursuer_dx, pursuer_dy,
    cos(theta_d - bearing), sin(theta_d - bearing), obstacle_dx, obstacle_dy,
    obstacle_vx, obstacle_vy]``. Distances and offsets are divided by
    ``norm_length``; ``target_log_dist`` is ``log1p(r / FINE_LENGTH)``
    scaled to 1 at ``norm_length`` so that the last few centimetres stay
    distinguishable. Obstacle velocity is in m/s. Worlds without obstacles
    get zeros in the obstacle slots.
    """
    o = world.or_state
    d = world.ddr_state
    bearing = target_bearing(world)
    cb, sb = math.cos(bearing), math.sin(bearing)

    def rotate(x, y):
        return cb * x + sb * y, -sb * x + cb * y

    obs = np.zeros(OBS_DIM)
    r = math.hypot(world.target[0] - o.x_o, world.target[1] - o.y_o)
    obs[0] = r / norm_length
    obs[1] = math.log1p(r / FINE_LENGTH) / math.log1p(norm_length / FINE_LENGTH)
    obs[2], obs[3] = rotate((d.x_d - o.x_o) / norm_length, (d.y_d - o.y_o) / norm_length)
    rel = d.theta_d - bearing
    obs[4], obs[5] = math.cos(rel), math.sin(rel)
    if world.obstacles:
        nearest = min(world.obstacles, key=lambda c: math.hypot(c.x_c - o.x_o, c.y_c - o.y_o))
        obs[6], obs[7] = rotate((nearest.x_c - o.x_o) / norm_length, (nearest.y_c - o.y_o) / norm_length)
        obs[8], obs[9] = rotate(nearest.v_cx, nearest.v_cy)
    return obs


def heading_from_raw(raw: float, world: WorldState) -> float:
    """World-frame heading for a raw action in [-1, 1]."""
    return wrap_angle(target_bearing(world) + math.pi * float(np.clip(raw, -1.0, 1.0)))


def raw_from_heading(theta: float, world: WorldState) -> float:
    return float(np.clip(wrap_angle(theta - target_bearing(world)) / math.pi, -1.0, 1.0))
