from __future__ import annotations

import math

from .world import WorldState

TARGET_REWARD = 1000.0
DISTANCE_PENALTY = 0.01  # per metre of remaining distance, per step


def reward(world: WorldState, target, d_t: float = 0.05) -> float:
    """Terminal bonus inside the target radius, otherwise a distance penalty."""
    d1 = math.hypot(target[0] - world.or_state.x_o, target[1] - world.or_state.y_o)
    if d1 <= d_t:
        return TARGET_REWARD
    return -DISTANCE_PENALTY * d1
