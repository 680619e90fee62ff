"""Builtin nominal policies for simulation and ablations."""

from __future__ import annotations

import math

import numpy as np

from .dynamics import EvaderAction
from .world import WorldState

BUILTIN_POLICIES = ("straight-to-target", "random")


def straight_to_target(world: WorldState) -> EvaderAction:
    o = world.or_state
    return EvaderAction(math.atan2(world.target[1] - o.y_o, world.target[0] - o.x_o))


def random_policy(seed: int):
    """Uniform random heading every step, drawn from its own seeded stream."""
    rng = np.random.default_rng(seed)

    def policy(world: WorldState) -> EvaderAction:
        return EvaderAction(float(rng.uniform(-math.pi, math.pi)))

    return policy


def builtin_policy(name: str, seed: int = 0):
    if name == "straight-to-target":
        return straight_to_target
    if name == "random":
        return random_policy(seed)
    raise ValueError(f"unknown policy {name!r}; choose from {list(BUILTIN_POLICIES)}")
