from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import DdrState, ObstacleState, OrState


@dataclass(frozen=True)
class WorldState:
    """Snapshot of every entity at one tick."""

    or_state: OrState
    ddr_state: DdrState
    obstacles: tuple[ObstacleState, ...] = ()
    target: tuple[float, float] = (2.5, 0.0)
    t: float = 0.0
    step_index: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        object.__setattr__(self, "target", (float(self.target[0]), float(self.target[1])))

    @property
    def target_distance(self) -> float:
        return float(np.hypot(self.target[0] - self.or_state.x_o, self.target[1] - self.or_state.y_o))
