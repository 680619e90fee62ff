"""Episode orchestration.

One tick runs a fixed pipeline on the pre-step snapshot: assemble barrier
constraints, filter the nominal heading, compute the pursuer command, advance
every entity simultaneously, score the new state and check termination.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dynamics import (
    DdrParams,
    DdrState,
    EvaderAction,
    ObstacleState,
    OrParams,
    OrState,
    step_ddr,
    step_obstacle,
    step_or,
)
from .pursuit import PursuitConfig, pursue
from .rewards import reward
from .safefilter import FilterResult, filter_action
from .shield import (
    OBSTACLE,
    PURSUER,
    BarrierValue,
    ShieldConfig,
    SingularityError,
    assemble,
    barrier_values,
    h_obstacle,
    h_pursuer,
)
from .world import WorldState

REACHED = "reached-target"
CAPTURED = "captured"
COLLIDED = "collided"
TIMEOUT = "timeout"
OUTCOMES = (REACHED, CAPTURED, COLLIDED, TIMEOUT)

MAX_TARGET_RETRIES = 1000


class EpisodeError(RuntimeError):
    pass


@dataclass(frozen=True)
class EpisodeConfig:
    dt: float = 0.05
    max_steps: int = 1500
    or_init: tuple[float, float] = (0.0, 0.0)
    ddr_init: tuple[float, float, float] = (1.0, -0.5, 0.0)  # theta in rad
    obstacles_init: tuple[tuple[float, float, float, float], ...] = ((1.5, 0.0, 0.02, 0.0),)
    target: tuple[float, float] | None = None
    target_region: tuple[float, float, float, float] = (0.0, 3.0, -1.5, 1.5)  # xmin, xmax, ymin, ymax
    d_t: float = 0.05
    seed: int = 0
    shield: bool = True

    def __post_init__(self) -> None:
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        if self.max_steps < 1:
            raise ValueError(f"max_steps must be >= 1, got {self.max_steps!r}")
        xmin, xmax, ymin, ymax = self.target_region
        if xmin > xmax or ymin > ymax:
            raise ValueError(f"target_region is inverted: {self.target_region!r}")
        if self.d_t < 0:
            raise ValueError("d_t must be non-negative")
        object.__setattr__(self, "obstacles_init", tuple(tuple(o) for o in self.obstacles_init))


@dataclass
class EpisodeRecord:
    """Per-step trajectory of one episode plus its outcome.

    Row 0 is the initial state; it carries no action, margin or reward.
    """

    n_obstacles: int
    rows: list[dict] = field(default_factory=list)
    outcome: str | None = None
    infeasible_steps: int = 0
    target: tuple[float, float] | None = None
    seed: int | None = None

    @property
    def columns(self) -> list[str]:
        return csv_columns(self.n_obstacles)

    @property
    def safe(self) -> bool:
        return all(_row_min_h(r, self.n_obstacles) >= 0.0 for r in self.rows)

    @property
    def total_reward(self) -> float:
        return float(sum(r["reward"] for r in self.rows))

    @property
    def corrected_steps(self) -> int:
        return sum(1 for r in self.rows if r["corrected"])

    @property
    def min_h_pv(self) -> float:
        return min(r["h_pv"] for r in self.rows)

    def min_h_oc(self, i: int = 0) -> float:
        return min(r[f"h_oc_{i}"] for r in self.rows)

    @property
    def deviations(self) -> list[float]:
        return [r["deviation"] for r in self.rows[1:] if r["corrected"]]

    def write_csv(self, path) -> None:
        cols = self.columns
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(cols)
            for r in self.rows:
                writer.writerow([_fmt(r[c]) for c in cols])


def csv_columns(n_obstacles: int) -> list[str]:
    """Trajectory CSV column order."""
    cols = ["time", "x_o", "y_o", "x_d", "y_d", "theta_d"]
    for i in range(n_obstacles):
        cols += [f"x_c_{i}", f"y_c_{i}"]
    cols += ["nominal_theta", "safe_theta", "corrected", "h_pv"]
    cols += [f"h_oc_{i}" for i in range(n_obstacles)]
    cols += ["margin", "reward", "feasible"]
    return cols


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _row_min_h(row: dict, n_obstacles: int) -> float:
    return min([row["h_pv"]] + [row[f"h_oc_{i}"] for i in range(n_obstacles)])


def sample_target(cfg: EpisodeConfig, rng: np.random.Generator, shield_cfg: ShieldConfig) -> tuple[float, float]:
    """Uniform draw from the target box, rejecting draws inside a safety radius."""
    if cfg.target is not None:
        return (float(cfg.target[0]), float(cfg.target[1]))
    xmin, xmax, ymin, ymax = cfg.target_region
    blockers = [(cfg.ddr_init[0], cfg.ddr_init[1], shield_cfg.d_pv)]
    blockers += [(o[0], o[1], shield_cfg.d_oc) for o in cfg.obstacles_init]
    for _ in range(MAX_TARGET_RETRIES):
        x = float(rng.uniform(xmin, xmax)) if xmax > xmin else float(xmin)
        y = float(rng.uniform(ymin, ymax)) if ymax > ymin else float(ymin)
        if all(math.hypot(x - bx, y - by) > r for bx, by, r in blockers):
            return (x, y)
    raise EpisodeError(f"no admissible target in region {cfg.target_region!r} after {MAX_TARGET_RETRIES} draws")


class Environment:
    """Pursuit-evasion world with an optional barrier shield on the evader."""

    def __init__(
        self,
        cfg: EpisodeConfig = EpisodeConfig(),
        shield_cfg: ShieldConfig = ShieldConfig(),
        or_params: OrParams = OrParams(),
        ddr_params: DdrParams = DdrParams(),
        pursuit_cfg: PursuitConfig = PursuitConfig(),
    ):
        self.cfg = cfg
        self.shield_cfg = shield_cfg
        self.or_params = or_params
        self.ddr_params = ddr_params
        self.pursuit_cfg = pursuit_cfg
        self.rng = np.random.default_rng(cfg.seed)
        self.world: WorldState | None = None
        self.record: EpisodeRecord | None = None
        self.done = True

    def reset(self, seed: int | None = None) -> WorldState:
        """Start a new episode.

        Passing ``seed`` reseeds the target sampler; otherwise successive
        resets continue the stream seeded by ``cfg.seed``.
        """
        if seed is not None:
            self.rng = np.random.default_rng(seed)
        cfg = self.cfg
        target = sample_target(cfg, self.rng, self.shield_cfg)
        self.world = WorldState(
            OrState(*map(float, cfg.or_init)),
            DdrState(*map(float, cfg.ddr_init)),
            tuple(ObstacleState(*map(float, o)) for o in cfg.obstacles_init),
            target,
        )
        self.record = EpisodeRecord(len(cfg.obstacles_init), target=target, seed=seed)
        self.record.rows.append(self._row(self.world, None, None, 0.0))
        self.done = False
        return self.world

    def _row(self, world: WorldState, nominal: EvaderAction | None, result: FilterResult | None, r: float) -> dict:
        row = {
            "time": world.t,
            "x_o": world.or_state.x_o,
            "y_o": world.or_state.y_o,
            "x_d": world.ddr_state.x_d,
            "y_d": world.ddr_state.y_d,
            "theta_d": world.ddr_state.theta_d,
        }
        for i, obs in enumerate(world.obstacles):
            row[f"x_c_{i}"] = obs.x_c
            row[f"y_c_{i}"] = obs.y_c
        row["nominal_theta"] = nominal.theta_o if nominal is not None else math.nan
        row["safe_theta"] = result.safe_action.theta_o if result is not None else math.nan
        row["corrected"] = bool(result.corrected) if result is not None else False
        row["deviation"] = result.deviation if result is not None else 0.0
        for v in _safe_barrier_values(world, self.shield_cfg):
            row["h_pv" if v.index is None else f"h_oc_{v.index}"] = v.h
        row["margin"] = result.margin if result is not None else math.nan
        row["reward"] = r
        row["feasible"] = bool(result.feasible) if result is not None else True
        return row

    def filter(self, world: WorldState, nominal: EvaderAction, pursuer_speed: float | None = None) -> FilterResult:
        """Shielded action for ``nominal`` in ``world`` (identity when the shield is off)."""
        constraints = assemble(world, self.shield_cfg, self.ddr_params, pursuer_speed)
        if self.cfg.shield:
            return filter_action(nominal, constraints, self.or_params.v_o)
        u = nominal.velocity(self.or_params.v_o)
        margin = min(c.value(u) for c in constraints)
        return FilterResult(nominal, False, 0.0, True, margin)

    def step(self, nominal: EvaderAction) -> tuple[WorldState, float, dict, bool]:
        if self.done or self.world is None:
            raise EpisodeError("step() called on a finished episode; call reset()")
        w = self.world
        dt = self.cfg.dt
        try:
            result = self.filter(w, nominal)
        except SingularityError:
            # coincident bodies: already unsafe, execute the nominal action
            result = FilterResult(nominal, False, 0.0, False, -math.inf)
        if not result.feasible:
            self.record.infeasible_steps += 1
        command = pursue(w.ddr_state, self.ddr_params, w.or_state, self.pursuit_cfg)

        new = WorldState(
            step_or(w.or_state, self.or_params, result.safe_action, dt),
            step_ddr(w.ddr_state, self.ddr_params, command, dt),
            tuple(step_obstacle(o, dt) for o in w.obstacles),
            w.target,
            (w.step_index + 1) * dt,
            w.step_index + 1,
        )
        r = reward(new, new.target, self.cfg.d_t)
        row = self._row(new, nominal, result, r)
        self.record.rows.append(row)
        self.world = new

        outcome = self._termination(new, row)
        if outcome is not None:
            self.record.outcome = outcome
            self.done = True
        return new, r, row, self.done

    def _termination(self, world: WorldState, row: dict) -> str | None:
        if row["h_pv"] < 0.0:
            return CAPTURED
        if any(row[f"h_oc_{i}"] < 0.0 for i in range(len(world.obstacles))):
            return COLLIDED
        if world.target_distance <= self.cfg.d_t:
            return REACHED
        if world.step_index >= self.cfg.max_steps:
            return TIMEOUT
        return None


def _safe_barrier_values(world: WorldState, cfg: ShieldConfig):
    try:
        return barrier_values(world, cfg)
    except SingularityError:
        # coincident positions: report full penetration for the offending pair
        out = []
        for i, obs in enumerate(world.obstacles):
            try:
                out.append(h_obstacle(world.or_state, obs, cfg, i))
            except SingularityError:
                out.append(BarrierValue(-cfg.d_oc, OBSTACLE, i))
        try:
            out.append(h_pursuer(world.or_state, world.ddr_state, cfg))
        except SingularityError:
            out.append(BarrierValue(-cfg.d_pv, PURSUER, None))
        return out


def run_episode(env: Environment, policy, seed: int | None = None) -> EpisodeRecord:
    """Roll out ``policy(world) -> EvaderAction`` until termination."""
    world = env.reset(seed)
    done = False
    while not done:
        world, _, _, done = env.step(policy(world))
    return env.record
