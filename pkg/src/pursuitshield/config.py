"""Run configuration: one YAML file with units spelled out in the key names.

Every section is optional; missing keys take the defaults below, which are
the experiment parameters of the reference setup scaled to a desk-size run.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .dynamics import DdrParams, DynamicsError, OrParams
from .env import EpisodeConfig
from .learner import TD3Config
from .pursuit import PURSUIT_MODES, PursuitConfig
from .shield import ShieldConfig


class ConfigError(ValueError):
    """Invalid configuration; ``problems`` lists every issue found."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("invalid configuration:\n" + "\n".join(f"  - {p}" for p in self.problems))


DEFAULTS: dict = {
    "run": {
        "run_id": "desk",
        "output_dir": "runs/desk",
        "seed": 0,
        "episodes": 150,
        "eval_episodes": 50,
        "checkpoint_every": 25,
        "eval_during_training": True,
        "write_episode_csv": True,
    },
    "episode": {
        "dt_s": 0.05,
        "max_steps": 1500,
        "or_init_m": [0.0, 0.0],
        "ddr_init": {"x_m": 1.0, "y_m": -0.5, "theta_deg": 0.0},
        "obstacles": [{"x_m": 1.5, "y_m": 0.0, "v_x_m_per_s": 0.02, "v_y_m_per_s": 0.0}],
        "target_m": None,
        "target_region_m": {"x_min": 0.0, "x_max": 3.0, "y_min": -1.5, "y_max": 1.5},
        "d_t_m": 0.05,
        "shield": True,
    },
    "robots": {
        "v_o_m_per_s": 0.1574,
        "v_d_m_per_s": 0.2,
        "b_m": 0.8,
        "u_max_wheel_m_per_s": 0.4,
    },
    "shield": {"gamma_oc": 1.0, "gamma_pv": 1.2, "d_oc_m": 0.2, "d_pv_m": 0.2},
    "pursuit": {"mode": "turn-then-chase", "angle_tolerance_rad": 0.05, "angular_gain": 2.0},
    "td3": {
        "actor_lr": 3e-4,
        "critic_lr": 3e-4,
        "discount": 0.99,
        "batch_size": 256,
        "buffer_capacity": 1_000_000,
        "policy_noise": 0.2,
        "noise_clip": 0.5,
        "policy_delay": 2,
        "tau": 0.005,
        "exploration_noise": 0.1,
        "hidden": [256, 256],
        "start_steps": 1000,
        "reward_scale": 1.0,
        "actor_warmup": 0,
        "action_repeat": 10,
    },
}

_INT_KEYS = {
    ("run", "seed"), ("run", "episodes"), ("run", "eval_episodes"), ("run", "checkpoint_every"),
    ("episode", "max_steps"), ("td3", "batch_size"), ("td3", "buffer_capacity"), ("td3", "policy_delay"),
    ("td3", "start_steps"), ("td3", "actor_warmup"), ("td3", "action_repeat"),
}
_BOOL_KEYS = {("run", "eval_during_training"), ("run", "write_episode_csv"), ("episode", "shield")}
_STR_KEYS = {("run", "run_id"), ("run", "output_dir"), ("pursuit", "mode")}


@dataclass(frozen=True)
class RunSection:
    run_id: str
    output_dir: str
    seed: int
    episodes: int
    eval_episodes: int
    checkpoint_every: int
    eval_during_training: bool
    write_episode_csv: bool


@dataclass(frozen=True)
class RunConfig:
    run: RunSection
    episode: EpisodeConfig
    shield: ShieldConfig
    or_params: OrParams
    ddr_params: DdrParams
    pursuit: PursuitConfig
    td3: TD3Config
    raw: dict = field(repr=False, compare=False, default_factory=dict)

    def resolved(self) -> dict:
        """Fully expanded settings in file schema."""
        return json.loads(json.dumps(self.raw))

    def fingerprint(self) -> str:
        """Hash of every setting that can change results; the output location is excluded."""
        raw = self.resolved()
        del raw["run"]["output_dir"]
        return hashlib.sha256(json.dumps(raw, sort_keys=True).encode()).hexdigest()[:16]

    def with_overrides(self, seed: int | None = None, output_dir: str | None = None) -> "RunConfig":
        raw = self.resolved()
        if seed is not None:
            raw["run"]["seed"] = int(seed)
        if output_dir is not None:
            raw["run"]["output_dir"] = str(output_dir)
        return from_dict(raw)


def _merge(defaults: dict, given: dict, path: str, problems: list[str]) -> dict:
    out = {}
    for key, default in defaults.items():
        out[key] = default
    for key, value in given.items():
        where = f"{path}.{key}" if path else key
        if key not in defaults:
            problems.append(f"{where}: unknown key")
            continue
        default = defaults[key]
        if isinstance(default, dict) and key not in ("ddr_init", "target_region_m"):
            if not isinstance(value, dict):
                problems.append(f"{where}: expected a mapping")
                continue
            out[key] = _merge(default, value, where, problems)
        elif isinstance(default, dict):
            if not isinstance(value, dict):
                problems.append(f"{where}: expected a mapping")
                continue
            unknown = set(value) - set(default)
            missing = set(default) - set(value)
            problems.extend(f"{where}.{k}: unknown key" for k in sorted(unknown))
            problems.extend(f"{where}.{k}: missing" for k in sorted(missing))
            out[key] = {**default, **{k: v for k, v in value.items() if k in default}}
        else:
            out[key] = value
    return out


def _number(value, where: str, problems: list[str]) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        problems.append(f"{where}: expected a number, got {value!r}")
        return math.nan
    if not math.isfinite(value):
        problems.append(f"{where}: must be finite")
    return float(value)


def _check_types(raw: dict, problems: list[str]) -> None:
    for section, values in raw.items():
        for key, value in values.items():
            where = f"{section}.{key}"
            k = (section, key)
            if k in _INT_KEYS:
                if isinstance(value, bool) or not isinstance(value, int):
                    problems.append(f"{where}: expected an integer, got {value!r}")
            elif k in _BOOL_KEYS:
                if not isinstance(value, bool):
                    problems.append(f"{where}: expected true/false, got {value!r}")
            elif k in _STR_KEYS:
                if not isinstance(value, str):
                    problems.append(f"{where}: expected a string, got {value!r}")
            elif key in ("or_init_m", "hidden"):
                if not isinstance(value, list) or not value:
                    problems.append(f"{where}: expected a non-empty list")
            elif key == "target_m":
                if value is not None and not (isinstance(value, list) and len(value) == 2):
                    problems.append(f"{where}: expected null or [x, y]")
            elif key == "obstacles":
                if not isinstance(value, list):
                    problems.append(f"{where}: expected a list")
            elif key in ("ddr_init", "target_region_m"):
                for sub, v in value.items():
                    _number(v, f"{where}.{sub}", problems)
            else:
                _number(value, where, problems)


def _build(raw: dict, problems: list[str]) -> RunConfig | None:
    run, ep, rb, sh, pu, td = (raw[k] for k in ("run", "episode", "robots", "shield", "pursuit", "td3"))
    built = {}

    def attempt(name, fn):
        try:
            built[name] = fn()
        except (ValueError, TypeError, DynamicsError) as exc:
            problems.append(f"{name}: {exc}")

    if run["episodes"] < 1:
        problems.append("run.episodes: must be >= 1")
    if run["eval_episodes"] < 0:
        problems.append("run.eval_episodes: must be >= 0")
    if run["checkpoint_every"] < 0:
        problems.append("run.checkpoint_every: must be >= 0")

    obstacles = []
    for i, o in enumerate(ep["obstacles"]):
        keys = ("x_m", "y_m", "v_x_m_per_s", "v_y_m_per_s")
        if not isinstance(o, dict) or set(o) != set(keys):
            problems.append(f"episode.obstacles[{i}]: expected keys {list(keys)}")
            continue
        obstacles.append(tuple(_number(o[k], f"episode.obstacles[{i}].{k}", problems) for k in keys))
    if len(ep["or_init_m"]) != 2:
        problems.append("episode.or_init_m: expected [x, y]")
    tr = ep["target_region_m"]
    di = ep["ddr_init"]

    attempt(
        "episode",
        lambda: EpisodeConfig(
            dt=float(ep["dt_s"]),
            max_steps=int(ep["max_steps"]),
            or_init=tuple(float(v) for v in ep["or_init_m"]),
            ddr_init=(float(di["x_m"]), float(di["y_m"]), math.radians(float(di["theta_deg"]))),
            obstacles_init=tuple(obstacles),
            target=None if ep["target_m"] is None else tuple(float(v) for v in ep["target_m"]),
            target_region=(float(tr["x_min"]), float(tr["x_max"]), float(tr["y_min"]), float(tr["y_max"])),
            d_t=float(ep["d_t_m"]),
            seed=int(run["seed"]),
            shield=bool(ep["shield"]),
        ),
    )
    attempt("robots.or", lambda: OrParams(float(rb["v_o_m_per_s"])))
    attempt(
        "robots.ddr",
        lambda: DdrParams(float(rb["v_d_m_per_s"]), float(rb["b_m"]), float(rb["u_max_wheel_m_per_s"])),
    )
    if "robots.ddr" in built and built["robots.ddr"].u_max_wheel < built["robots.ddr"].v_d:
        problems.append("robots.u_max_wheel_m_per_s: must be >= v_d_m_per_s so cruise speed is reachable")
    attempt(
        "shield",
        lambda: ShieldConfig(float(sh["gamma_oc"]), float(sh["gamma_pv"]), float(sh["d_oc_m"]), float(sh["d_pv_m"])),
    )
    if pu["mode"] not in PURSUIT_MODES:
        problems.append(f"pursuit.mode: must be one of {list(PURSUIT_MODES)}, got {pu['mode']!r}")
    else:
        attempt(
            "pursuit",
            lambda: PursuitConfig(pu["mode"], float(pu["angle_tolerance_rad"]), float(pu["angular_gain"])),
        )
    attempt("td3", lambda: TD3Config(**{**td, "hidden": tuple(td["hidden"])}))
    if problems:
        return None
    return RunConfig(
        RunSection(**run),
        built["episode"],
        built["shield"],
        built["robots.or"],
        built["robots.ddr"],
        built["pursuit"],
        built["td3"],
        raw,
    )


def from_dict(data: dict | None) -> RunConfig:
    problems: list[str] = []
    data = {} if data is None else data
    if not isinstance(data, dict):
        raise ConfigError(["top level: expected a mapping"])
    raw = _merge(DEFAULTS, data, "", problems)
    _check_types(raw, problems)
    cfg = None if problems else _build(raw, problems)
    if problems:
        raise ConfigError(problems)
    return cfg


def load(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError([f"{path}: cannot read ({exc.strerror})"]) from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError([f"{path}: not valid YAML ({exc})"]) from exc
    return from_dict(data)


def dump(cfg: RunConfig, path) -> None:
    Path(path).write_text(yaml.safe_dump(cfg.resolved(), sort_keys=False))
