"""Twin-delayed deep deterministic policy gradient, in numpy.

Two critics with a min-target, target-policy smoothing, delayed actor and
target updates. The actor emits one raw action in [-1, 1].
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass

import numpy as np

from .buffer import ReplayBuffer
from .nets import MLP, Adam
from .observation import OBS_DIM

CHECKPOINT_VERSION = 1


class CheckpointError(RuntimeError):
    pass


@dataclass(frozen=True)
class TD3Config:
    actor_lr: float = 3e-4
    critic_lr: float = 3e-4
    discount: float = 0.99
    batch_size: int = 256
    buffer_capacity: int = 1_000_000
    policy_noise: float = 0.2
    noise_clip: float = 0.5
    policy_delay: int = 2
    tau: float = 0.005
    exploration_noise: float = 0.1
    hidden: tuple[int, ...] = (256, 256)
    start_steps: int = 1000  # uniform-random actions before the actor takes over
    reward_scale: float = 1.0  # rewards are multiplied by this before entering the critic targets
    actor_warmup: int = 0  # critic-only updates before the actor starts following the critic
    action_repeat: int = 10  # environment steps per policy decision during training

    def __post_init__(self) -> None:
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))
        positive = ("actor_lr", "critic_lr", "batch_size", "buffer_capacity", "tau", "reward_scale")
        for name in positive:
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")
        if not 0 <= self.discount <= 1:
            raise ValueError(f"discount must lie in [0, 1], got {self.discount!r}")
        if self.policy_delay < 1:
            raise ValueError("policy_delay must be >= 1")
        if self.action_repeat < 1:
            raise ValueError("action_repeat must be >= 1")
        if min(self.policy_noise, self.noise_clip, self.exploration_noise, self.start_steps, self.actor_warmup) < 0:
            raise ValueError("noise scales, start_steps and actor_warmup must be non-negative")
        if not self.hidden or min(self.hidden) < 1:
            raise ValueError("hidden widths must be positive")

    def fingerprint(self, obs_dim: int = OBS_DIM) -> str:
        payload = json.dumps({"obs_dim": obs_dim, **dataclasses.asdict(self)}, sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


def critic_targets(reward, done, q1_next, q2_next, discount: float):
    """Clipped double-Q target ``r + discount * (1 - done) * min(Q1', Q2')``."""
    return reward + discount * (1.0 - done) * np.minimum(q1_next, q2_next)


class TD3Agent:
    """Actor, twin critics, their targets and optimisers.

    Only one training loop may mutate an agent; use :meth:`snapshot` for a
    frozen copy to evaluate elsewhere.
    """

    def __init__(self, cfg: TD3Config = TD3Config(), obs_dim: int = OBS_DIM, seed: int = 0, dtype=np.float32):
        self.cfg = cfg
        self.obs_dim = obs_dim
        self.dtype = np.dtype(dtype)
        self.rng = np.random.default_rng(seed)
        sizes_a = (obs_dim, *cfg.hidden, 1)
        sizes_c = (obs_dim + 1, *cfg.hidden, 1)
        self.actor = MLP(sizes_a, self.rng, out_tanh=True, dtype=dtype)
        self.critic1 = MLP(sizes_c, self.rng, dtype=dtype)
        self.critic2 = MLP(sizes_c, self.rng, dtype=dtype)
        self.actor_target = self.actor.copy()
        self.critic1_target = self.critic1.copy()
        self.critic2_target = self.critic2.copy()
        self.actor_opt = Adam(cfg.actor_lr)
        self.critic1_opt = Adam(cfg.critic_lr)
        self.critic2_opt = Adam(cfg.critic_lr)
        self.updates = 0

    def act(self, obs, deterministic: bool = True, rng: np.random.Generator | None = None) -> float:
        raw = float(self.actor(np.asarray(obs, self.dtype)[None, :])[0, 0])
        if not deterministic:
            rng = self.rng if rng is None else rng
            raw += self.cfg.exploration_noise * rng.standard_normal()
        return float(np.clip(raw, -1.0, 1.0))

    def new_buffer(self) -> ReplayBuffer:
        return ReplayBuffer(self.obs_dim, self.cfg.buffer_capacity, self.dtype)

    def _critic_step(self, critic: MLP, opt: Adam, sa, y) -> float:
        q, acts = critic.forward(sa, cache=True)
        err = q - y
        loss = float(np.mean(err * err))
        grads, _ = critic.backward(acts, 2.0 * err / len(y))
        opt.step(critic.params, grads)
        return loss

    def update(self, buffer: ReplayBuffer, step: int | None = None) -> dict:
        """One gradient step on both critics, and on the actor every ``policy_delay`` calls."""
        cfg = self.cfg
        if len(buffer) < cfg.batch_size:
            return {"skipped": True, "reason": f"buffer holds {len(buffer)} < batch_size {cfg.batch_size}"}
        step = self.updates if step is None else step
        s, a, r, s2, done = buffer.sample(cfg.batch_size, self.rng)

        noise = np.clip(cfg.policy_noise * self.rng.standard_normal(a.shape), -cfg.noise_clip, cfg.noise_clip)
        a2 = np.clip(self.actor_target(s2) + noise, -1.0, 1.0).astype(self.dtype)
        s2a2 = np.concatenate([s2, a2], axis=1)
        y = critic_targets(cfg.reward_scale * r, done, self.critic1_target(s2a2), self.critic2_target(s2a2), cfg.discount)

        sa = np.concatenate([s, a], axis=1)
        report = {
            "skipped": False,
            "critic1_loss": self._critic_step(self.critic1, self.critic1_opt, sa, y),
            "critic2_loss": self._critic_step(self.critic2, self.critic2_opt, sa, y),
        }

        if step % cfg.policy_delay == 0:
            if step >= cfg.actor_warmup:
                pi, a_acts = self.actor.forward(s, cache=True)
                q, c_acts = self.critic1.forward(np.concatenate([s, pi], axis=1), cache=True)
                report["actor_loss"] = float(-np.mean(q))
                _, d_input = self.critic1.backward(c_acts, np.full_like(q, -1.0 / len(q)))
                grads, _ = self.actor.backward(a_acts, d_input[:, self.obs_dim :])
                self.actor_opt.step(self.actor.params, grads)
            for target, net in (
                (self.actor_target, self.actor),
                (self.critic1_target, self.critic1),
                (self.critic2_target, self.critic2),
            ):
                target.soft_update_from(net, cfg.tau)
        self.updates += 1
        return report

    def snapshot(self) -> "TD3Agent":
        clone = TD3Agent.__new__(TD3Agent)
        clone.cfg, clone.obs_dim, clone.dtype = self.cfg, self.obs_dim, self.dtype
        clone.rng = np.random.default_rng(0)
        clone.actor = self.actor.copy()
        clone.actor_target = self.actor_target.copy()
        for name in ("critic1", "critic2", "critic1_target", "critic2_target"):
            setattr(clone, name, getattr(self, name).copy())
        clone.actor_opt = clone.critic1_opt = clone.critic2_opt = None
        clone.updates = self.updates
        return clone

    # -- persistence -------------------------------------------------------

    _NETS = ("actor", "critic1", "critic2", "actor_target", "critic1_target", "critic2_target")
    _OPTS = ("actor_opt", "critic1_opt", "critic2_opt")

    def save(self, path) -> None:
        arrays = {}
        for name in self._NETS:
            for i, p in enumerate(getattr(self, name).params):
                arrays[f"{name}/{i}"] = p
        meta = {
            "version": CHECKPOINT_VERSION,
            "config_hash": self.cfg.fingerprint(self.obs_dim),
            "config": dataclasses.asdict(self.cfg),
            "obs_dim": self.obs_dim,
            "dtype": self.dtype.name,
            "updates": self.updates,
            "opt_t": {},
        }
        for name in self._OPTS:
            opt = getattr(self, name)
            if opt is None:
                continue
            meta["opt_t"][name] = opt.t
            for i, (m, v) in enumerate(zip(opt.m, opt.v)):
                arrays[f"{name}/m/{i}"] = m
                arrays[f"{name}/v/{i}"] = v
        arrays["__meta__"] = np.frombuffer(json.dumps(meta, sort_keys=True).encode(), dtype=np.uint8)
        with open(path, "wb") as fh:
            np.savez(fh, **arrays)

    @classmethod
    def load(cls, path, cfg: TD3Config | None = None, obs_dim: int = OBS_DIM) -> "TD3Agent":
        """Restore an agent; if ``cfg`` is given its fingerprint must match the file."""
        with np.load(path) as data:
            meta = json.loads(bytes(data["__meta__"]).decode())
            if meta.get("version") != CHECKPOINT_VERSION:
                raise CheckpointError(f"unsupported checkpoint version {meta.get('version')!r}")
            stored = TD3Config(**meta["config"])
            if stored.fingerprint(meta["obs_dim"]) != meta["config_hash"]:
                raise CheckpointError("checkpoint metadata is internally inconsistent")
            if cfg is not None and cfg.fingerprint(obs_dim) != meta["config_hash"]:
                raise CheckpointError(
                    f"config hash mismatch: checkpoint {meta['config_hash']}, "
                    f"run config {cfg.fingerprint(obs_dim)}"
                )
            agent = cls(stored, meta["obs_dim"], dtype=np.dtype(meta["dtype"]))
            for name in cls._NETS:
                net = getattr(agent, name)
                net.params = [data[f"{name}/{i}"].copy() for i in range(len(net.params))]
            for name in cls._OPTS:
                if name not in meta["opt_t"]:
                    continue
                opt = getattr(agent, name)
                opt.t = meta["opt_t"][name]
                n = sum(1 for k in data.files if k.startswith(f"{name}/m/"))
                opt.m = [data[f"{name}/m/{i}"].copy() for i in range(n)]
                opt.v = [data[f"{name}/v/{i}"].copy() for i in range(n)]
            agent.updates = meta["updates"]
        return agent
