"""Training and evaluation loops that couple the learner to the environment."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .dynamics import EvaderAction
from .env import CAPTURED, COLLIDED, REACHED, Environment, EpisodeRecord, run_episode
from .learner import TD3Agent, heading_from_raw, observe, raw_from_heading

log = logging.getLogger(__name__)

# Reaching the target, capture and collision are absorbing; a timeout is a
# truncation and still bootstraps from the last state.
TERMINAL_OUTCOMES = (REACHED, CAPTURED, COLLIDED)

EPISODE_LOG_COLUMNS = (
    "episode",
    "steps",
    "train_return",
    "outcome",
    "safe",
    "infeasible_steps",
    "corrected_steps",
    "mean_deviation",
    "eval_return",
    "eval_outcome",
)


@dataclass
class EpisodeSummary:
    episode: int
    steps: int
    train_return: float
    outcome: str
    safe: bool
    infeasible_steps: int
    corrected_steps: int
    mean_deviation: float
    eval_return: float = math.nan
    eval_outcome: str = ""

    def as_row(self) -> list:
        return [getattr(self, c) for c in EPISODE_LOG_COLUMNS]


def policy_from_agent(agent: TD3Agent):
    """Deterministic heading policy ``world -> EvaderAction``."""

    def policy(world):
        return EvaderAction(heading_from_raw(agent.act(observe(world), deterministic=True), world))

    return policy


def evaluation_seed(base_seed: int, index: int) -> int:
    # offset keeps evaluation targets disjoint from the training stream
    return int(np.random.SeedSequence([base_seed, 7919, index]).generate_state(1)[0])


def run_training_episode(env: Environment, agent: TD3Agent, buffer, total_steps: int, seed: int):
    """Roll out one exploratory episode, updating the agent after every environment step.

    The policy picks a heading offset every ``action_repeat`` steps and holds
    it; the shield still filters every step. One transition is stored per
    decision, with the summed reward and the circular mean of the executed
    (shielded) offsets as its action.
    """
    cfg = agent.cfg
    world = env.reset(seed)
    obs = observe(world)
    done = False
    while not done:
        if total_steps < cfg.start_steps:
            raw = float(agent.rng.uniform(-1.0, 1.0))
        else:
            raw = agent.act(obs, deterministic=False)
        total_r = 0.0
        executed = []
        for _ in range(cfg.action_repeat):
            prev = world
            world, r, row, done = env.step(EvaderAction(heading_from_raw(raw, prev)))
            total_r += r
            executed.append(math.pi * raw_from_heading(row["safe_theta"], prev))
            total_steps += 1
            agent.update(buffer)
            if done:
                break
        next_obs = observe(world)
        terminal = done and env.record.outcome in TERMINAL_OUTCOMES
        # the executed (shielded) headings produced this transition, so they are what gets stored
        mean_offset = math.atan2(sum(math.sin(a) for a in executed), sum(math.cos(a) for a in executed))
        buffer.add(obs, mean_offset / math.pi, total_r, next_obs, terminal)
        obs = next_obs
    return env.record, total_steps


def summarize(index: int, rec: EpisodeRecord) -> EpisodeSummary:
    devs = rec.deviations
    return EpisodeSummary(
        episode=index,
        steps=len(rec.rows) - 1,
        train_return=rec.total_reward,
        outcome=rec.outcome,
        safe=rec.safe,
        infeasible_steps=rec.infeasible_steps,
        corrected_steps=rec.corrected_steps,
        mean_deviation=float(np.mean(devs)) if devs else 0.0,
    )


def train(
    env: Environment,
    agent: TD3Agent,
    episodes: int,
    seed: int,
    eval_env: Environment | None = None,
    on_episode=None,
) -> list[EpisodeSummary]:
    """Train ``agent`` for ``episodes`` episodes.

    ``on_episode(summary, record)`` is called after each episode, e.g. to
    write its trajectory. If ``eval_env`` is given, one deterministic
    evaluation episode follows every training episode.
    """
    buffer = agent.new_buffer()
    total_steps = 0
    summaries = []
    for ep in range(episodes):
        ep_seed = int(np.random.SeedSequence([seed, ep]).generate_state(1)[0])
        rec, total_steps = run_training_episode(env, agent, buffer, total_steps, ep_seed)
        summary = summarize(ep, rec)
        if eval_env is not None:
            ev = run_episode(eval_env, policy_from_agent(agent), evaluation_seed(seed, ep))
            summary.eval_return = ev.total_reward
            summary.eval_outcome = ev.outcome
        summaries.append(summary)
        log.info(
            "episode %d: %s in %d steps, return %.2f, safe=%s, eval %s",
            ep, summary.outcome, summary.steps, summary.train_return, summary.safe, summary.eval_outcome,
        )
        if on_episode is not None:
            on_episode(summary, rec)
    return summaries


def evaluate(env: Environment, policy, seeds) -> list[EpisodeRecord]:
    """Run ``policy`` once per seed and return the episode records."""
    return [run_episode(env, policy, s) for s in seeds]


def final_evaluation_seeds(base_seed: int, n: int) -> list[int]:
    """Seeds for post-training evaluation, disjoint from the per-episode checks."""
    return [int(np.random.SeedSequence([base_seed, 104729, i]).generate_state(1)[0]) for i in range(n)]
