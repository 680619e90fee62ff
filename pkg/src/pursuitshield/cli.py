"""Command-line entry point: train, simulate, evaluate, report."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import CODE_VERSION, artifacts
from .config import ConfigError, RunConfig, dump, from_dict, load
from .env import EpisodeError, Environment, run_episode
from .learner import OBS_DIM, CheckpointError, TD3Agent
from .policies import BUILTIN_POLICIES, builtin_policy
from .training import evaluate, final_evaluation_seeds, policy_from_agent, train

log = logging.getLogger("pursuitshield")

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_RUNTIME = 2


def _load_config(args) -> RunConfig:
    cfg = load(args.config) if args.config else from_dict({})
    cfg = cfg.with_overrides(seed=args.seed, output_dir=args.out)
    if getattr(args, "no_shield", False):
        raw = cfg.resolved()
        raw["episode"]["shield"] = False
        cfg = from_dict(raw)
    return cfg


def _env(cfg: RunConfig, episode=None) -> Environment:
    return Environment(episode or cfg.episode, cfg.shield, cfg.or_params, cfg.ddr_params, cfg.pursuit)


def _policy(cfg: RunConfig, args, seed: int):
    if args.checkpoint:
        agent = TD3Agent.load(args.checkpoint, cfg=cfg.td3, obs_dim=OBS_DIM)
        return policy_from_agent(agent)
    return builtin_policy(args.policy, seed)


def cmd_train(args) -> int:
    cfg = _load_config(args)
    run = cfg.run
    out = Path(run.output_dir)
    (out / artifacts.CHECKPOINTS_DIR).mkdir(parents=True, exist_ok=True)
    if run.write_episode_csv:
        (out / artifacts.EPISODES_DIR).mkdir(exist_ok=True)
    dump(cfg, out / artifacts.CONFIG_FILE)

    env = _env(cfg)
    eval_env = _env(cfg) if run.eval_during_training else None
    agent = TD3Agent(cfg.td3, OBS_DIM, seed=run.seed)
    deviations: list[float] = []

    def on_episode(summary, record):
        deviations.extend(record.deviations)
        if run.write_episode_csv:
            record.write_csv(artifacts.episode_csv_path(out, summary.episode))
        if run.checkpoint_every and (summary.episode + 1) % run.checkpoint_every == 0:
            agent.save(artifacts.checkpoint_path(out, summary.episode + 1))

    summaries = train(env, agent, run.episodes, run.seed, eval_env=eval_env, on_episode=on_episode)
    agent.save(artifacts.checkpoint_path(out))
    records = evaluate(_env(cfg), policy_from_agent(agent), final_evaluation_seeds(run.seed, run.eval_episodes))
    artifacts.write_reward_log(out / artifacts.REWARD_LOG, summaries)
    summary = artifacts.training_summary(
        run.run_id, run.seed, cfg.fingerprint(), summaries, deviations, records
    )
    artifacts.write_json(out / artifacts.SUMMARY_FILE, summary)
    print(artifacts.report_text(artifacts.report(out)))
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    out = Path(cfg.run.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    policy = _policy(cfg, args, cfg.run.seed)
    rec = run_episode(_env(cfg), policy, cfg.run.seed)
    rec.write_csv(out / "trajectory.csv")
    result = {
        "code_version": CODE_VERSION,
        "config_hash": cfg.fingerprint(),
        "seed": cfg.run.seed,
        "policy": args.checkpoint or args.policy,
        "shield": cfg.episode.shield,
        "target_m": list(rec.target),
        "outcome": rec.outcome,
        "safe": rec.safe,
        "steps": len(rec.rows) - 1,
        "total_reward": rec.total_reward,
        "corrected_steps": rec.corrected_steps,
        "infeasible_steps": rec.infeasible_steps,
        "min_h_pv_m": rec.min_h_pv,
        "min_h_oc_m": [rec.min_h_oc(i) for i in range(rec.n_obstacles)],
    }
    artifacts.write_json(out / "simulation.json", result)
    print(json.dumps(result, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_evaluate(args) -> int:
    cfg = _load_config(args)
    out = Path(cfg.run.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    n = args.episodes if args.episodes is not None else cfg.run.eval_episodes
    seeds = final_evaluation_seeds(cfg.run.seed, n)
    if args.checkpoint:
        policy = _policy(cfg, args, cfg.run.seed)
        records = evaluate(_env(cfg), policy, seeds)
    else:
        # random policies get a fresh stream per episode
        env = _env(cfg)
        records = [run_episode(env, builtin_policy(args.policy, s), s) for s in seeds]
    result = {
        "code_version": CODE_VERSION,
        "config_hash": cfg.fingerprint(),
        "seed": cfg.run.seed,
        "policy": args.checkpoint or args.policy,
        "shield": cfg.episode.shield,
        **artifacts.evaluation_summary(records),
    }
    artifacts.write_json(out / "evaluation.json", result)
    print(json.dumps(result, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_report(args) -> int:
    rep = artifacts.report(args.run_dir)
    print(json.dumps(rep, indent=2, sort_keys=True) if args.json else artifacts.report_text(rep))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pursuitshield", description=__doc__)
    parser.add_argument("--version", action="version", version=CODE_VERSION)
    parser.add_argument("-v", "--verbose", action="store_true", help="log per-episode progress")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, policy: bool):
        p.add_argument("--config", help="YAML run configuration (defaults apply when omitted)")
        p.add_argument("--seed", type=int, help="override run.seed")
        p.add_argument("--out", help="override run.output_dir")
        if policy:
            g = p.add_mutually_exclusive_group()
            g.add_argument("--checkpoint", help="trained policy checkpoint (.npz)")
            g.add_argument("--policy", choices=BUILTIN_POLICIES, default="straight-to-target")
            p.add_argument("--no-shield", action="store_true", help="disable the safety filter")

    p = sub.add_parser("train", help="train the evader and write a run directory")
    common(p, policy=False)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("simulate", help="one seeded rollout written as a trajectory CSV")
    common(p, policy=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("evaluate", help="seeded evaluation episodes for a policy")
    common(p, policy=True)
    p.add_argument("--episodes", type=int, help="override run.eval_episodes")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", help="summarize a training run directory")
    p.add_argument("run_dir")
    p.add_argument("--json", action="store_true", help="emit JSON instead of text")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (ConfigError, CheckpointError, artifacts.ArtifactError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (EpisodeError, OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
