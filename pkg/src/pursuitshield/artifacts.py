"""Run-directory layout: writing training artifacts and reading them back for reports."""

from __future__ import annotations

import csv
import json
import math
import statistics
from collections import Counter
from pathlib import Path
from typing import Iterable, Sequence

from . import CODE_VERSION
from .env import COLLIDED, CAPTURED, REACHED, TIMEOUT, EpisodeRecord
from .training import EPISODE_LOG_COLUMNS, EpisodeSummary

CONFIG_FILE = "config.resolved.yaml"
REWARD_LOG = "reward_log.csv"
SUMMARY_FILE = "summary.json"
EPISODES_DIR = "episodes"
CHECKPOINTS_DIR = "checkpoints"
REQUIRED_FILES = (CONFIG_FILE, REWARD_LOG, SUMMARY_FILE)
OUTCOMES = (REACHED, CAPTURED, COLLIDED, TIMEOUT)


class ArtifactError(RuntimeError):
    """Run directory is missing files or holds unreadable ones."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("bad run directory:\n" + "\n".join(f"  - {p}" for p in self.problems))


def episode_csv_path(run_dir, index: int) -> Path:
    return Path(run_dir) / EPISODES_DIR / f"episode_{index:04d}.csv"


def checkpoint_path(run_dir, index: int | None = None) -> Path:
    name = "final.npz" if index is None else f"checkpoint_{index:04d}.npz"
    return Path(run_dir) / CHECKPOINTS_DIR / name


def _cell(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return "" if math.isnan(value) else repr(value)
    return str(value)


def write_reward_log(path, summaries: Iterable[EpisodeSummary]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(EPISODE_LOG_COLUMNS)
        for s in summaries:
            w.writerow([_cell(v) for v in s.as_row()])


def read_reward_log(path) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in ("episode", "train_return", "outcome", "safe") if c not in (reader.fieldnames or [])]
        if missing:
            raise ArtifactError([f"{path}: missing columns {missing}"])
        return list(reader)


def ratio_text(num: int, den: int) -> str:
    return "n/a" if den == 0 else f"{100.0 * num / den:g}%"


def _deviation_stats(deviations: Sequence[float]) -> dict:
    if not deviations:
        return {"mean_deviation_rad": 0.0, "median_deviation_rad": 0.0}
    return {
        "mean_deviation_rad": float(statistics.fmean(deviations)),
        "median_deviation_rad": float(statistics.median(deviations)),
    }


def training_summary(
    run_id: str,
    seed: int,
    config_hash: str,
    summaries: Sequence[EpisodeSummary],
    deviations: Sequence[float],
    evaluation: Sequence[EpisodeRecord] = (),
) -> dict:
    """Run-level summary; deterministic given its inputs (no timestamps)."""
    n = len(summaries)
    safe = sum(1 for s in summaries if s.safe)
    outcomes = Counter(s.outcome for s in summaries)
    out = {
        "run_id": run_id,
        "seed": seed,
        "config_hash": config_hash,
        "code_version": CODE_VERSION,
        "episodes": n,
        "safe_episodes": safe,
        "safety_ratio": safe / n if n else 0.0,
        "safety_ratio_text": ratio_text(safe, n),
        "outcomes": {k: outcomes.get(k, 0) for k in OUTCOMES},
        "reached_rate": outcomes.get(REACHED, 0) / n if n else 0.0,
        "infeasible_steps_total": sum(s.infeasible_steps for s in summaries),
        "episodes_with_infeasible_steps": sum(1 for s in summaries if s.infeasible_steps > 0),
        "corrected_steps_total": sum(s.corrected_steps for s in summaries),
        **_deviation_stats(deviations),
    }
    if evaluation:
        out["evaluation"] = evaluation_summary(evaluation)
    return out


def evaluation_summary(records: Sequence[EpisodeRecord]) -> dict:
    n = len(records)
    outcomes = Counter(r.outcome for r in records)
    hits = sum(1 for r in records if any(row["reward"] >= 1000.0 for row in r.rows[1:]))
    safe = sum(1 for r in records if r.safe)
    return {
        "episodes": n,
        "outcomes": {k: outcomes.get(k, 0) for k in OUTCOMES},
        "reached_rate": outcomes.get(REACHED, 0) / n if n else 0.0,
        "terminal_reward_rate": hits / n if n else 0.0,
        "safe_episodes": safe,
        "safety_ratio": safe / n if n else 0.0,
        "infeasible_steps_total": sum(r.infeasible_steps for r in records),
        "mean_return": float(statistics.fmean(r.total_reward for r in records)) if n else 0.0,
        **_deviation_stats([d for r in records for d in r.deviations]),
    }


def write_json(path, data: dict) -> None:
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def _float(text: str) -> float:
    return math.nan if text == "" else float(text)


def report(run_dir) -> dict:
    """Summarize a run directory; a pure function of the files in it."""
    run_dir = Path(run_dir)
    if not run_dir.is_dir():
        raise ArtifactError([f"{run_dir}: not a directory (expected {', '.join(REQUIRED_FILES)})"])
    missing = [f"{name}: missing" for name in REQUIRED_FILES if not (run_dir / name).is_file()]
    if missing:
        raise ArtifactError(missing + [f"expected files: {', '.join(REQUIRED_FILES)}"])
    try:
        rows = read_reward_log(run_dir / REWARD_LOG)
        summary = json.loads((run_dir / SUMMARY_FILE).read_text())
    except (OSError, ValueError, csv.Error) as exc:
        raise ArtifactError([str(exc)]) from exc
    n = len(rows)
    safe = sum(1 for r in rows if r["safe"] in ("1", "True", "true"))
    reached = sum(1 for r in rows if r["outcome"] == REACHED)
    out = {
        "episodes": n,
        "safe_episodes": safe,
        "safety_ratio": safe / n if n else 0.0,
        "safety_ratio_text": ratio_text(safe, n),
        "reached_rate": reached / n if n else 0.0,
        "mean_deviation_rad": summary.get("mean_deviation_rad"),
        "median_deviation_rad": summary.get("median_deviation_rad"),
        "infeasible_steps_total": sum(int(r.get("infeasible_steps") or 0) for r in rows),
        "reward_curve": {
            "train_return": [_float(r["train_return"]) for r in rows],
            "eval_return": [_float(r.get("eval_return", "")) for r in rows],
        },
    }
    if "evaluation" in summary:
        out["evaluation"] = summary["evaluation"]
    return out


def report_text(rep: dict) -> str:
    lines = [
        f"episodes:            {rep['episodes']}",
        f"safe episodes:       {rep['safe_episodes']}",
        f"safety ratio:        {rep['safety_ratio_text']}",
        f"reached-target rate: {100.0 * rep['reached_rate']:.1f}%",
        f"infeasible steps:    {rep['infeasible_steps_total']}",
    ]
    if rep["mean_deviation_rad"] is not None:
        lines.append(
            f"shield deviation:    mean {rep['mean_deviation_rad']:.4f} rad, median {rep['median_deviation_rad']:.4f} rad"
        )
    if "evaluation" in rep:
        ev = rep["evaluation"]
        lines.append(f"evaluation:          {ev['episodes']} episodes, reached {100.0 * ev['reached_rate']:.1f}%")
    return "\n".join(lines)
