"""Seeded Monte-Carlo orchestration over independent trials."""

import logging
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import Any, Callable, Dict, List, Optional

import pandas as pd
from pydantic import BaseModel, ConfigDict

from ..exceptions import InvalidInputError, TrialFailedError
from ..signal_model import derive_seed

logger = logging.getLogger(__name__)

TrialTask = Callable[[int], Dict[str, Any]]


class MonteCarloResult(BaseModel):
    """Per-metric mean/std over trials, optionally with the trial-level table."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    trials: int
    master_seed: int
    summary: pd.DataFrame
    trial_frame: Optional[pd.DataFrame] = None

    def mean(self, metric: str) -> float:
        return float(self.summary.loc[metric, "mean"])

    def std(self, metric: str) -> float:
        return float(self.summary.loc[metric, "std"])


def trial_seed(master_seed: int, trial_index: int) -> int:
    """Seed of one trial; depends only on the master seed and the trial index."""
    return derive_seed(master_seed, trial_index)


def _run_trial(task: TrialTask, master_seed: int, trial_index: int) -> Dict[str, Any]:
    seed = trial_seed(master_seed, trial_index)
    try:
        return dict(task(seed))
    except Exception as exc:
        raise TrialFailedError(f"trial failed: {exc}", trial_index, seed) from exc


def run_trials(task: TrialTask, trials: int, master_seed: int, workers: int = 1) -> List[Dict[str, Any]]:
    """
    Run ``task`` on the seeds of trials 0..trials-1 and return its results in trial order.

    Raises:
        InvalidInputError: If trials or workers is below 1
        TrialFailedError: If any trial raises (carries the trial's seed)
    """
    if trials < 1:
        raise InvalidInputError(f"trials must be >= 1, got {trials}")
    if workers < 1:
        raise InvalidInputError(f"workers must be >= 1, got {workers}")

    runner = partial(_run_trial, task, master_seed)
    logger.info("Monte-Carlo: %d trials on %d worker(s), master seed %d", trials, workers, master_seed)
    if workers == 1:
        return [runner(index) for index in range(trials)]
    chunksize = max(1, trials // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(runner, range(trials), chunksize=chunksize))


def monte_carlo(
    task: TrialTask,
    trials: int,
    master_seed: int,
    workers: int = 1,
    keep_trials: bool = False,
) -> MonteCarloResult:
    """
    Run ``task`` on independent seeds and aggregate its metrics.

    Results are collected in trial order, so the aggregates do not depend on
    the number of workers.

    Args:
        task: Picklable callable mapping a trial seed to a dict of metrics
        trials: Number of trials (>= 1)
        master_seed: Seed from which trial seeds are derived
        workers: Worker processes; 1 runs in-process
        keep_trials: Keep the trial-level table in the result

    Returns:
        MonteCarloResult with mean and std per metric

    Raises:
        TrialFailedError: If any trial raises (carries the trial's seed)
    """
    frame = pd.DataFrame(run_trials(task, trials, master_seed, workers))
    summary = frame.agg(["mean", "std"]).T
    return MonteCarloResult(
        trials=trials,
        master_seed=master_seed,
        summary=summary,
        trial_frame=frame if keep_trials else None,
    )
