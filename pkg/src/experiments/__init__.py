"""Experiment configuration, Monte-Carlo orchestration, figure data and the CLI."""

from .config import FIGURE_IDS, FIGURE_PRESETS, ExperimentConfig
from .monte_carlo import MonteCarloResult, monte_carlo, run_trials, trial_seed
from .export import DatasetWriter, config_hash, write_dataset
from .figures import (
    FigureResult,
    code_game_dataset,
    ee_dataset_trial,
    ee_game_dataset,
    ee_trial,
    energy_efficiency_sweep,
    lsa_dataset,
    lsa_dataset_trial,
    lsa_trial,
    relative_utility_error,
    run_figure,
)

__all__ = [
    "FIGURE_IDS",
    "FIGURE_PRESETS",
    "ExperimentConfig",
    "MonteCarloResult",
    "monte_carlo",
    "run_trials",
    "trial_seed",
    "DatasetWriter",
    "config_hash",
    "write_dataset",
    "FigureResult",
    "code_game_dataset",
    "ee_dataset_trial",
    "ee_game_dataset",
    "ee_trial",
    "energy_efficiency_sweep",
    "lsa_dataset",
    "lsa_dataset_trial",
    "lsa_trial",
    "relative_utility_error",
    "run_figure",
]
