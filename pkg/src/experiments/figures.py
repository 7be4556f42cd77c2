"""Figure-data regeneration and the per-command dataset builders."""

import logging
from functools import partial
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict

from ..code_game import run_to_fixed_point
from ..exceptions import CdmaGameError, InfeasibleLoadError, InvalidInputError, RootBracketError
from ..lsa import LsaInput, lsa_power_improved, lsa_power_plain
from ..power_game import GameSchedule, GameVariant, UtilityConfig, run_ee_game, solve_target_sinr
from ..signal_model import (
    ScenarioConfig,
    derive_seed,
    generate_codes,
    generate_scenario,
    received_power_scenario,
)
from .config import FIGURE_IDS, OVERSIZED_POWERS, TWSC_TARGETS, ExperimentConfig
from .monte_carlo import monte_carlo, run_trials

logger = logging.getLogger(__name__)

EE_METRICS = ("utility", "power", "sinr_db", "at_max", "converged")

# figure -> (metric, output column prefix)
EE_FIGURE_METRICS = {
    "fig4": ("utility", "utility_bpJ"),
    "fig5": ("power", "power_W"),
    "fig6": ("sinr_db", "sinr_dB"),
    "fig7": ("at_max", "fraction_at_max"),
}


class FigureResult(BaseModel):
    """A figure id and its dataset."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    figure: str
    frame: pd.DataFrame


def _with_users(config: ScenarioConfig, K: int) -> ScenarioConfig:
    return config.model_copy(update={"K": K})


def _code_game_traces(config: ExperimentConfig) -> pd.DataFrame:
    """Trace both code iterations on random-power setups rescaled to the tr(A^2) targets."""
    N = config.scenario.N
    schedule = config.code_schedule.model_copy(update={"record_trace": True})
    rows = []
    for K in config.user_counts:
        rng = np.random.default_rng(derive_seed(config.master_seed, K))
        a_sq = rng.uniform(0.5, 1.5, size=K)
        target = TWSC_TARGETS.get(K)
        if target is not None:
            a_sq *= np.sqrt(target / np.sum(a_sq ** 2))
        bound = float(np.sum(a_sq ** 2) / 4.0)
        scenario = received_power_scenario(a_sq, N, config.code_noise_psd, seed=derive_seed(config.master_seed, K, 1))
        codes = generate_codes(N, K, "binary", seed=derive_seed(config.master_seed, K, 2))
        for variant in ("linear", "wl"):
            report = run_to_fixed_point(scenario, codes, schedule, variant)
            for point in report.trace:
                rows.append({
                    "K": K,
                    "variant": variant,
                    "sweep": point.sweep,
                    "gram_min": point.gram_min,
                    "gram_max": point.gram_max,
                    "wl_twsc": point.wl_twsc,
                    "twsc": point.twsc,
                    "bound": bound,
                    "metric_d": point.metric_d,
                })
    return pd.DataFrame(rows)


def figure_orthonormality(config: ExperimentConfig) -> FigureResult:
    """Smallest and largest Gram eigenvalue per sweep for both variants."""
    frame = _code_game_traces(config)
    return FigureResult(figure="fig1", frame=frame[["K", "variant", "sweep", "gram_min", "gram_max"]])


def figure_twsc(config: ExperimentConfig) -> FigureResult:
    """WL-TWSC, TWSC and the tr(A^2)/4 bound per sweep."""
    frame = _code_game_traces(config)
    return FigureResult(figure="fig2", frame=frame[["K", "variant", "sweep", "wl_twsc", "twsc", "bound"]])


def figure_oversized(config: ExperimentConfig) -> FigureResult:
    """Per-sweep eigenvalues of S_a A S_a^H for the oversized-user example."""
    N = config.scenario.N
    a_sq = np.asarray(OVERSIZED_POWERS)
    scenario = received_power_scenario(a_sq, N, config.code_noise_psd, seed=derive_seed(config.master_seed, 1))
    codes = generate_codes(N, a_sq.size, "binary", seed=derive_seed(config.master_seed, 2))
    schedule = config.code_schedule.model_copy(update={"record_trace": True})
    report = run_to_fixed_point(scenario, codes, schedule, "wl")
    rows = [
        {"sweep": point.sweep, **{f"eig_{i + 1}": value for i, value in enumerate(point.eigenvalues)}}
        for point in report.trace
    ]
    return FigureResult(figure="fig3", frame=pd.DataFrame(rows))


def ee_trial(
    seed: int,
    scenario_config: ScenarioConfig,
    variants: List[GameVariant],
    utility_config: UtilityConfig,
    schedule: GameSchedule,
    code_kind: str,
) -> Dict[str, float]:
    """One random scenario played under every requested game variant."""
    scenario = generate_scenario(scenario_config, derive_seed(seed, 0))
    codes = generate_codes(scenario.N, scenario.K, code_kind, seed=derive_seed(seed, 1))
    metrics: Dict[str, float] = {}
    for variant in variants:
        outcome = run_ee_game(scenario, codes, variant, utility_config, schedule)
        metrics[f"{variant.value}|utility"] = outcome.mean_utility
        metrics[f"{variant.value}|power"] = float(np.mean(outcome.powers))
        metrics[f"{variant.value}|sinr_db"] = float(np.mean([10 * np.log10(max(u.sinr, 1e-300)) for u in outcome.users]))
        metrics[f"{variant.value}|at_max"] = outcome.fraction_at_max
        metrics[f"{variant.value}|converged"] = float(outcome.converged)
    return metrics


def energy_efficiency_sweep(config: ExperimentConfig) -> pd.DataFrame:
    """Per-K Monte-Carlo averages of every EE metric for every variant."""
    rows = []
    for K in config.user_counts:
        task = partial(
            ee_trial,
            scenario_config=_with_users(config.scenario, K),
            variants=list(config.variants),
            utility_config=config.utility,
            schedule=config.game_schedule,
            code_kind=config.code_kind,
        )
        result = monte_carlo(task, config.effective_trials, derive_seed(config.master_seed, K), config.workers)
        for variant in config.variants:
            row = {"K": K, "variant": variant.value}
            for metric in EE_METRICS:
                row[f"{metric}_mean"] = result.mean(f"{variant.value}|{metric}")
                row[f"{metric}_std"] = result.std(f"{variant.value}|{metric}")
            rows.append(row)
        logger.info("Energy-efficiency sweep: K=%d done", K)
    return pd.DataFrame(rows)


def figure_energy_efficiency(config: ExperimentConfig) -> FigureResult:
    """One EE metric (per the figure id) versus K for every variant."""
    frame = energy_efficiency_sweep(config)
    if config.figure not in EE_FIGURE_METRICS:
        return FigureResult(figure=config.figure, frame=frame)
    metric, column = EE_FIGURE_METRICS[config.figure]
    selected = frame[["K", "variant", f"{metric}_mean", f"{metric}_std"]]
    return FigureResult(
        figure=config.figure,
        frame=selected.rename(columns={f"{metric}_mean": f"{column}_mean", f"{metric}_std": f"{column}_std"}),
    )


def relative_utility_error(predicted, actual) -> float:
    """|mean(predicted) - mean(actual)| / mean(actual); NaN when the actual mean utility is zero."""
    predicted = np.asarray(predicted, dtype=float)
    actual = np.asarray(actual, dtype=float)
    reference = float(np.mean(actual))
    if reference <= 0:
        return float("nan")
    return abs(float(np.mean(predicted)) - reference) / reference


def lsa_trial(
    seed: int,
    scenario_config: ScenarioConfig,
    detections: List[str],
    utility_config: UtilityConfig,
    schedule: GameSchedule,
    code_kind: str,
) -> Dict[str, float]:
    """Actual PR game utilities against both large-system predictions on one scenario."""
    scenario = generate_scenario(scenario_config, derive_seed(seed, 0))
    codes = generate_codes(scenario.N, scenario.K, code_kind, seed=derive_seed(seed, 1))
    gamma_bar = solve_target_sinr(utility_config.M).gamma_bar
    metrics: Dict[str, float] = {}
    for detection in detections:
        variant = GameVariant.PR_WL if detection == "wl" else GameVariant.PR_LINEAR
        inp = LsaInput.from_scenario(scenario, gamma_bar, detection, utility_config)
        try:
            plain = lsa_power_plain(inp)
            improved = lsa_power_improved(inp)
        except (InfeasibleLoadError, RootBracketError) as e:
            logger.warning("Skipping %s prediction at K=%d: %s", detection, scenario.K, e)
            metrics[f"{detection}|plain_error"] = float("nan")
            metrics[f"{detection}|improved_error"] = float("nan")
            continue
        outcome = run_ee_game(scenario, codes, variant, utility_config, schedule)
        actual = [user.utility for user in outcome.users]
        metrics[f"{detection}|plain_error"] = relative_utility_error(plain.utilities, actual)
        metrics[f"{detection}|improved_error"] = relative_utility_error(improved.utilities, actual)
        metrics[f"{detection}|n_max_hat"] = float(plain.n_max_hat)
        metrics[f"{detection}|n_max_actual"] = float(sum(user.at_max_power for user in outcome.users))
    return metrics


def figure_lsa_accuracy(config: ExperimentConfig) -> FigureResult:
    """Mean relative utility error of both predictors versus K."""
    rows = []
    for K in config.user_counts:
        task = partial(
            lsa_trial,
            scenario_config=_with_users(config.scenario, K),
            detections=list(config.detections),
            utility_config=config.utility,
            schedule=config.game_schedule,
            code_kind=config.code_kind,
        )
        result = monte_carlo(task, config.effective_trials, derive_seed(config.master_seed, K), config.workers)
        for detection in config.detections:
            for predictor in ("plain", "improved"):
                metric = f"{detection}|{predictor}_error"
                rows.append({
                    "K": K,
                    "detection": detection,
                    "predictor": predictor,
                    "mean_relative_error": result.mean(metric),
                    "std_relative_error": result.std(metric),
                })
        logger.info("LSA accuracy: K=%d done", K)
    return FigureResult(figure="fig8", frame=pd.DataFrame(rows))


FIGURE_RUNNERS = {
    "fig1": figure_orthonormality,
    "fig2": figure_twsc,
    "fig3": figure_oversized,
    "fig4": figure_energy_efficiency,
    "fig5": figure_energy_efficiency,
    "fig6": figure_energy_efficiency,
    "fig7": figure_energy_efficiency,
    "fig8": figure_lsa_accuracy,
    "custom": figure_energy_efficiency,
}


def run_figure(figure_id: str, config: Optional[ExperimentConfig] = None) -> FigureResult:
    """
    Regenerate one figure's dataset.

    Column schemas:
        fig1: K, variant, sweep, gram_min, gram_max
        fig2: K, variant, sweep, wl_twsc, twsc, bound
        fig3: sweep, eig_1 .. eig_2N
        fig4-7: K, variant, <metric>_mean, <metric>_std
        fig8: K, detection, predictor, mean_relative_error, std_relative_error
        custom: K, variant and mean/std of every EE metric

    Raises:
        InvalidInputError: If the figure id is unknown
    """
    if figure_id not in FIGURE_IDS:
        raise InvalidInputError(f"unknown figure id: {figure_id}")
    config = (config or ExperimentConfig()).resolved(figure_id)
    logger.info("Regenerating %s (seed %d)", figure_id, config.master_seed)
    result = FIGURE_RUNNERS[figure_id](config)
    logger.info("%s: %d rows", figure_id, len(result.frame))
    return result


def code_game_dataset(config: ExperimentConfig) -> Dict[str, pd.DataFrame]:
    """Trace and summary of both code iterations on one random scenario."""
    config = config.resolved()
    scenario = generate_scenario(config.scenario, derive_seed(config.master_seed, 0))
    codes = generate_codes(scenario.N, scenario.K, config.code_kind, seed=derive_seed(config.master_seed, 1))
    schedule = config.code_schedule.model_copy(update={"record_trace": True})
    traces, summary = [], []
    for variant in config.detections:
        report = run_to_fixed_point(scenario, codes, schedule, variant)
        traces.extend(
            {"variant": variant, **point.model_dump(exclude={"eigenvalues"})} for point in report.trace
        )
        summary.append({
            "variant": variant,
            "converged": report.converged,
            "sweeps": report.sweeps_used,
            "perturbations": report.perturbations,
            "wl_twsc": report.wl_twsc,
            "twsc": report.twsc,
            "bound": float(np.sum(np.asarray(report.weights) ** 2) / 4.0) if variant == "wl"
            else float(np.sum(np.asarray(report.weights) ** 2)),
            "c_sum": report.c_sum,
            "tmmse": report.tmmse,
        })
    return {"code_game_trace": pd.DataFrame(traces), "code_game_summary": pd.DataFrame(summary)}


def ee_dataset_trial(
    seed: int,
    scenario_config: ScenarioConfig,
    variants: List[GameVariant],
    utility_config: UtilityConfig,
    schedule: GameSchedule,
    code_kind: str,
) -> Dict[str, List[dict]]:
    """Per-user and per-variant rows of one random scenario; a failing variant is skipped."""
    scenario = generate_scenario(scenario_config, derive_seed(seed, 0))
    codes = generate_codes(scenario.N, scenario.K, code_kind, seed=derive_seed(seed, 1))
    users, trials = [], []
    for variant in variants:
        try:
            outcome = run_ee_game(scenario, codes, variant, utility_config, schedule)
        except CdmaGameError as e:
            logger.warning("Seed %d, %s failed: %s", seed, variant.value, e)
            continue
        for k, user in enumerate(outcome.users):
            users.append({
                "variant": variant.value,
                "user": k,
                "power_W": user.power,
                "sinr_dB": user.sinr_db,
                "utility_bpJ": user.utility,
                "at_max": user.at_max_power,
            })
        trials.append({
            "variant": variant.value,
            "mean_utility_bpJ": outcome.mean_utility,
            "mean_power_W": float(np.mean(outcome.powers)),
            "fraction_at_max": outcome.fraction_at_max,
            "iterations": outcome.iterations,
            "converged": outcome.converged,
        })
    return {"users": users, "trials": trials}


def lsa_dataset_trial(
    seed: int,
    scenario_config: ScenarioConfig,
    detections: List[str],
    utility_config: UtilityConfig,
    schedule: GameSchedule,
    code_kind: str,
) -> Dict[str, List[dict]]:
    """Per-user predictions and PR game outcomes of one random scenario."""
    scenario = generate_scenario(scenario_config, derive_seed(seed, 0))
    codes = generate_codes(scenario.N, scenario.K, code_kind, seed=derive_seed(seed, 1))
    gamma_bar = solve_target_sinr(utility_config.M).gamma_bar
    rows = []
    for detection in detections:
        inp = LsaInput.from_scenario(scenario, gamma_bar, detection, utility_config)
        plain = lsa_power_plain(inp)
        improved = lsa_power_improved(inp)
        variant = GameVariant.PR_WL if detection == "wl" else GameVariant.PR_LINEAR
        outcome = run_ee_game(scenario, codes, variant, utility_config, schedule)
        for k, user in enumerate(outcome.users):
            rows.append({
                "detection": detection,
                "user": k,
                "h_sq": float(inp.h_sq[k]),
                "power_W": user.power,
                "utility_bpJ": user.utility,
                "plain_power_W": plain.powers[k],
                "plain_utility_bpJ": plain.utilities[k],
                "improved_power_W": improved.powers[k],
                "improved_utility_bpJ": improved.utilities[k],
            })
    return {"rows": rows}


def _numbered(results: List[Dict[str, List[dict]]], key: str) -> pd.DataFrame:
    return pd.DataFrame([{"trial": trial, **row} for trial, result in enumerate(results) for row in result[key]])


def ee_game_dataset(config: ExperimentConfig) -> Dict[str, pd.DataFrame]:
    """Per-user outcomes and per-trial aggregates of every variant."""
    config = config.resolved()
    task = partial(
        ee_dataset_trial,
        scenario_config=config.scenario,
        variants=list(config.variants),
        utility_config=config.utility,
        schedule=config.game_schedule,
        code_kind=config.code_kind,
    )
    results = run_trials(task, config.effective_trials, config.master_seed, config.workers)
    return {"ee_game_users": _numbered(results, "users"), "ee_game_trials": _numbered(results, "trials")}


def lsa_dataset(config: ExperimentConfig) -> Dict[str, pd.DataFrame]:
    """Per-user predictions aligned row-for-row with the actual PR game outcome."""
    config = config.resolved()
    task = partial(
        lsa_dataset_trial,
        scenario_config=config.scenario,
        detections=list(config.detections),
        utility_config=config.utility,
        schedule=config.game_schedule,
        code_kind=config.code_kind,
    )
    results = run_trials(task, config.effective_trials, config.master_seed, config.workers)
    return {"lsa_predictions": _numbered(results, "rows")}
