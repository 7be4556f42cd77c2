"""Best-response dynamics for the six energy-efficiency games."""

import logging
from typing import Optional, Union

import numpy as np

from ..code_game import CodeIterationState, iterate_state
from ..exceptions import DimensionMismatchError
from ..receivers import LinearReceiver, WlReceiver, linear_mmse_matrix, linear_sinrs, wl_mmse_matrix, wl_sinrs
from ..signal_model import Scenario, SpreadingMatrix, augment, code_array
from ..signal_model.covariance import CodesLike
from .efficiency import best_response_power, solve_target_sinr, utility
from .models import GameOutcome, GameSchedule, GameVariant, UserOutcome, UtilityConfig

logger = logging.getLogger(__name__)

# smallest log-domain power step of the code-optimizing games
MIN_POWER_STEP = 1.0 / 64.0


def _detection(variant: Union[GameVariant, str]) -> str:
    if isinstance(variant, GameVariant):
        return variant.detection
    return GameVariant(variant).detection if variant not in ("wl", "linear") else variant


def _signatures(scenario: Scenario, columns: np.ndarray, detection: str) -> np.ndarray:
    return augment(columns, scenario.phi) if detection == "wl" else columns


def _interference(
    scenario: Scenario,
    signatures: np.ndarray,
    receivers: np.ndarray,
    factor: float,
) -> np.ndarray:
    """
    I_k = (2 N0 ||d_k||^2 + sum_{i != k} c p_i h_i^2 |d_k^H s_i|^2) / (c h_k^2 |d_k^H s_k|^2)

    with c = 1 for linear and c = 2 for WL detection.
    """
    cross = np.abs(receivers.conj().T @ signatures) ** 2
    weighted = cross * (factor * scenario.p * scenario.h ** 2)[np.newaxis, :]
    desired = np.diag(cross) * factor * scenario.h ** 2
    noise = scenario.noise_variance * np.sum(np.abs(receivers) ** 2, axis=0)
    others = weighted.sum(axis=1) - np.diag(weighted)
    with np.errstate(divide="ignore"):
        return np.where(desired > 0, (noise + others) / np.where(desired > 0, desired, 1.0), np.inf)


def effective_interference(
    scenario: Scenario,
    codes: CodesLike,
    receivers: Union[LinearReceiver, WlReceiver, np.ndarray],
    k: int,
    variant: Union[GameVariant, str],
) -> float:
    """
    Effective interference I_k with gamma_k = p_k / I_k for a given receiver.

    Args:
        scenario: Uplink realization
        codes: Spreading codes
        receivers: User k's receiver, or a matrix with one receiver column per user
        k: User index
        variant: Game variant or detection family ("linear" / "wl")

    Returns:
        I_k in watts; inf when the receiver cannot see user k's signal
    """
    detection = _detection(variant)
    columns = code_array(scenario, codes)
    if isinstance(receivers, LinearReceiver):
        vector = receivers.d
    elif isinstance(receivers, WlReceiver):
        vector = receivers.d_a
    else:
        array = np.asarray(receivers, dtype=complex)
        vector = array[:, k] if array.ndim == 2 else array
    size = 2 * scenario.N if detection == "wl" else scenario.N
    if vector.size != size:
        raise DimensionMismatchError(f"receiver has {vector.size} entries, expected {size}")
    signatures = _signatures(scenario, columns, detection)
    factor = 2.0 if detection == "wl" else 1.0
    cross = np.abs(vector.conj() @ signatures) ** 2
    desired = factor * scenario.h[k] ** 2 * cross[k]
    if desired == 0:
        return float("inf")
    weighted = factor * scenario.p * scenario.h ** 2 * cross
    noise = scenario.noise_variance * np.vdot(vector, vector).real
    return float((noise + weighted.sum() - weighted[k]) / desired)


def _receivers(scenario: Scenario, columns: np.ndarray, variant: GameVariant) -> np.ndarray:
    if variant.optimizes_receiver:
        return wl_mmse_matrix(scenario, columns) if variant.detection == "wl" else linear_mmse_matrix(scenario, columns)
    return _signatures(scenario, columns, variant.detection)


def _single_user_interference(scenario: Scenario, detection: str) -> np.ndarray:
    # interference-free SINR: p h^2 / N0 for WL, p h^2 / (2 N0) for linear
    factor = 2.0 if detection == "wl" else 1.0
    return scenario.noise_variance / (factor * scenario.h ** 2)


def _damped_step(powers: np.ndarray, targets: np.ndarray, step: float) -> np.ndarray:
    """Geometric interpolation p^(1-step) * target^step; keeps p <= p_max and the fixed points."""
    if step >= 1.0:
        return targets
    return np.exp((1.0 - step) * np.log(powers) + step * np.log(targets))


def run_ee_game(
    scenario: Scenario,
    codes: CodesLike,
    variant: Union[GameVariant, str],
    utility_config: Optional[UtilityConfig] = None,
    schedule: Optional[GameSchedule] = None,
) -> GameOutcome:
    """
    Play synchronous best-response rounds until powers settle.

    Each round every user updates its receiver (PR games) and spreading code
    (PRC games) against the current powers, then all users move toward
    p_k = min(gamma_bar I_k, p_max) simultaneously.

    P and PR games take the full best-response step. In PRC games the codes
    re-adapt to every power profile, so a user's own power lowers its
    interference and full steps can lock into a two-cycle once K exceeds the
    signal dimension; there the step is taken in the log domain and halved
    (down to MIN_POWER_STEP) whenever the best-response residual grows.
    Convergence is judged on the undamped residual max |target - p| / p.

    Args:
        scenario: Uplink realization; its powers are the starting point when
            ``schedule.initial_power == "scenario"``
        codes: Spreading codes (fixed for P/PR games, starting point for PRC games)
        variant: One of the six game variants
        utility_config: Packet format (defaults to M=120)
        schedule: Round limits and code-iteration settings

    Returns:
        GameOutcome; ``converged`` is False with the per-round trace if the
        round limit was hit
    """
    variant = GameVariant(variant)
    config = utility_config or UtilityConfig()
    schedule = schedule or GameSchedule()
    gamma_bar = solve_target_sinr(config.M).gamma_bar
    detection = variant.detection
    factor = 2.0 if detection == "wl" else 1.0
    columns = np.array(code_array(scenario, codes), dtype=complex)
    rng = np.random.default_rng(schedule.code_schedule.seed)

    if schedule.initial_power == "single_user":
        powers = best_response_power(_single_user_interference(scenario, detection), gamma_bar, scenario.p_max)
    else:
        powers = scenario.p.copy()

    logger.info("Starting %s game: K=%d N=%d gamma_bar=%.4f", variant.value, scenario.K, scenario.N, gamma_bar)
    trace = []
    converged = False
    rounds = 0
    step = 1.0
    for rounds in range(1, schedule.max_rounds + 1):
        current = scenario.with_powers(powers)
        codes_settled = True
        if variant.optimizes_codes:
            state = CodeIterationState(current, columns, detection)
            _, codes_settled, _, _ = iterate_state(state, schedule.code_schedule, rng)
            columns = np.array(state.codes().columns)
        receivers = _receivers(current, columns, variant)
        interference = _interference(current, _signatures(current, columns, detection), receivers, factor)
        targets = best_response_power(interference, gamma_bar, scenario.p_max)
        change = float(np.max(np.abs(targets - powers) / powers))
        if variant.optimizes_codes and trace and change > trace[-1] and step > MIN_POWER_STEP:
            step = max(0.5 * step, MIN_POWER_STEP)
            logger.debug("Round %d: best-response residual grew; power step now %.4g", rounds, step)
        trace.append(change)
        logger.debug("Round %d: max relative best-response residual %.3e", rounds, change)
        if change < schedule.tol and codes_settled:
            # land exactly on the best responses so capped users sit at p_max
            powers = targets
            converged = True
            break
        powers = _damped_step(powers, targets, step) if variant.optimizes_codes else targets

    if not converged:
        logger.warning("%s game did not converge in %d rounds", variant.value, schedule.max_rounds)

    final = scenario.with_powers(powers)
    receivers = _receivers(final, columns, variant)
    signatures = _signatures(final, columns, detection)
    if detection == "wl":
        sinrs = wl_sinrs(final, columns, receivers)
    else:
        sinrs = linear_sinrs(final, columns, receivers)
    interference = _interference(final, signatures, receivers, factor)

    users = [
        UserOutcome(
            power=float(powers[k]),
            p_max=float(scenario.p_max[k]),
            sinr=float(sinrs[k]),
            mse=1.0 / (1.0 + float(sinrs[k])),
            utility=utility(float(powers[k]), float(sinrs[k]), config),
            interference=float(interference[k]),
            at_max_power=bool(powers[k] >= scenario.p_max[k]),
        )
        for k in range(scenario.K)
    ]
    outcome = GameOutcome(
        variant=variant,
        gamma_bar=gamma_bar,
        users=users,
        codes=SpreadingMatrix(columns=columns / np.linalg.norm(columns, axis=0)),
        iterations=rounds,
        converged=converged,
        trace=trace,
    )
    logger.info(
        "%s game finished: converged=%s rounds=%d mean utility=%.4g bit/J",
        variant.value, converged, rounds, outcome.mean_utility,
    )
    return outcome


def best_unilateral_gain(outcome: GameOutcome, k: int, config: UtilityConfig, grid: int = 1000) -> float:
    """
    Largest relative utility gain user k can get by changing only its power.

    Scans ``grid`` powers evenly spaced in (0, p_max] with everything else
    (and therefore I_k) held fixed.
    """
    user = outcome.users[k]
    powers = np.linspace(user.p_max / grid, user.p_max, grid)
    gammas = np.zeros_like(powers) if np.isinf(user.interference) else powers / user.interference
    values = [utility(float(p), float(g), config) for p, g in zip(powers, gammas)]
    if user.utility == 0:
        return float(max(values))
    return float(max(0.0, (max(values) - user.utility) / user.utility))
