"""Large-system SINR heuristics and the plain/improved power predictors."""

import logging

import numpy as np
from scipy.optimize import bisect, brentq

from ..exceptions import ConvergenceError, InfeasibleLoadError, InvalidInputError, RootBracketError
from ..power_game import utility
from .models import Detection, LsaInput, LsaPrediction

logger = logging.getLogger(__name__)

SINR_TOL = 1e-10
RELAXATION = 0.7
MAX_ITERATIONS = 10_000


def _factor(detection: Detection) -> float:
    if detection not in ("wl", "linear"):
        raise InvalidInputError(f"unknown detection: {detection}")
    return 2.0 if detection == "wl" else 1.0


def _solve_sinr(own: float, others: np.ndarray, noise: float, dimensions: float) -> float:
    """
    Root of gamma = q / (noise + (1/m) sum_j q q_j / (q + q_j gamma)).

    Damped fixed-point iteration from the matched-filter SINR; falls back to
    a bracketed root search if the iteration stalls.
    """

    def mapping(gamma: float) -> float:
        return own / (noise + np.sum(own * others / (own + others * gamma)) / dimensions)

    gamma = mapping(0.0)
    for _ in range(MAX_ITERATIONS):
        updated = (1.0 - RELAXATION) * gamma + RELAXATION * mapping(gamma)
        if abs(updated - gamma) <= SINR_TOL * max(gamma, np.finfo(float).tiny):
            return float(updated)
        gamma = updated

    logger.warning("LSA fixed-point iteration stalled; switching to bracketed search")

    def balance(g: float) -> float:
        return g * (noise + np.sum(own * others / (own + others * g)) / dimensions) - own

    try:
        return float(brentq(balance, 0.0, own / noise, xtol=1e-300, rtol=1e-14))
    except ValueError as exc:
        raise ConvergenceError("LSA SINR equation has no root in [0, q/noise]") from exc


def _positive(values) -> np.ndarray:
    array = np.atleast_1d(np.asarray(values, dtype=float)).reshape(-1)
    if np.any(array <= 0):
        raise InvalidInputError("received powers must be positive")
    return array


def lsa_sinr(received_powers, k: int, N: int, noise_psd: float, detection: Detection = "wl") -> float:
    """
    Large-system SINR of user k under MMSE detection with random codes.

    For WL detection (received powers q_k = 2 p_k h_k^2, 2N real dimensions)
    gamma_k solves

        gamma_k = q_k / (2 N0 + (1/2N) sum_{j != k} q_k q_j / (q_k + q_j gamma_k));

    linear detection uses q_k = p_k h_k^2 and N dimensions.
    """
    powers = _positive(received_powers)
    factor = _factor(detection)
    return _solve_sinr(powers[k], np.delete(powers, k), 2.0 * noise_psd, factor * N)


def lsa_sinrs(received_powers, N: int, noise_psd: float, detection: Detection = "wl") -> np.ndarray:
    """lsa_sinr for every user."""
    powers = _positive(received_powers)
    return np.array([lsa_sinr(powers, k, N, noise_psd, detection) for k in range(powers.size)])


def lsa_sinr_real(received_powers, k: int, N: int, noise_psd: float) -> float:
    """
    Large-system SINR for a real-valued channel with linear MMSE detection.

    gamma_k = P_k / (N0/2 + (1/N) sum_{j != k} P_k P_j / (P_k + P_j gamma_k)).
    """
    powers = _positive(received_powers)
    return _solve_sinr(powers[k], np.delete(powers, k), 0.5 * noise_psd, float(N))


def received_power_target(noise_psd: float, gamma_bar: float, load: float, detection: Detection = "wl") -> float:
    """
    Common received power giving every user the target SINR.

    P_R = 2 N0 gamma_bar / (1 - gamma_bar alpha / (c (1 + gamma_bar)))
    with c = 2 for WL and 1 for linear detection.

    Raises:
        InfeasibleLoadError: If alpha >= c (1 + gamma_bar) / gamma_bar
    """
    factor = _factor(detection)
    margin = 1.0 - gamma_bar * load / (factor * (1.0 + gamma_bar))
    if margin <= 0:
        bound = factor * (1.0 + gamma_bar) / gamma_bar
        raise InfeasibleLoadError(
            f"load {load:.4f} is infeasible for target SINR {gamma_bar:.4f}: need alpha < {bound:.4f}"
        )
    return 2.0 * noise_psd * gamma_bar / margin


def _prediction(
    inp: LsaInput,
    method: str,
    powers: np.ndarray,
    common: float,
    n_max_hat: int,
) -> LsaPrediction:
    factor = inp.dimension_factor
    received = factor * inp.h_sq * powers
    sinrs = lsa_sinrs(received, inp.N, inp.noise_psd, inp.detection)
    return LsaPrediction(
        method=method,
        detection=inp.detection,
        powers=powers.tolist(),
        received_powers=received.tolist(),
        sinrs=sinrs.tolist(),
        utilities=[utility(float(p), float(g), inp.utility) for p, g in zip(powers, sinrs)],
        at_max_power=(powers >= inp.p_max).tolist(),
        n_max_hat=n_max_hat,
        common_received_power=common,
    )


def _uncapped_powers(inp: LsaInput) -> tuple:
    common = received_power_target(inp.noise_psd, inp.gamma_bar, inp.interferer_load, inp.detection)
    return common, common / (inp.dimension_factor * inp.h_sq)


def estimate_maxpower_count(inp: LsaInput) -> int:
    """Number of users whose uncapped plain-predictor power exceeds p_max."""
    _, wanted = _uncapped_powers(inp)
    return int(np.count_nonzero(wanted > inp.p_max))


def lsa_power_plain(inp: LsaInput) -> LsaPrediction:
    """
    Equal-received-power predictor: p_k = min(P_R / (c h_k^2), p_max).

    SINRs and utilities are evaluated with the large-system SINR of the
    resulting (possibly capped) power profile.
    """
    common, wanted = _uncapped_powers(inp)
    powers = np.minimum(wanted, inp.p_max)
    n_max_hat = int(np.count_nonzero(wanted > inp.p_max))
    logger.debug("Plain LSA: K=%d P_R=%.4e capped=%d", inp.K, common, n_max_hat)
    return _prediction(inp, "plain", powers, common, n_max_hat)


def improved_balance(x: float, inp: LsaInput, active_others: int, capped_ratios: np.ndarray) -> float:
    """
    Left side of the improved SINR equation in units of the noise variance.

    m x / (m + u1 x / (1 + gamma_bar) + sum_i x r_i / (x + r_i gamma_bar)),
    where x = P / 2N0, m = cN and r_i = c p_max h_i^2 / 2N0 for the capped users.
    """
    dimensions = inp.dimension_factor * inp.N
    capped = np.sum(x * capped_ratios / (x + capped_ratios * inp.gamma_bar))
    return dimensions * x / (dimensions + active_others * x / (1.0 + inp.gamma_bar) + capped)


def lsa_power_improved(inp: LsaInput) -> LsaPrediction:
    """
    Predictor that accounts for the users stuck at maximum power.

    The weakest N_m_hat users (by channel gain) are taken as capped; the common
    received power of the others solves the improved SINR equation by
    bisection, and every user then gets min(P_R / (c h_k^2), p_max).

    Raises:
        RootBracketError: If the target SINR cannot be reached by the active users
    """
    n_max_hat = estimate_maxpower_count(inp)
    factor = inp.dimension_factor
    noise = 2.0 * inp.noise_psd
    if n_max_hat == inp.K:
        powers = np.full(inp.K, inp.p_max)
        return _prediction(inp, "improved", powers, None, n_max_hat)

    order = np.argsort(-inp.h_sq, kind="stable")
    capped = order[inp.K - n_max_hat:]
    active_others = inp.K - n_max_hat - 1
    ratios = factor * inp.p_max * inp.h_sq[capped] / noise

    def excess(x: float) -> float:
        return improved_balance(x, inp, active_others, ratios) - inp.gamma_bar

    low = inp.gamma_bar
    high = 2.0 * low
    while excess(high) <= 0:
        high *= 2.0
        if high > 1e12 * low:
            raise RootBracketError(
                f"no received power reaches SINR {inp.gamma_bar:.4f} with {active_others + 1} active users"
            )
    x = low if excess(low) >= 0 else bisect(excess, low, high, xtol=1e-14 * low, rtol=1e-14, maxiter=500)
    residual = abs(excess(x))
    if residual > 1e-8:
        raise ConvergenceError(f"improved LSA residual {residual:.3e}")

    common = x * noise
    powers = np.minimum(common / (factor * inp.h_sq), inp.p_max)
    logger.debug("Improved LSA: K=%d P_R=%.4e N_m_hat=%d", inp.K, common, n_max_hat)
    return _prediction(inp, "improved", powers, common, n_max_hat)
