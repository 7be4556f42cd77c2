"""Oversized users, the optimal eigenvalue profile and sum-capacity comparison."""

import logging
from typing import List

import numpy as np

from ..exceptions import InvalidInputError
from ..signal_model import AugmentedSignatureSet, Scenario
from .models import SumCapacityComparison

logger = logging.getLogger(__name__)


def _positive(powers) -> np.ndarray:
    values = np.asarray(powers, dtype=float).reshape(-1)
    if values.size == 0 or np.any(values <= 0):
        raise InvalidInputError("powers must be positive")
    return values


def detect_oversized(powers, m: int) -> List[int]:
    """
    Find the users that earn an interference-free dimension at the optimum.

    User i is oversized in an m-dimensional signal space when

        w_i > sum_j w_j 1{w_i > w_j} / (m - sum_j 1{w_j >= w_i})

    Users are tested in descending power order (ties by index) and the scan
    stops at the first user that fails. Users at the global minimum power are
    never oversized.

    Args:
        powers: Received powers (d_k^2 for m = N, a_k^2 for m = 2N)
        m: Signal-space dimension

    Returns:
        Oversized user indices in descending power order
    """
    weights = _positive(powers)
    if m < 1:
        raise InvalidInputError(f"dimension must be positive, got {m}")
    order = sorted(range(weights.size), key=lambda i: (-weights[i], i))
    floor = weights.min()
    oversized = []
    for i in order:
        if weights[i] <= floor:
            break
        denominator = m - np.count_nonzero(weights >= weights[i])
        if denominator <= 0:
            break
        if not weights[i] > weights[weights < weights[i]].sum() / denominator:
            break
        oversized.append(i)
    return oversized


def optimal_eigenvalue_profile(powers, m: int) -> np.ndarray:
    """
    Eigenvalues of S A S^H at the global minimum of the weighted correlation.

    With K <= m every user gets its own dimension (sorted powers padded with
    zeros). Otherwise oversized users keep their own power and the remaining
    power is spread evenly over the remaining dimensions.

    Returns:
        m nonnegative values in descending order summing to sum(powers)
    """
    weights = _positive(powers)
    if weights.size <= m:
        return np.concatenate([np.sort(weights)[::-1], np.zeros(m - weights.size)])
    oversized = detect_oversized(weights, m)
    rest = np.delete(weights, oversized)
    spread = np.full(m - len(oversized), rest.sum() / (m - len(oversized)))
    return np.concatenate([weights[oversized], spread])


def _rotate_to_diagonal(eigenvalues: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """
    Orthogonal Q with diag(Q^T diag(eigenvalues) Q) == targets.

    ``eigenvalues`` must majorize ``targets``. Each plane rotation pairs the
    two unfixed diagonal entries that bracket the smallest open target and
    fixes that target on one of them; the unfixed block stays diagonal.
    """
    size = eigenvalues.size
    matrix = np.diag(eigenvalues.astype(float))
    rotation = np.eye(size)
    scale = max(float(eigenvalues.max()), 1.0)
    open_positions = list(range(size))
    placed = np.empty(size, dtype=int)
    for user in np.argsort(targets, kind="stable"):
        target = targets[user]
        diagonal = np.diag(matrix)
        gaps = diagonal[open_positions] - target
        exact = np.flatnonzero(np.abs(gaps) <= 1e-14 * scale)
        above = [p for p, gap in zip(open_positions, gaps) if gap > 0]
        below = [p for p, gap in zip(open_positions, gaps) if gap < 0]
        if exact.size or not above or not below:
            # rounding can only leave the last targets without a bracket
            position = open_positions[int(exact[0])] if exact.size else open_positions[int(np.argmin(np.abs(gaps)))]
        else:
            position = min(above, key=lambda p: diagonal[p])
            partner = max(below, key=lambda p: diagonal[p])
            cos_sq = (target - diagonal[partner]) / (diagonal[position] - diagonal[partner])
            c, s = np.sqrt(cos_sq), np.sqrt(1.0 - cos_sq)
            pair = [position, partner]
            plane = np.array([[c, -s], [s, c]])
            matrix[:, pair] = matrix[:, pair] @ plane
            matrix[pair, :] = plane.T @ matrix[pair, :]
            rotation[:, pair] = rotation[:, pair] @ plane
        placed[user] = position
        open_positions.remove(position)
    return rotation[:, placed]


def optimal_real_codes(powers, m: int) -> np.ndarray:
    """
    Real unit-norm codes whose weighted correlation S A S^T has the optimal profile.

    Args:
        powers: Received powers a_k^2
        m: Real signal-space dimension

    Returns:
        m x K real matrix with unit-norm columns
    """
    weights = _positive(powers)
    K = weights.size
    profile = optimal_eigenvalue_profile(weights, m)
    rank = min(K, m)
    eigenvalues = np.concatenate([profile[:rank], np.zeros(K - rank)])
    rotation = _rotate_to_diagonal(eigenvalues, weights)
    # column k of sqrt(Lambda) Q has squared norm a_k^2 and Y Y^T = Lambda
    factor = np.sqrt(eigenvalues)[:rank, np.newaxis] * rotation[:rank]
    codes = np.zeros((m, K))
    codes[:rank] = factor / np.sqrt(weights)[np.newaxis, :]
    return codes / np.linalg.norm(codes, axis=0)


def _log_det(matrix: np.ndarray) -> float:
    sign, value = np.linalg.slogdet(matrix)
    if sign.real <= 0:
        raise InvalidInputError("covariance is not positive definite")
    return float(value)


def sum_capacity_comparison(scenario: Scenario) -> SumCapacityComparison:
    """
    Optimal sum capacities of the WL system and its complex and real equivalents.

    The real value is 1/2 log det(I + S_r A S_r^T / sigma^2) for an optimal set
    of real 2N-dimensional codes. Mapping those codes into the augmented space
    gives an optimal WL set, whose log det(I + S_a A S_a^H / sigma^2) is the WL
    value. The complex value is computed directly from the optimal eigenvalue
    profile over 2N dimensions. At the optimum wl == complex == 2 * real.
    """
    a_sq = scenario.power_diagonal.a_sq
    noise = scenario.noise_variance
    N = scenario.N
    real_codes = optimal_real_codes(a_sq, 2 * N)
    upper = (real_codes[:N] + 1j * real_codes[N:]) / np.sqrt(2.0)
    augmented = AugmentedSignatureSet(matrix=np.vstack([upper, upper.conj()]))

    embedded = augmented.real_embedding()
    real_covariance = np.eye(2 * N) + (embedded * a_sq[np.newaxis, :]) @ embedded.T / noise
    wl_covariance = np.eye(2 * N) + (augmented.matrix * a_sq[np.newaxis, :]) @ augmented.matrix.conj().T / noise
    profile = optimal_eigenvalue_profile(a_sq, 2 * N)
    result = SumCapacityComparison(
        wl=_log_det(wl_covariance),
        complex=float(np.sum(np.log1p(profile / noise))),
        real=0.5 * _log_det(real_covariance),
    )
    logger.debug(
        "Sum capacity K=%d N=%d: wl=%.6g complex=%.6g real=%.6g",
        scenario.K, N, result.wl, result.complex, result.real,
    )
    return result
