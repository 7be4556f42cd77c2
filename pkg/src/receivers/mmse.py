"""Linear and widely-linear MMSE receivers and matched filters."""

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from ..exceptions import DimensionMismatchError
from ..signal_model import Scenario, augment, augmented_covariance, code_array, covariance
from ..signal_model.covariance import CodesLike
from .models import LinearReceiver, WlReceiver


def _check_user(scenario: Scenario, k: int) -> None:
    if not 0 <= k < scenario.K:
        raise DimensionMismatchError(f"user index {k} outside 0..{scenario.K - 1}")


def hermitian_solve(matrix: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve M x = rhs for Hermitian positive-definite M via Cholesky."""
    return cho_solve(cho_factor(matrix, lower=True), rhs)


def linear_mmse_matrix(scenario: Scenario, codes: CodesLike) -> np.ndarray:
    """All linear MMSE receivers as columns: d_k = sqrt(p_k) h_k e^{j phi_k} M^{-1} s_k."""
    columns = code_array(scenario, codes)
    scale = np.sqrt(scenario.p) * scenario.h * np.exp(1j * scenario.phi)
    return hermitian_solve(covariance(scenario, columns), columns) * scale


def wl_mmse_matrix(scenario: Scenario, codes: CodesLike) -> np.ndarray:
    """All WL MMSE receivers as columns: d_{k,a} = sqrt(2 p_k) h_k M_a^{-1} s_{k,a}."""
    columns = code_array(scenario, codes)
    signatures = augment(columns, scenario.phi)
    scale = np.sqrt(2.0 * scenario.p) * scenario.h
    return hermitian_solve(augmented_covariance(scenario, columns), signatures) * scale


def linear_mmse(scenario: Scenario, codes: CodesLike, k: int) -> LinearReceiver:
    """
    SINR-maximizing linear receiver for user k.

    Args:
        scenario: Uplink realization
        codes: N x K spreading codes
        k: User index (0-based)

    Returns:
        LinearReceiver d_k = sqrt(p_k) h_k e^{j phi_k} M^{-1} s_k
    """
    _check_user(scenario, k)
    columns = code_array(scenario, codes)
    direction = hermitian_solve(covariance(scenario, columns), columns[:, k])
    scale = np.sqrt(scenario.p[k]) * scenario.h[k] * np.exp(1j * scenario.phi[k])
    return LinearReceiver(d=scale * direction)


def wl_mmse(scenario: Scenario, codes: CodesLike, k: int) -> WlReceiver:
    """
    SINR-maximizing widely-linear receiver for user k.

    The result lies in the conjugate-structured subspace because M_a does.
    """
    _check_user(scenario, k)
    columns = code_array(scenario, codes)
    signature = augment(columns[:, [k]], scenario.phi[[k]])[:, 0]
    direction = hermitian_solve(augmented_covariance(scenario, columns), signature)
    return WlReceiver(d_a=np.sqrt(2.0 * scenario.p[k]) * scenario.h[k] * direction)


def matched_filter(scenario: Scenario, codes: CodesLike, k: int) -> LinearReceiver:
    """Conventional single-user receiver d_k = s_k."""
    _check_user(scenario, k)
    return LinearReceiver(d=code_array(scenario, codes)[:, k])


def wl_matched_filter(scenario: Scenario, codes: CodesLike, k: int) -> WlReceiver:
    """WL single-user receiver d_{k,a} = s_{k,a}."""
    _check_user(scenario, k)
    columns = code_array(scenario, codes)
    return WlReceiver(d_a=augment(columns[:, [k]], scenario.phi[[k]])[:, 0])
