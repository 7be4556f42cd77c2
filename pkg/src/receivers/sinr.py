"""SINR and MSE evaluation for arbitrary linear and widely-linear receivers."""

from typing import Union

import numpy as np

from ..exceptions import DimensionMismatchError, InvalidInputError
from ..signal_model import Scenario, augment, code_array
from ..signal_model.covariance import CodesLike
from .models import LinearReceiver, WlReceiver


def _ratio(numerator: np.ndarray, total: np.ndarray, noise: np.ndarray) -> np.ndarray:
    return numerator / (noise + total - numerator)


def _projection_sinrs(
    receivers: np.ndarray,
    signatures: np.ndarray,
    weights: np.ndarray,
    noise_variance: float,
) -> np.ndarray:
    """
    SINR of every column receiver against its own column signature.

    Row k of the cross matrix holds d_k^H s_i for all users i.
    """
    norms = np.sum(np.abs(receivers) ** 2, axis=0)
    if np.any(norms == 0):
        raise InvalidInputError("receiver must be nonzero")
    cross = np.abs(receivers.conj().T @ signatures) ** 2 * weights[np.newaxis, :]
    desired = np.diag(cross).copy()
    return _ratio(desired, cross.sum(axis=1), noise_variance * norms)


def linear_sinrs(scenario: Scenario, codes: CodesLike, receivers: np.ndarray) -> np.ndarray:
    """Vector of linear SINRs, one receiver column per user."""
    columns = code_array(scenario, codes)
    if receivers.shape != columns.shape:
        raise DimensionMismatchError("need one N-dimensional receiver per user")
    return _projection_sinrs(receivers, columns, scenario.p * scenario.h ** 2, scenario.noise_variance)


def wl_sinrs(scenario: Scenario, codes: CodesLike, receivers: np.ndarray) -> np.ndarray:
    """Vector of WL SINRs, one 2N-dimensional receiver column per user."""
    columns = code_array(scenario, codes)
    if receivers.shape != (2 * scenario.N, scenario.K):
        raise DimensionMismatchError("need one 2N-dimensional receiver per user")
    signatures = augment(columns, scenario.phi)
    return _projection_sinrs(receivers, signatures, 2.0 * scenario.p * scenario.h ** 2, scenario.noise_variance)


def _single(receiver, size: int) -> np.ndarray:
    vector = np.asarray(receiver, dtype=complex).reshape(-1)
    if vector.size != size:
        raise DimensionMismatchError(f"receiver has {vector.size} entries, expected {size}")
    return vector


def sinr_linear(scenario: Scenario, codes: CodesLike, d: Union[LinearReceiver, np.ndarray], k: int) -> float:
    """
    SINR of user k with linear receiver d.

    p_k h_k^2 |d^H s_k|^2 / (2 N0 ||d||^2 + sum_{i != k} p_i h_i^2 |d^H s_i|^2)

    Raises:
        InvalidInputError: If d is the zero vector
    """
    vector = _single(d.d if isinstance(d, LinearReceiver) else d, scenario.N)
    columns = code_array(scenario, codes)
    if not np.any(vector):
        raise InvalidInputError("receiver must be nonzero")
    cross = np.abs(vector.conj() @ columns) ** 2 * scenario.p * scenario.h ** 2
    noise = scenario.noise_variance * np.vdot(vector, vector).real
    return float(cross[k] / (noise + cross.sum() - cross[k]))


def sinr_wl(scenario: Scenario, codes: CodesLike, d_a: Union[WlReceiver, np.ndarray], k: int) -> float:
    """
    SINR of user k with widely-linear receiver d_a.

    2 p_k h_k^2 |d_a^H s_{k,a}|^2 / (2 N0 ||d_a||^2 + sum_{i != k} 2 p_i h_i^2 |d_a^H s_{i,a}|^2)
    """
    vector = _single(d_a.d_a if isinstance(d_a, WlReceiver) else d_a, 2 * scenario.N)
    if not np.any(vector):
        raise InvalidInputError("receiver must be nonzero")
    signatures = augment(code_array(scenario, codes), scenario.phi)
    cross = np.abs(vector.conj() @ signatures) ** 2 * 2.0 * scenario.p * scenario.h ** 2
    noise = scenario.noise_variance * np.vdot(vector, vector).real
    return float(cross[k] / (noise + cross.sum() - cross[k]))


def mse_wl(gamma: float) -> float:
    """MMSE of the WL detector at SINR gamma: 1 / (1 + gamma)."""
    if gamma < 0:
        raise InvalidInputError(f"SINR must be nonnegative, got {gamma}")
    return 1.0 / (1.0 + gamma)
