"""Correlation potentials, the signature-set distance and capacity metrics."""

from typing import Union

import numpy as np

from ..exceptions import InvalidInputError
from ..signal_model import AugmentedSignatureSet, Scenario, augment, code_array
from ..signal_model.covariance import CodesLike
from .models import CapacityMetrics

# imaginary residue tolerated in inner products between conjugate-structured vectors
_REAL_TOL = 1e-10


def weighted_correlation(signatures: np.ndarray, weights: np.ndarray) -> float:
    """sum_{i,j} w_i w_j |s_i^H s_j|^2 for the columns of ``signatures``."""
    cross = np.abs(signatures.conj().T @ signatures) ** 2
    return float(weights @ cross @ weights)


def wl_twsc(codes: CodesLike, scenario: Scenario) -> float:
    """
    WL total weighted squared correlation.

    sum_{i,j} p_i p_j h_i^2 h_j^2 |s_{i,a}^H s_{j,a}|^2, which equals a quarter
    of the squared eigenvalues of S_a A S_a^H and is at least tr(A^2)/4.
    """
    signatures = augment(code_array(scenario, codes), scenario.phi)
    return weighted_correlation(signatures, scenario.p * scenario.h ** 2)


def twsc(codes: CodesLike, scenario: Scenario) -> float:
    """Linear total weighted squared correlation sum_{i,j} p_i p_j h_i^2 h_j^2 |s_i^H s_j|^2."""
    return weighted_correlation(code_array(scenario, codes), scenario.p * scenario.h ** 2)


def column_angles(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    """
    Angle between matching unit columns in the real-imaginary embedding.

    Uses 2 asin(||u - v|| / 2), which equals acos(Re u^H v) for unit vectors
    and keeps full precision for nearly equal columns.
    """
    gaps = np.linalg.norm(first - second, axis=0)
    return 2.0 * np.arcsin(np.clip(gaps / 2.0, 0.0, 1.0))


def _matrix(value: Union[AugmentedSignatureSet, np.ndarray]) -> np.ndarray:
    return value.matrix if isinstance(value, AugmentedSignatureSet) else np.asarray(value, dtype=complex)


def metric_d(first: Union[AugmentedSignatureSet, np.ndarray], second: Union[AugmentedSignatureSet, np.ndarray]) -> float:
    """
    Distance max_k acos(s'_{k,a}^H s''_{k,a}) between two augmented signature sets.

    Raises:
        InvalidInputError: If the shapes differ or an inner product is not real
    """
    left, right = _matrix(first), _matrix(second)
    if left.shape != right.shape:
        raise InvalidInputError(f"signature sets differ in shape: {left.shape} vs {right.shape}")
    inner = np.sum(left.conj() * right, axis=0)
    if np.any(np.abs(inner.imag) > _REAL_TOL):
        raise InvalidInputError("inner products are not real; inputs leave the conjugate-structured set")
    return float(column_angles(left, right).max())


def capacity_metrics(eigenvalues, noise_psd: float, K: int) -> CapacityMetrics:
    """
    Sum capacity, total MSE and WL-TWSC from the eigenvalues of S_a A S_a^H.

    Args:
        eigenvalues: Nonnegative eigenvalues
        noise_psd: N0 (the per-dimension noise variance is 2 N0)
        K: Number of users (for the total MSE)

    Returns:
        CapacityMetrics with c_sum in nats
    """
    values = np.asarray(eigenvalues, dtype=float)
    floor = -1e-12 * max(1.0, float(np.abs(values).max(initial=0.0)))
    if np.any(values < floor):
        raise InvalidInputError("eigenvalues must be nonnegative")
    values = np.clip(values, 0.0, None)
    noise = 2.0 * noise_psd
    return CapacityMetrics(
        c_sum=float(np.sum(np.log1p(values / noise))),
        tmmse=float(K - np.sum(values / (values + noise))),
        wl_twsc=float(0.25 * np.sum(values ** 2)),
    )
