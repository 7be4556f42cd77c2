"""Augmented embeddings and data covariance constructors."""

from typing import Union

import numpy as np

from ..exceptions import DimensionMismatchError, InvalidInputError
from .models import UNIT_NORM_TOL, AugmentedSignature, Scenario, SpreadingMatrix

CodesLike = Union[SpreadingMatrix, np.ndarray]


def code_array(scenario: Scenario, codes: CodesLike) -> np.ndarray:
    """Return the N x K code matrix after checking it against the scenario."""
    columns = codes.columns if isinstance(codes, SpreadingMatrix) else np.asarray(codes, dtype=complex)
    if columns.shape != (scenario.N, scenario.K):
        raise DimensionMismatchError(
            f"codes have shape {columns.shape}, scenario needs ({scenario.N}, {scenario.K})"
        )
    return columns


def augment(columns: np.ndarray, phi) -> np.ndarray:
    """Stack [S e^{j phi}; conj(S) e^{-j phi}] / sqrt(2) column by column."""
    upper = columns * np.exp(1j * np.asarray(phi, dtype=float))[np.newaxis, :]
    return np.vstack([upper, upper.conj()]) / np.sqrt(2.0)


def build_augmented_signature(s, phi: float) -> AugmentedSignature:
    """
    Embed one spreading code and its channel phase into the augmented space.

    Args:
        s: Unit-norm complex N-vector
        phi: Channel phase (radians)

    Returns:
        AugmentedSignature with upper half s e^{j phi} / sqrt(2)

    Raises:
        InvalidInputError: If s does not have unit norm
    """
    code = np.asarray(s, dtype=complex).reshape(-1)
    if abs(np.linalg.norm(code) - 1.0) > UNIT_NORM_TOL:
        raise InvalidInputError(f"spreading code norm is {np.linalg.norm(code):.3e}, expected 1")
    return AugmentedSignature(data=augment(code.reshape(-1, 1), [phi])[:, 0])


def covariance(scenario: Scenario, codes: CodesLike) -> np.ndarray:
    """M = sum_k p_k h_k^2 s_k s_k^H + 2 N0 I_N."""
    columns = code_array(scenario, codes)
    weights = scenario.p * scenario.h ** 2
    matrix = (columns * weights) @ columns.conj().T
    matrix += scenario.noise_variance * np.eye(scenario.N)
    return 0.5 * (matrix + matrix.conj().T)


def pseudo_covariance(scenario: Scenario, codes: CodesLike) -> np.ndarray:
    """M' = sum_k p_k h_k^2 e^{2 j phi_k} s_k s_k^T."""
    columns = code_array(scenario, codes)
    weights = scenario.p * scenario.h ** 2 * np.exp(2j * scenario.phi)
    return (columns * weights) @ columns.T


def augmented_covariance(scenario: Scenario, codes: CodesLike) -> np.ndarray:
    """M_a = sum_k 2 p_k h_k^2 s_{k,a} s_{k,a}^H + 2 N0 I_{2N}."""
    columns = code_array(scenario, codes)
    signatures = augment(columns, scenario.phi)
    weights = 2.0 * scenario.p * scenario.h ** 2
    matrix = (signatures * weights) @ signatures.conj().T
    matrix += scenario.noise_variance * np.eye(2 * scenario.N)
    return 0.5 * (matrix + matrix.conj().T)
