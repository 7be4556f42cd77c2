"""Efficiency function, target SINR and the per-user utility."""

import logging
import math

import numpy as np
from scipy.optimize import brentq

from ..exceptions import ConvergenceError, DegenerateEquationError, InvalidInputError
from .models import TargetSinr, UtilityConfig

logger = logging.getLogger(__name__)


def efficiency(gamma, M: int):
    """Packet success approximation f(gamma) = (1 - e^{-gamma})^M."""
    if M < 1:
        raise InvalidInputError(f"packet length must be >= 1, got {M}")
    gamma = np.asarray(gamma, dtype=float)
    if np.any(gamma < 0):
        raise InvalidInputError("SINR must be nonnegative")
    value = (-np.expm1(-gamma)) ** M
    return float(value) if value.ndim == 0 else value


def efficiency_derivative(gamma, M: int):
    """f'(gamma) = M e^{-gamma} (1 - e^{-gamma})^{M-1}."""
    gamma = np.asarray(gamma, dtype=float)
    value = M * np.exp(-gamma) * (-np.expm1(-gamma)) ** (M - 1)
    return float(value) if value.ndim == 0 else value


def solve_target_sinr(M: int) -> TargetSinr:
    """
    Solve f(gamma) = gamma f'(gamma) for gamma > 0.

    For this f the equation reduces to e^gamma - 1 = M gamma, whose positive
    root exceeds 1 because e - 1 < M for every M >= 2.

    Raises:
        DegenerateEquationError: If M < 2 (the only root is gamma = 0)
    """
    if M < 2:
        raise DegenerateEquationError(f"target SINR needs packet length M >= 2, got {M}")

    def reduced(gamma: float) -> float:
        return math.expm1(gamma) - M * gamma

    low, high = 1.0, 2.0
    while reduced(high) <= 0:
        high *= 2.0
    gamma_bar = brentq(reduced, low, high, xtol=1e-14, maxiter=500)
    residual = abs(efficiency(gamma_bar, M) - gamma_bar * efficiency_derivative(gamma_bar, M))
    if residual > 1e-10:
        raise ConvergenceError(f"target SINR residual {residual:.3e} for M={M}")
    logger.debug("Target SINR for M=%d: %.6f (%.3f dB)", M, gamma_bar, 10 * math.log10(gamma_bar))
    return TargetSinr(gamma_bar=gamma_bar, M=M, residual=residual)


def utility(power: float, gamma: float, config: UtilityConfig) -> float:
    """
    Energy efficiency in bit/Joule: R (L/M) f(gamma) / p.

    Raises:
        InvalidInputError: If power is not positive
    """
    if power <= 0:
        raise InvalidInputError(f"power must be positive, got {power}")
    return config.throughput_scale * efficiency(gamma, config.M) / power


def best_response_power(interference, gamma_bar: float, p_max):
    """
    Utility-maximizing power min(gamma_bar * I_k, p_max).

    Infinite interference (the desired signal is invisible to the receiver)
    maps to p_max.
    """
    interference = np.asarray(interference, dtype=float)
    if np.any(interference <= 0):
        raise InvalidInputError("effective interference must be positive")
    value = np.minimum(gamma_bar * interference, p_max)
    return float(value) if value.ndim == 0 else value
