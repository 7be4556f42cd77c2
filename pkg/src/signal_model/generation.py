"""Random scenario and spreading-code generation."""

import logging
from typing import Literal, Optional

import numpy as np

from ..exceptions import InvalidInputError
from .models import Scenario, ScenarioConfig, SpreadingMatrix

logger = logging.getLogger(__name__)

CodeKind = Literal["binary", "complex-gaussian-normalized"]


def derive_seed(master_seed: int, *keys: int) -> int:
    """Derive an independent 32-bit seed from a master seed and integer keys."""
    sequence = np.random.SeedSequence([int(master_seed), *(int(key) for key in keys)])
    return int(sequence.generate_state(1)[0])


def generate_scenario(config: ScenarioConfig, seed: int) -> Scenario:
    """
    Draw user positions and complex fading for one uplink realization.

    Distances are uniform in [distance_min, distance_max]; each channel is a
    circular complex Gaussian g_k with variance distance**(-path_loss_exponent),
    split into h_k = |g_k| and phi_k = arg(g_k).

    Args:
        config: Scenario parameters
        seed: RNG seed; equal seeds give identical scenarios

    Returns:
        Scenario with every user starting at ``config.initial_power`` (p_max by default)
    """
    rng = np.random.default_rng(seed)
    distances = rng.uniform(config.distance_min, config.distance_max, size=config.K)
    variance = distances ** (-config.path_loss_exponent)
    gains = np.sqrt(variance / 2.0) * (rng.standard_normal(config.K) + 1j * rng.standard_normal(config.K))
    # a zero draw has probability zero but would break h_k > 0
    gains[gains == 0] = np.finfo(float).tiny

    power = config.initial_power if config.initial_power is not None else config.p_max
    scenario = Scenario(
        K=config.K,
        N=config.N,
        p=np.full(config.K, power),
        h=np.abs(gains),
        phi=np.angle(gains),
        noise_psd=config.noise_psd,
        p_max=np.full(config.K, config.p_max),
    )
    logger.debug("Generated scenario K=%d N=%d seed=%d", config.K, config.N, seed)
    return scenario


def generate_codes(N: int, K: int, kind: CodeKind = "binary", seed: Optional[int] = None) -> SpreadingMatrix:
    """
    Draw K random unit-norm spreading codes of length N.

    ``binary`` codes have entries in {-1/sqrt(N), +1/sqrt(N)};
    ``complex-gaussian-normalized`` codes are normalized circular Gaussian vectors.
    """
    if N < 1 or K < 1:
        raise InvalidInputError(f"code dimensions must be positive, got N={N}, K={K}")
    rng = np.random.default_rng(seed)
    if kind == "binary":
        columns = rng.choice([-1.0, 1.0], size=(N, K)) / np.sqrt(N)
        return SpreadingMatrix(columns=columns.astype(complex))
    if kind == "complex-gaussian-normalized":
        columns = rng.standard_normal((N, K)) + 1j * rng.standard_normal((N, K))
        return SpreadingMatrix(columns=columns / np.linalg.norm(columns, axis=0))
    raise InvalidInputError(f"unknown code kind: {kind}")


def received_power_scenario(
    a_sq,
    N: int,
    noise_psd: float,
    seed: Optional[int] = None,
) -> Scenario:
    """
    Build a unit-gain scenario whose WL received powers 2 p_k h_k^2 equal ``a_sq``.

    Channel phases are drawn uniformly at random; p_max equals the transmit power.
    """
    a_sq = np.asarray(a_sq, dtype=float)
    rng = np.random.default_rng(seed)
    powers = a_sq / 2.0
    return Scenario(
        K=a_sq.size,
        N=N,
        p=powers,
        h=np.ones(a_sq.size),
        phi=rng.uniform(-np.pi, np.pi, size=a_sq.size),
        noise_psd=noise_psd,
        p_max=powers,
    )
