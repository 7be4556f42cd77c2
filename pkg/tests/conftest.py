"""Shared fixtures for the solver tests."""

import numpy as np
import pytest

from src.signal_model import Scenario, SpreadingMatrix


def make_scenario(K: int, N: int, seed: int = 0, noise_psd: float = 0.1) -> Scenario:
    """Random scenario with O(1) powers and gains so SINRs stay well conditioned."""
    rng = np.random.default_rng(seed)
    return Scenario(
        N=N,
        p=rng.uniform(0.5, 1.5, size=K),
        h=rng.uniform(0.5, 1.5, size=K),
        phi=rng.uniform(-np.pi, np.pi, size=K),
        noise_psd=noise_psd,
        p_max=2.0,
    )


def make_codes(N: int, K: int, seed: int = 0) -> SpreadingMatrix:
    rng = np.random.default_rng(seed)
    columns = rng.standard_normal((N, K)) + 1j * rng.standard_normal((N, K))
    return SpreadingMatrix(columns=columns / np.linalg.norm(columns, axis=0))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def single_user():
    """K=1, p=h=1, phi=0, N0=0.5 and s=[1, 0]."""
    scenario = Scenario(N=2, p=[1.0], h=[1.0], phi=[0.0], noise_psd=0.5, p_max=1.0)
    codes = SpreadingMatrix(columns=np.array([[1.0], [0.0]], dtype=complex))
    return scenario, codes


@pytest.fixture
def instance():
    """Random N=4, K=6 instance."""
    return make_scenario(6, 4, seed=7), make_codes(4, 6, seed=8)
