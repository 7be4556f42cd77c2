"""End-to-end runs of the code iteration to its fixed points."""

import numpy as np
import pytest

from src.code_game import (
    IterationSchedule,
    capacity_metrics,
    optimal_eigenvalue_profile,
    run_to_fixed_point,
)
from src.signal_model import (
    Scenario,
    SpreadingMatrix,
    augment,
    augmented_covariance,
    generate_codes,
    received_power_scenario,
)

OVERSIZED_POWERS = [11.51, 7.94] + [1.0] * 10


def _random_power_setup(K: int, N: int, seed: int, target: float = None):
    rng = np.random.default_rng(seed)
    a_sq = rng.uniform(0.5, 1.5, size=K)
    if target is not None:
        a_sq *= np.sqrt(target / np.sum(a_sq ** 2))
    scenario = received_power_scenario(a_sq, N, noise_psd=0.05, seed=seed + 1)
    codes = generate_codes(N, K, "binary", seed=seed + 2)
    return scenario, codes


def _augmented_gram(report, scenario):
    signatures = augment(report.codes.columns, scenario.phi)
    return (signatures.conj().T @ signatures).real


class TestEscape:

    def test_shared_dimension_is_left(self):
        # both users start on the same augmented signature: a fixed point that is not optimal
        scenario = Scenario(N=1, p=[0.5, 0.5], h=[1.0, 1.0], phi=[0.0, 0.0], noise_psd=0.05, p_max=1.0)
        codes = SpreadingMatrix(columns=np.array([[1.0, 1.0]], dtype=complex))
        schedule = IterationSchedule(max_sweeps=500, seed=3)
        report = run_to_fixed_point(scenario, codes, schedule, "wl")
        assert report.converged
        assert report.perturbations >= 1
        assert report.wl_twsc == pytest.approx(0.5, abs=1e-6)

    def test_stuck_without_perturbation(self):
        scenario = Scenario(N=1, p=[0.5, 0.5], h=[1.0, 1.0], phi=[0.0, 0.0], noise_psd=0.05, p_max=1.0)
        codes = SpreadingMatrix(columns=np.array([[1.0, 1.0]], dtype=complex))
        schedule = IterationSchedule(max_sweeps=50, perturbation_eps=0.0)
        report = run_to_fixed_point(scenario, codes, schedule, "wl")
        assert report.converged
        assert report.perturbations == 0
        assert report.wl_twsc == pytest.approx(1.0)

    def test_trace_recorded(self):
        scenario, codes = _random_power_setup(3, 2, seed=4)
        report = run_to_fixed_point(scenario, codes, IterationSchedule(max_sweeps=20, record_trace=True))
        assert len(report.trace) == report.sweeps_used
        assert [point.sweep for point in report.trace] == list(range(1, report.sweeps_used + 1))

    def test_sweep_limit_reported(self):
        scenario, codes = _random_power_setup(6, 2, seed=5)
        report = run_to_fixed_point(scenario, codes, IterationSchedule(max_sweeps=1, tol=1e-15))
        assert not report.converged
        assert report.sweeps_used == 1


@pytest.mark.slow
class TestOrthonormality:

    @pytest.mark.parametrize("K", [10, 20])
    def test_wl_augmented_set_becomes_orthonormal(self, K):
        scenario, codes = _random_power_setup(K, 15, seed=K)
        report = run_to_fixed_point(scenario, codes, IterationSchedule(), "wl")
        assert report.converged
        gram = _augmented_gram(report, scenario)
        assert np.abs(gram - np.eye(K)).max() < 1e-6

    def test_linear_set_becomes_orthonormal_when_underloaded(self):
        scenario, codes = _random_power_setup(10, 15, seed=10)
        report = run_to_fixed_point(scenario, codes, IterationSchedule(), "linear")
        assert report.converged
        eigenvalues = np.linalg.eigvalsh(report.codes.gram())
        assert np.abs(eigenvalues - 1.0).max() < 1e-6

    def test_linear_set_cannot_be_orthonormal_when_overloaded(self):
        scenario, codes = _random_power_setup(20, 15, seed=20)
        report = run_to_fixed_point(scenario, codes, IterationSchedule(max_sweeps=500), "linear")
        assert np.linalg.eigvalsh(report.codes.gram()).max() >= 1.05

    def test_fixed_point_signatures_are_eigenvectors(self):
        scenario, codes = _random_power_setup(20, 15, seed=20)
        report = run_to_fixed_point(scenario, codes, IterationSchedule(), "wl")
        Ma = augmented_covariance(scenario, report.codes)
        for s_a in augment(report.codes.columns, scenario.phi).T:
            image = Ma @ s_a
            assert np.linalg.norm(image - np.vdot(s_a, image) * s_a) < 1e-6


@pytest.mark.slow
class TestCorrelationBound:

    @pytest.mark.parametrize("K,target", [(10, 5.36), (20, 12.08)])
    def test_wl_reaches_bound(self, K, target):
        scenario, codes = _random_power_setup(K, 15, seed=K, target=target)
        report = run_to_fixed_point(scenario, codes, IterationSchedule(), "wl")
        assert report.wl_twsc == pytest.approx(target / 4, abs=1e-4)

    def test_linear_reaches_bound_only_when_underloaded(self):
        scenario, codes = _random_power_setup(10, 15, seed=10, target=5.36)
        report = run_to_fixed_point(scenario, codes, IterationSchedule(), "linear")
        d_sq = scenario.power_diagonal.d_sq
        assert report.twsc == pytest.approx(np.sum(d_sq ** 2), rel=1e-6)

        scenario, codes = _random_power_setup(20, 15, seed=20, target=12.08)
        report = run_to_fixed_point(scenario, codes, IterationSchedule(max_sweeps=500), "linear")
        d_sq = scenario.power_diagonal.d_sq
        assert report.twsc > np.sum(d_sq ** 2) * 1.01


@pytest.mark.slow
class TestOversizedUsers:

    @pytest.fixture(scope="class")
    def report_and_scenario(self):
        scenario = received_power_scenario(OVERSIZED_POWERS, 5, noise_psd=0.05, seed=1)
        codes = generate_codes(5, 12, "binary", seed=2)
        return run_to_fixed_point(scenario, codes, IterationSchedule(), "wl"), scenario

    def test_eigenvalue_profile(self, report_and_scenario):
        report, _ = report_and_scenario
        assert report.converged
        np.testing.assert_allclose(report.eigenvalues, [11.51, 7.94] + [1.25] * 8, rtol=1e-5)

    def test_partition(self, report_and_scenario):
        report, _ = report_and_scenario
        groups = {round(group.eigenvalue, 2): sorted(group.users) for group in report.partition}
        assert groups[11.51] == [0]
        assert groups[7.94] == [1]
        assert groups[1.25] == list(range(2, 12))
        assert report.local_minimum_violations() == []

    def test_groups_are_mutually_orthogonal(self, report_and_scenario):
        report, scenario = report_and_scenario
        gram = _augmented_gram(report, scenario)
        assert abs(gram[0, 1]) < 1e-6
        assert np.abs(gram[:2, 2:]).max() < 1e-6

    def test_capacity_matches_log_det(self, report_and_scenario):
        report, scenario = report_and_scenario
        profile = optimal_eigenvalue_profile(scenario.power_diagonal.a_sq, 10)
        metrics = capacity_metrics(profile, scenario.noise_psd, scenario.K)
        signatures = augment(report.codes.columns, scenario.phi)
        correlation = (signatures * scenario.power_diagonal.a_sq) @ signatures.conj().T
        _, logdet = np.linalg.slogdet(np.eye(10) + correlation / scenario.noise_variance)
        assert metrics.c_sum == pytest.approx(logdet.real, abs=1e-6)
        assert report.c_sum == pytest.approx(metrics.c_sum, abs=1e-6)
