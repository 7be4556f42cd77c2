"""Tests for the efficiency function, target SINR, interference and the EE games."""

import math

import numpy as np
import pytest

from src.exceptions import DegenerateEquationError, InvalidInputError
from src.power_game import (
    GameSchedule,
    GameVariant,
    UtilityConfig,
    best_response_power,
    best_unilateral_gain,
    effective_interference,
    efficiency,
    run_ee_game,
    solve_target_sinr,
    utility,
)
from src.receivers import linear_mmse, sinr_linear, sinr_wl, wl_matched_filter, wl_mmse
from src.signal_model import (
    AugmentedSignatureSet,
    Scenario,
    ScenarioConfig,
    SpreadingMatrix,
    generate_codes,
    generate_scenario,
)

from conftest import make_codes, make_scenario

GAMMA_BAR = 6.689


class TestEfficiency:

    def test_limits(self):
        assert efficiency(0.0, 120) == 0.0
        assert efficiency(200.0, 120) == pytest.approx(1.0)

    def test_reference_point(self):
        assert efficiency(GAMMA_BAR, 120) == pytest.approx(0.861, abs=1e-3)

    def test_vectorized(self):
        values = efficiency(np.array([0.0, 1.0, 5.0]), 10)
        assert np.all(np.diff(values) > 0)

    def test_rejects_negative_sinr(self):
        with pytest.raises(InvalidInputError):
            efficiency(-1.0, 10)


class TestTargetSinr:

    def test_reference_packet_length(self):
        target = solve_target_sinr(120)
        assert target.gamma_bar == pytest.approx(6.689, abs=1e-3)
        assert target.gamma_bar_db == pytest.approx(8.25, abs=1e-2)
        assert target.residual < 1e-10

    def test_two_symbol_packets(self):
        target = solve_target_sinr(2)
        assert target.gamma_bar == pytest.approx(1.2564, abs=1e-4)
        assert math.exp(target.gamma_bar) == pytest.approx(1 + 2 * target.gamma_bar, rel=1e-10)

    def test_single_symbol_is_degenerate(self):
        with pytest.raises(DegenerateEquationError):
            solve_target_sinr(1)

    def test_unique_sign_change(self):
        grid = np.linspace(0.01, 50.0, 5000)
        reduced = np.expm1(grid) - 120 * grid
        assert np.count_nonzero(np.diff(np.sign(reduced))) == 1

    def test_grows_with_packet_length(self):
        assert solve_target_sinr(200).gamma_bar > solve_target_sinr(120).gamma_bar


class TestUtility:

    def test_zero_sinr(self):
        assert utility(1.0, 0.0, UtilityConfig()) == 0.0

    def test_inverse_in_power(self):
        config = UtilityConfig()
        assert utility(2.0, 5.0, config) == pytest.approx(utility(1.0, 5.0, config) / 2)

    def test_scales_with_rate_and_overhead(self):
        base = utility(1.0, 5.0, UtilityConfig(M=100))
        assert utility(1.0, 5.0, UtilityConfig(M=100, R=2e5)) == pytest.approx(2 * base)
        assert utility(1.0, 5.0, UtilityConfig(M=100, L=50)) == pytest.approx(base / 2)

    def test_rejects_zero_power(self):
        with pytest.raises(InvalidInputError):
            utility(0.0, 1.0, UtilityConfig())

    def test_overhead_cannot_exceed_packet(self):
        with pytest.raises(ValueError):
            UtilityConfig(M=10, L=20)

    def test_decreasing_in_interference(self):
        config = UtilityConfig()
        values = [utility(1e-3, 1e-3 / I, config) for I in (1e-5, 1e-4, 1e-3)]
        assert values[0] > values[1] > values[2]


class TestBestResponse:

    def test_uncapped(self):
        assert best_response_power(1.0, 2.0, 10.0) == 2.0

    def test_capped(self):
        assert best_response_power(10.0, 2.0, 10.0) == 10.0

    def test_infinite_interference(self):
        assert best_response_power(np.inf, 2.0, 10.0) == 10.0

    def test_continuous(self):
        values = best_response_power(np.linspace(4.9, 5.1, 201), 2.0, 10.0)
        assert np.max(np.abs(np.diff(values))) < 0.01

    def test_rejects_nonpositive(self):
        with pytest.raises(InvalidInputError):
            best_response_power(0.0, 2.0, 1.0)


class TestInterference:

    def test_orthogonal_wl_users(self):
        scenario = Scenario(N=1, p=[1e-3, 1e-3], h=[2.0, 1.0], phi=[0.0, 0.0], noise_psd=0.1, p_max=1.0)
        codes = SpreadingMatrix(columns=np.array([[1.0, 1j]]))
        receiver = wl_matched_filter(scenario, codes, 0)
        assert effective_interference(scenario, codes, receiver, 0, "wl") == pytest.approx(0.1 / 4)

    def test_consistent_with_sinr(self, instance):
        scenario, codes = instance
        for k in range(scenario.K):
            d_a = wl_mmse(scenario, codes, k)
            I_wl = effective_interference(scenario, codes, d_a, k, GameVariant.PR_WL)
            assert sinr_wl(scenario, codes, d_a, k) * I_wl == pytest.approx(scenario.p[k], rel=1e-10)
            d = linear_mmse(scenario, codes, k)
            I_lin = effective_interference(scenario, codes, d, k, "linear")
            assert sinr_linear(scenario, codes, d, k) * I_lin == pytest.approx(scenario.p[k], rel=1e-10)

    def test_scale_invariant(self, instance):
        scenario, codes = instance
        d_a = wl_mmse(scenario, codes, 0).d_a
        assert effective_interference(scenario, codes, 3 * d_a, 0, "wl") == pytest.approx(
            effective_interference(scenario, codes, d_a, 0, "wl"), rel=1e-12
        )

    def test_invisible_user(self, single_user):
        scenario, codes = single_user
        assert effective_interference(scenario, codes, np.array([0.0, 1.0]), 0, "linear") == math.inf


def _unit_gain_scenario(K, seed, p_max=1.0):
    rng = np.random.default_rng(seed)
    return Scenario(
        N=4, p=np.full(K, p_max), h=np.ones(K), phi=rng.uniform(-np.pi, np.pi, size=K),
        noise_psd=2.5e-10, p_max=p_max,
    )


class TestGames:

    def test_code_optimizing_wl_game_removes_interference(self):
        scenario = _unit_gain_scenario(6, seed=1)
        codes = generate_codes(4, 6, "binary", seed=2)
        outcome = run_ee_game(scenario, codes, GameVariant.PRC_WL)
        gamma_bar = solve_target_sinr(120).gamma_bar
        assert outcome.converged
        for user in outcome.users:
            assert user.power == pytest.approx(gamma_bar * 2.5e-10, rel=1e-6)
            assert user.sinr == pytest.approx(gamma_bar, rel=1e-6)
        assert outcome.users[0].power == pytest.approx(1.672e-9, rel=1e-3)

    @pytest.mark.parametrize("variant", list(GameVariant))
    def test_single_user_closed_form(self, variant):
        scenario = _unit_gain_scenario(1, seed=3)
        codes = generate_codes(4, 1, "binary", seed=4)
        outcome = run_ee_game(scenario, codes, variant)
        factor = 1.0 if variant.detection == "wl" else 2.0
        assert outcome.powers[0] == pytest.approx(factor * outcome.gamma_bar * 2.5e-10, rel=1e-9)

    @pytest.mark.parametrize("variant", [GameVariant.P_LINEAR, GameVariant.PR_LINEAR, GameVariant.P_WL, GameVariant.PR_WL])
    def test_users_hit_target_or_cap(self, variant):
        scenario = generate_scenario(ScenarioConfig(K=3, N=4, p_max=1e-6), seed=5)
        codes = generate_codes(4, 3, "binary", seed=6)
        outcome = run_ee_game(scenario, codes, variant)
        assert outcome.converged
        for user in outcome.users:
            if user.at_max_power:
                assert user.sinr < outcome.gamma_bar
            else:
                assert user.sinr == pytest.approx(outcome.gamma_bar, abs=1e-6)

    @pytest.mark.parametrize("variant", list(GameVariant))
    def test_no_profitable_unilateral_deviation(self, variant):
        scenario = generate_scenario(ScenarioConfig(K=3, N=4, p_max=1e-4), seed=7)
        codes = generate_codes(4, 3, "binary", seed=8)
        config = UtilityConfig()
        outcome = run_ee_game(scenario, codes, variant, config)
        assert outcome.converged
        for k in range(scenario.K):
            assert best_unilateral_gain(outcome, k, config) <= 1e-9

    def test_code_optimizing_linear_game_settles_when_overloaded(self):
        scenario = generate_scenario(ScenarioConfig(K=5, N=4), seed=21)
        codes = generate_codes(4, 5, "binary", seed=22)
        outcome = run_ee_game(scenario, codes, GameVariant.PRC_LINEAR)
        assert outcome.converged
        assert outcome.trace[-1] < GameSchedule().tol
        for user in outcome.users:
            if user.at_max_power:
                assert user.sinr < outcome.gamma_bar
            else:
                assert user.sinr == pytest.approx(outcome.gamma_bar, rel=1e-5)

    def test_code_optimizing_equilibrium_independent_of_start(self):
        scenario = generate_scenario(ScenarioConfig(K=6, N=4), seed=23)
        first = run_ee_game(scenario, generate_codes(4, 6, "binary", seed=24), GameVariant.PRC_WL)
        second = run_ee_game(scenario, generate_codes(4, 6, "complex-gaussian-normalized", seed=25), GameVariant.PRC_WL)
        assert first.converged and second.converged
        np.testing.assert_allclose(first.powers, second.powers, rtol=1e-6)
        gram_first = AugmentedSignatureSet.from_codes(first.codes, scenario.phi).gram()
        gram_second = AugmentedSignatureSet.from_codes(second.codes, scenario.phi).gram()
        np.testing.assert_allclose(gram_first, gram_second, atol=1e-6)
        np.testing.assert_allclose(gram_first, np.eye(6), atol=1e-6)

    def test_equilibrium_independent_of_start(self):
        scenario = generate_scenario(ScenarioConfig(K=4, N=4), seed=9)
        codes = generate_codes(4, 4, "binary", seed=10)
        from_single_user = run_ee_game(scenario, codes, GameVariant.PR_WL)
        from_max_power = run_ee_game(
            scenario, codes, GameVariant.PR_WL, schedule=GameSchedule(initial_power="scenario")
        )
        np.testing.assert_allclose(from_single_user.powers, from_max_power.powers, rtol=1e-6)

    def test_wl_detection_needs_less_power(self):
        scenario = generate_scenario(ScenarioConfig(K=5, N=4), seed=11)
        codes = generate_codes(4, 5, "binary", seed=12)
        wl = run_ee_game(scenario, codes, GameVariant.PR_WL)
        linear = run_ee_game(scenario, codes, GameVariant.PR_LINEAR)
        matched = run_ee_game(scenario, codes, GameVariant.P_LINEAR)
        assert wl.mean_utility >= linear.mean_utility >= matched.mean_utility

    def test_round_limit_flags_outcome(self):
        scenario = generate_scenario(ScenarioConfig(K=4, N=2), seed=13)
        codes = generate_codes(2, 4, "binary", seed=14)
        outcome = run_ee_game(scenario, codes, GameVariant.PR_LINEAR, schedule=GameSchedule(max_rounds=1, tol=1e-15))
        assert not outcome.converged
        assert outcome.iterations == 1
        assert len(outcome.trace) == 1

    def test_string_variant_accepted(self):
        scenario = _unit_gain_scenario(2, seed=15)
        outcome = run_ee_game(scenario, make_codes(4, 2, seed=16), "P-WL")
        assert outcome.variant is GameVariant.P_WL

    def test_variant_flags(self):
        assert GameVariant.PRC_WL.optimizes_codes and GameVariant.PRC_WL.optimizes_receiver
        assert not GameVariant.P_LINEAR.optimizes_receiver
        assert GameVariant.PR_LINEAR.detection == "linear"


@pytest.mark.slow
def test_variant_ordering_over_random_scenarios():
    sums = {variant: 0.0 for variant in GameVariant}
    for seed in range(20):
        scenario = generate_scenario(ScenarioConfig(K=8, N=4), seed=100 + seed)
        codes = generate_codes(4, 8, "binary", seed=200 + seed)
        for variant in (GameVariant.PRC_WL, GameVariant.PR_WL, GameVariant.PR_LINEAR, GameVariant.P_LINEAR):
            sums[variant] += run_ee_game(scenario, codes, variant).mean_utility
    assert sums[GameVariant.PRC_WL] >= sums[GameVariant.PR_WL] >= sums[GameVariant.PR_LINEAR] >= sums[GameVariant.P_LINEAR]


@pytest.mark.slow
def test_code_optimizing_linear_game_has_no_two_cycle():
    scenario = generate_scenario(ScenarioConfig(K=14, N=11), seed=300)
    codes = generate_codes(11, 14, "binary", seed=400)
    outcome = run_ee_game(scenario, codes, GameVariant.PRC_LINEAR)
    assert outcome.converged
    assert outcome.trace[-1] < GameSchedule().tol
    for user in outcome.users:
        if not user.at_max_power:
            assert user.sinr == pytest.approx(outcome.gamma_bar, rel=1e-5)


@pytest.mark.slow
def test_code_optimizing_wl_utility_is_flat_up_to_twice_the_dimension():
    utilities = []
    for K in range(2, 9):
        scenario = _unit_gain_scenario(K, seed=30 + K)
        outcome = run_ee_game(scenario, generate_codes(4, K, "binary", seed=40 + K), GameVariant.PRC_WL)
        assert outcome.converged
        utilities.append(outcome.mean_utility)
    np.testing.assert_allclose(utilities, utilities[0], rtol=1e-3)
