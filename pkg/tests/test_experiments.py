"""Tests for experiment configs, Monte-Carlo orchestration, dataset export and the CLI."""

import json
import math
from functools import partial

import pandas as pd
import pytest

from src.exceptions import InvalidInputError, TrialFailedError
from src.experiments import (
    DatasetWriter,
    ExperimentConfig,
    config_hash,
    ee_game_dataset,
    lsa_dataset,
    lsa_trial,
    monte_carlo,
    relative_utility_error,
    run_figure,
    trial_seed,
    write_dataset,
)
from src.experiments.cli import main
from src.power_game import GameSchedule, GameVariant, UtilityConfig
from src.signal_model import ScenarioConfig


def _square_task(seed: int) -> dict:
    return {"seed_mod": float(seed % 97), "one": 1.0}


def _failing_task(seed: int) -> dict:
    raise RuntimeError("boom")


def _small_lsa_task():
    return partial(
        lsa_trial,
        scenario_config=ScenarioConfig(K=4, N=8),
        detections=["wl", "linear"],
        utility_config=UtilityConfig(),
        schedule=GameSchedule(),
        code_kind="binary",
    )


class TestMonteCarlo:

    def test_single_trial_equals_direct_call(self):
        result = monte_carlo(_square_task, trials=1, master_seed=5)
        assert result.mean("seed_mod") == _square_task(trial_seed(5, 0))["seed_mod"]

    def test_summary_statistics(self):
        result = monte_carlo(_square_task, trials=10, master_seed=1, keep_trials=True)
        assert result.mean("one") == 1.0
        assert result.std("one") == 0.0
        assert len(result.trial_frame) == 10
        assert result.mean("seed_mod") == pytest.approx(result.trial_frame["seed_mod"].mean())

    def test_independent_of_worker_count(self):
        task = _small_lsa_task()
        serial = monte_carlo(task, trials=4, master_seed=3, workers=1)
        parallel = monte_carlo(task, trials=4, master_seed=3, workers=2)
        pd.testing.assert_frame_equal(serial.summary, parallel.summary)

    def test_failure_carries_seed(self):
        with pytest.raises(TrialFailedError) as info:
            monte_carlo(_failing_task, trials=3, master_seed=8)
        assert info.value.trial_index == 0
        assert info.value.seed == trial_seed(8, 0)
        assert "seed=" in str(info.value)

    def test_rejects_zero_trials(self):
        with pytest.raises(InvalidInputError):
            monte_carlo(_square_task, trials=0, master_seed=0)

    def test_trial_seeds_are_stable(self):
        assert trial_seed(1, 4) == trial_seed(1, 4)
        assert trial_seed(1, 4) != trial_seed(1, 5)


class TestConfig:

    def test_empty_variant_list(self):
        with pytest.raises(ValueError):
            ExperimentConfig(variants=[])

    def test_bad_user_counts(self):
        with pytest.raises(ValueError):
            ExperimentConfig(user_counts=[0, 2])

    def test_presets(self):
        config = ExperimentConfig().resolved("fig8")
        assert config.scenario.N == 64
        assert config.scenario.path_loss_exponent == 3.0
        assert config.user_counts == [32, 64, 96, 128]
        assert ExperimentConfig().resolved("fig4").user_counts == list(range(2, 23, 2))

    def test_explicit_scenario_kept(self):
        config = ExperimentConfig(scenario=ScenarioConfig(K=3, N=2)).resolved("fig1")
        assert config.scenario.N == 2

    def test_full_scale(self):
        assert ExperimentConfig(full_scale=True).effective_trials == 100_000
        assert ExperimentConfig(trials=7).effective_trials == 7

    def test_hash_ignores_parallelism(self):
        assert config_hash(ExperimentConfig(workers=1)) == config_hash(ExperimentConfig(workers=4))
        assert config_hash(ExperimentConfig(master_seed=1)) != config_hash(ExperimentConfig(master_seed=2))

    def test_from_file(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"figure": "fig3", "trials": 5, "variants": ["PR-WL"]}), encoding="utf-8")
        config = ExperimentConfig.from_file(str(path))
        assert config.figure == "fig3"
        assert [variant.value for variant in config.variants] == ["PR-WL"]


class TestExport:

    def test_writes_csv_and_metadata(self, tmp_path):
        frame = pd.DataFrame({"K": [2, 4], "value": [0.5, 0.25]})
        config = ExperimentConfig(master_seed=9)
        path = DatasetWriter(str(tmp_path / "out")).write(frame, "demo", config, command="figure")
        pd.testing.assert_frame_equal(pd.read_csv(path), frame)
        metadata = json.loads((tmp_path / "out" / "demo.meta.json").read_text(encoding="utf-8"))
        assert metadata["config_hash"] == config_hash(config)
        assert metadata["master_seed"] == 9
        assert metadata["command"] == "figure"
        assert metadata["rows"] == 2

    def test_write_dataset_returns_path(self, tmp_path):
        path = write_dataset(pd.DataFrame({"x": [1.0]}), str(tmp_path), "single", ExperimentConfig(), "lsa")
        assert path.name == "single.csv"
        assert path.exists()


def _small_code_config(**extra) -> ExperimentConfig:
    return ExperimentConfig(
        scenario=ScenarioConfig(K=3, N=3),
        user_counts=[3],
        code_schedule={"max_sweeps": 40},
        **extra,
    )


class TestFigures:

    def test_unknown_figure(self):
        with pytest.raises(InvalidInputError):
            run_figure("fig9")

    def test_orthonormality_columns(self):
        result = run_figure("fig1", _small_code_config())
        assert list(result.frame.columns) == ["K", "variant", "sweep", "gram_min", "gram_max"]
        assert set(result.frame["variant"]) == {"linear", "wl"}

    def test_deterministic(self):
        first = run_figure("fig2", _small_code_config(master_seed=4)).frame
        second = run_figure("fig2", _small_code_config(master_seed=4)).frame
        pd.testing.assert_frame_equal(first, second)

    def test_energy_efficiency_columns(self):
        config = ExperimentConfig(
            scenario=ScenarioConfig(K=2, N=4), user_counts=[2, 4], trials=2, variants=["P-WL", "PR-WL"]
        )
        frame = run_figure("fig4", config).frame
        assert list(frame.columns) == ["K", "variant", "utility_bpJ_mean", "utility_bpJ_std"]
        assert len(frame) == 4

    def test_relative_utility_error_compares_means(self):
        assert relative_utility_error([1.0, 3.0], [2.0, 2.0]) == 0.0
        assert relative_utility_error([3.0, 3.0], [1.0, 3.0]) == pytest.approx(0.5)

    def test_relative_utility_error_ignores_near_zero_users(self):
        assert relative_utility_error([1.0, 1e-4], [1.0, 1e-12]) < 1e-3

    def test_relative_utility_error_without_utility(self):
        assert math.isnan(relative_utility_error([1.0], [0.0]))

    @pytest.mark.parametrize("builder", [ee_game_dataset, lsa_dataset])
    def test_datasets_independent_of_worker_count(self, builder):
        base = ExperimentConfig(
            scenario=ScenarioConfig(K=3, N=4), trials=3, master_seed=6, variants=["P-WL", "PR-linear"]
        )
        serial = builder(base.model_copy(update={"workers": 1}))
        parallel = builder(base.model_copy(update={"workers": 2}))
        assert serial.keys() == parallel.keys()
        for name in serial:
            pd.testing.assert_frame_equal(serial[name], parallel[name])
            assert list(serial[name]["trial"].unique()) == [0, 1, 2]

    @pytest.mark.slow
    def test_improved_prediction_beats_plain_at_high_load(self):
        config = ExperimentConfig(trials=20, user_counts=[128], detections=["wl"])
        frame = run_figure("fig8", config).frame.set_index("predictor")
        assert frame.loc["improved", "mean_relative_error"] < frame.loc["plain", "mean_relative_error"]

    @pytest.mark.slow
    def test_max_power_fraction_ordering(self):
        variants = [GameVariant.PRC_WL, GameVariant.PR_WL, GameVariant.PR_LINEAR, GameVariant.P_LINEAR]
        config = ExperimentConfig(
            scenario=ScenarioConfig(K=2, N=4), user_counts=[2, 4, 6, 8], trials=50, variants=variants
        )
        frame = run_figure("fig7", config).frame
        for K, group in frame.groupby("K"):
            fractions = group.set_index("variant").loc[[v.value for v in variants], "fraction_at_max_mean"]
            assert list(fractions) == sorted(fractions), f"ordering broken at K={K}"

    @pytest.mark.slow
    def test_oversized_eigenvalue_columns(self):
        frame = run_figure("fig3", ExperimentConfig(code_schedule={"max_sweeps": 200})).frame
        assert [column for column in frame.columns if column.startswith("eig_")] == [f"eig_{i}" for i in range(1, 11)]


class TestCli:

    def _config_file(self, tmp_path, payload) -> str:
        path = tmp_path / "config.json"
        path.write_text(json.dumps(payload), encoding="utf-8")
        return str(path)

    def test_lsa_command(self, tmp_path):
        config = self._config_file(tmp_path, {"scenario": {"K": 4, "N": 8}, "detections": ["wl", "linear"]})
        out = tmp_path / "results"
        assert main(["lsa", "--config", config, "--out", str(out), "--trials", "1"]) == 0
        frame = pd.read_csv(out / "lsa_predictions.csv")
        assert len(frame) == 8
        assert (out / "lsa_predictions.meta.json").exists()

    def test_ee_game_is_reproducible(self, tmp_path):
        config = self._config_file(tmp_path, {"scenario": {"K": 3, "N": 4}, "variants": ["P-WL", "PR-linear"]})
        for name in ("a", "b"):
            argv = ["ee-game", "--config", config, "--out", str(tmp_path / name), "--trials", "2", "--seed", "11"]
            assert main(argv) == 0
        first = (tmp_path / "a" / "ee_game_users.csv").read_bytes()
        second = (tmp_path / "b" / "ee_game_users.csv").read_bytes()
        assert first == second

    def test_code_game_command(self, tmp_path):
        config = self._config_file(
            tmp_path,
            {"scenario": {"K": 3, "N": 2}, "detections": ["wl", "linear"], "code_schedule": {"max_sweeps": 30}},
        )
        out = tmp_path / "cg"
        assert main(["code-game", "--config", config, "--out", str(out)]) == 0
        summary = pd.read_csv(out / "code_game_summary.csv")
        assert list(summary["variant"]) == ["wl", "linear"]

    def test_figure_command(self, tmp_path):
        config = self._config_file(
            tmp_path,
            {"scenario": {"K": 3, "N": 3}, "user_counts": [3], "code_schedule": {"max_sweeps": 30}},
        )
        out = tmp_path / "fig"
        assert main(["figure", "fig1", "--config", config, "--out", str(out)]) == 0
        metadata = json.loads((out / "fig1.meta.json").read_text(encoding="utf-8"))
        assert metadata["figure"] == "fig1"

    def test_missing_config_file(self, tmp_path):
        assert main(["lsa", "--config", str(tmp_path / "missing.json"), "--out", str(tmp_path)]) == 2

    def test_invalid_config(self, tmp_path):
        config = self._config_file(tmp_path, {"variants": []})
        assert main(["ee-game", "--config", config, "--out", str(tmp_path)]) == 2

    def test_infeasible_load_is_reported(self, tmp_path):
        config = self._config_file(tmp_path, {"scenario": {"K": 40, "N": 4}, "detections": ["linear"]})
        assert main(["lsa", "--config", config, "--out", str(tmp_path), "--trials", "1"]) == 1

    def test_solver_input_error_is_reported_as_bad_input(self, tmp_path, monkeypatch):
        def reject(command, config):
            raise InvalidInputError("powers must be positive")

        monkeypatch.setattr("src.experiments.cli._datasets", reject)
        assert main(["code-game", "--out", str(tmp_path)]) == 2
