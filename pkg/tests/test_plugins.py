"""Tests for experiment registration, parameter validation and runs."""

import pytest

from core.exceptions import ConfigError
from plugins.born import BornExperiment, BornParams
from plugins.diffuse import DiffuseExperiment, DiffuseParams
from plugins.action import ActionExperiment
from plugins.metric import MetricExperiment
from plugins.packet import PacketExperiment
from plugins.registry import RUN_ORDER, ExperimentRegistry
from plugins.spin import SpinExperiment, SpinParams
from plugins.uncertainty import UncertaintyExperiment


@pytest.fixture
def registry() -> ExperimentRegistry:
    fresh = ExperimentRegistry()
    fresh.discover_experiments()
    return fresh


class TestRegistry:
    def test_discovery_reports_new_ids_once(self):
        fresh = ExperimentRegistry()
        assert fresh.discover_experiments() == RUN_ORDER
        assert fresh.discover_experiments() == []
        assert len(fresh.list_experiments()) == len(RUN_ORDER)

    def test_register_returns_definition(self):
        definition = ExperimentRegistry().register(SpinExperiment)
        assert definition.experiment_id == "spin"

    def test_discovers_every_experiment_in_run_order(self, registry):
        assert [d.experiment_id for d in registry.list_experiments()] == RUN_ORDER

    def test_schemas_forbid_unknown_keys(self, registry):
        for definition in registry.list_experiments():
            assert definition.config_schema["additionalProperties"] is False

    def test_duplicate_registration(self, registry):
        with pytest.raises(ValueError):
            registry.register(BornExperiment)

    def test_unknown_experiment(self, registry):
        assert registry.get_experiment("nope") is None
        assert isinstance(registry.get_experiment("born"), BornExperiment)


class TestParameters:
    def test_unknown_key_points_at_key(self):
        with pytest.raises(ConfigError) as excinfo:
            BornExperiment().parse_params({"bogus": 1})
        assert excinfo.value.path == "/parameters/bogus"

    def test_out_of_range_value(self):
        with pytest.raises(ConfigError) as excinfo:
            BornExperiment().parse_params({"sigma": -1.0}, "/parameters/born")
        assert excinfo.value.path == "/parameters/born/sigma"
        assert excinfo.value.exit_code == 2

    def test_reach_must_fit_the_grid(self):
        with pytest.raises(ConfigError) as excinfo:
            BornExperiment().parse_params({"sigma": 2.0, "reach": 4.0})
        assert excinfo.value.path == "/parameters"

    def test_absorption_radius_within_step(self):
        with pytest.raises(ConfigError):
            DiffuseExperiment().parse_params({"step_len": 0.02, "absorb_tol": 0.05})

    def test_validate_config(self):
        assert BornExperiment().validate_config({"sigma": 0.5}) == (True, "Configuration is valid")
        valid, message = BornExperiment().validate_config({"sigma": "wide"})
        assert not valid
        assert "/parameters/sigma" in message


class TestBornExperiment:
    def test_all_checks_pass(self):
        result = BornExperiment().run(BornParams(), seed=0)
        failed = [check.name for check in result.checks if not check.passed]
        assert failed == []
        assert result.tables[0].name == "born_sweep"
        assert len(result.tables[0].rows) == 21

    def test_fine_sweep_of_narrow_states(self):
        result = BornExperiment().run(BornParams(sigma=0.5, sweep_points=101), seed=0)
        assert result.passed
        assert len(result.tables[0].rows) == 101


class TestSpinExperiment:
    def test_exact_checks(self):
        params = SpinParams(n_states=2, n_perturbations=4)
        result = SpinExperiment().run(params, seed=3)
        outcome = {check.name: check.passed for check in result.checks}
        for name in ("geodesic_residual", "k_speed_unit", "neighboring_phases", "ellipsoid_embedding"):
            assert outcome[name], name

    def test_same_seed_same_result(self):
        params = SpinParams(n_states=2, n_perturbations=4)
        first = SpinExperiment().run(params, seed=5)
        second = SpinExperiment().run(params, seed=5)
        assert first.model_dump() == second.model_dump()


class TestDiffuseExperiment:
    def test_reproducible_and_self_absorbing(self):
        params = DiffuseParams(n_trials=100, start_probabilities=[0.5, 0.9], invariance_probability=0.9)
        first = DiffuseExperiment().run(params, seed=7)
        second = DiffuseExperiment().run(params, seed=7)
        assert first.model_dump() == second.model_dump()
        assert next(c for c in first.checks if c.name == "self_target").passed
        assert first.tables[0].columns[0] == "start_probability"
        assert len(first.tables[0].rows) == 4


@pytest.mark.parametrize(
    "experiment_class",
    [MetricExperiment, ActionExperiment, PacketExperiment, UncertaintyExperiment],
    ids=["metric", "action", "packet", "uncertainty"],
)
def test_default_run_passes(experiment_class):
    experiment = experiment_class()
    result = experiment.run(experiment.parse_params({}), seed=0)
    assert [check.name for check in result.checks if not check.passed] == []
