import json

import pytest

from ccorder.config import (
    PRESETS,
    dump_json,
    experiment_from_dict,
    experiment_to_dict,
    load_experiment,
    load_scenario,
    preset,
    scenario,
    scenario_from_dict,
    scenario_to_dict,
)
from ccorder.datagen import SpatialAR1, SpatialMA, UlaSteering, White
from ccorder.errors import ConfigError


@pytest.mark.parametrize("name", PRESETS)
def test_presets_round_trip(name, tmp_path):
    spec = preset(name, trials=7, seed=3)
    doc = experiment_to_dict(spec)
    assert doc["schema"] == 1
    path = tmp_path / "e.json"
    dump_json(doc, path)
    back = load_experiment(path)
    assert back == spec
    assert load_scenario(path) == spec.scenario
    for _, cfg in spec.points():
        assert cfg.d + cfg.f_x <= cfg.n


def test_scenario_round_trip_all_models():
    for noise in (White(0.3), SpatialMA(), SpatialAR1(0.5, 0.75)):
        for mix in (None, UlaSteering((1.0, 2.0, 3.0), (4.0, 5.0, 6.0))):
            cfg = scenario(10, 10, 30, (0.9, 0.7), 2.0, 1, 1, noise=noise, mixing=mix, rho_jitter=0.01)
            doc = json.loads(json.dumps(scenario_to_dict(cfg)))
            assert scenario_from_dict(doc) == cfg


def test_scenario_helper_uses_variances():
    cfg = scenario(6, 6, 20, (0.5,), 4.0, 2, 1, indep_var=9.0)
    assert cfg.sigma_x == (2.0, 3.0, 3.0) and cfg.sigma_y == (2.0, 3.0)


def test_fig5_preset_matches_setup():
    spec = preset("fig5")
    cfg = spec.scenario
    assert (cfg.n, cfg.m, cfg.d, cfg.f_x, cfg.f_y) == (40, 40, 2, 3, 4)
    assert cfg.rho == (0.8, 0.7)
    assert isinstance(cfg.noise, SpatialMA)
    assert spec.sweep.param == "M"


@pytest.mark.parametrize("doc", [
    {"schema": 2},
    {"scenario": {}},
    {"schema": 1, "scenario": {"n": 4}},
])
def test_bad_documents(doc):
    with pytest.raises(ConfigError):
        experiment_from_dict(doc)


def test_unknown_keys_and_models():
    doc = scenario_to_dict(scenario(4, 4, 10, (), 1.0, 0, 0))
    with pytest.raises(ConfigError):
        scenario_from_dict({**doc, "colour": "red"})
    with pytest.raises(ConfigError):
        scenario_from_dict({**doc, "noise": {"type": "pink"}})


def test_unknown_preset_and_bad_files(tmp_path):
    with pytest.raises(ConfigError, match="available"):
        preset("fig99")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_experiment(bad)
    with pytest.raises(ConfigError):
        load_experiment(tmp_path / "missing.json")
