import json

import pytest

from joint_friction_id import constant
from joint_friction_id.config.experiment import EnvHolder
from joint_friction_id.config.experiment import load_config
from joint_friction_id.config.validation import ConfigError
from joint_friction_id.config.validation import json_path
from joint_friction_id.config.validation import validate_experiment_config
from joint_friction_id.friction.ttypes import GroundTruthKind


def _write(tmp_path, doc, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def test_pickup_non_blank_value():
    assert EnvHolder.pickup_non_blank_value(None, "  ", "knee ") == "knee"
    assert EnvHolder.pickup_non_blank_value(0, 5) == 0
    assert EnvHolder.pickup_non_blank_value(None, "") is None


@pytest.mark.parametrize(
    "doc, path",
    [
        ({"fit": {"learning_rate": -1}}, "$.fit.learning_rate"),
        ({"fit": {"epochs": 0}}, "$.fit.epochs"),
        ({"log_rate": 250}, "$.log_rate"),
        ({"pipeline": {"filter_order": 3}}, "$.pipeline.filter_order"),
        ({"eval": {"kp_bounds": [1.0]}}, "$.eval.kp_bounds"),
        ({"eval": {"models": ["NONE", "LUGRE"]}}, "$.eval.models[1]"),
        ({"eval": {"moment_iterations": 0}}, "$.eval.moment_iterations"),
        ({"pinn": {"lambda": 1.5}}, "$.pinn.lambda"),
    ],
)
def test_schema_errors_name_the_path(doc, path):
    with pytest.raises(ConfigError) as e:
        validate_experiment_config(doc)
    assert e.value.path == path
    assert str(e.value).startswith(path + ": ")


def test_unknown_key_is_rejected():
    with pytest.raises(ConfigError) as e:
        validate_experiment_config({"fit": {"learnig_rate": 0.1}})
    assert e.value.path == "$.fit"


def test_json_path():
    assert json_path([]) == "$"
    assert json_path(["eval", "models", 0]) == "$.eval.models[0]"


def test_seed_is_required(tmp_path):
    with pytest.raises(ConfigError) as e:
        load_config(_write(tmp_path, {}), env={})
    assert e.value.path == "$.seed"
    with pytest.raises(ConfigError):
        load_config(seed=-1, env={})


def test_seed_precedence(tmp_path):
    path = _write(tmp_path, {"seed": 5})
    env = {constant.SEED_ENV_NAME: "9"}
    assert load_config(path, seed=3, env=env).seed == 3
    assert load_config(path, env=env).seed == 5
    assert load_config(env=env).seed == 9
    with pytest.raises(ConfigError):
        load_config(env={constant.SEED_ENV_NAME: "nine"})


def test_fixture_precedence(tmp_path):
    path = _write(tmp_path, {"fixture": "knee"})
    env = {constant.FIXTURE_ENV_NAME: "ankle"}
    assert load_config(path, seed=1, fixture="ankle", env=env).fixture_name == "ankle"
    assert load_config(path, seed=1, env=env).fixture_name == "knee"
    assert load_config(seed=1, env={constant.FIXTURE_ENV_NAME: "knee"}).fixture_name == "knee"
    assert load_config(seed=1, env={}).fixture_name == constant.ANKLE_FIXTURE
    with pytest.raises(ConfigError) as e:
        load_config(seed=1, fixture="hip", env={})
    assert e.value.path == "$.fixture"


def test_missing_files(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "absent.json"), seed=1, env={})
    path = _write(tmp_path, {"excitation": {"manifest": "nowhere.json"}})
    with pytest.raises(ConfigError) as e:
        load_config(path, seed=1, env={})
    assert e.value.path == "$.excitation.manifest"

    broken = tmp_path / "broken.json"
    broken.write_text("{seed: 1")
    with pytest.raises(ConfigError):
        load_config(str(broken), seed=1, env={})


def test_hash_covers_resolved_values(tmp_path):
    path = _write(tmp_path, {"fit": {"epochs": 10}})
    a = load_config(path, seed=1, env={})
    b = load_config(path, seed=1, env={})
    c = load_config(path, seed=2, env={})
    assert a.config_hash() == b.config_hash()
    assert a.config_hash() != c.config_hash()
    assert a.provenance().seed == 1
    assert len(a.config_hash()) == 16


def test_pinn_config_resolution(tmp_path):
    doc = {"fixture": "knee", "pinn": {"lambda": 0.3, "epochs": 5}}
    conf = load_config(_write(tmp_path, doc), seed=11, env={}).pinn_config()
    assert conf.lam == 0.3
    assert conf.epochs == 5
    assert conf.seed == 11
    assert conf.history_length == 22

    doc = {"fixture": "knee", "pinn": {"preset": "ankle"}}
    conf = load_config(_write(tmp_path, doc), seed=11, env={}).pinn_config()
    assert conf.history_length == 20


def test_fixture_overrides(tmp_path):
    doc = {
        "joint": {"stiffness": 1e6},
        "friction": {"kind": "scv", "hysteresis_gain": 0.0},
        "excitation": {"noise": False},
    }
    fixture = load_config(_write(tmp_path, doc), seed=1, env={}).fixture()
    assert fixture.params.stiffness == 1e6
    assert fixture.ground_truth.kind == GroundTruthKind.SCV
    assert not fixture.noise.enabled


def test_fit_and_eval_settings(tmp_path):
    doc = {
        "fit": {"epochs": 20, "lr_schedule": "cosine"},
        "eval": {
            "models": ["NONE", "SCV"],
            "kp_bounds": [10, 100],
            "tracking_duration": 1.0,
            "settle_time": 0.5,
            "displacement_threshold": 0.01,
        },
    }
    config = load_config(_write(tmp_path, doc), seed=4, env={})
    fit = config.fit_settings()
    assert fit.epochs == 20
    assert fit.seed == 4
    assert config.eval_models() == ["NONE", "SCV"]
    settings = config.eval_settings()
    assert settings.kp_bounds == (10, 100)
    assert settings.displacement_threshold == 0.01
    assert settings.loop.seed == 4
    assert load_config(seed=4, env={}).eval_models() == ["NONE", "CV", "SCV", "PINN"]


def test_inconsistent_values(tmp_path):
    doc = {"eval": {"tracking_duration": 1.0, "settle_time": 2.0}}
    with pytest.raises(ConfigError):
        load_config(_write(tmp_path, doc), seed=1, env={})


def test_trajectories_limit(tmp_path):
    doc = {"excitation": {"max_trajectories": 3, "include_ramps": False}}
    config = load_config(_write(tmp_path, doc), seed=1, env={})
    assert len(config.trajectories()) == 3
