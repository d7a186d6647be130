import logging

import jsonschema

from joint_friction_id import constant
from joint_friction_id.friction.ttypes import GroundTruthKind
from joint_friction_id.friction.ttypes import ModelKind

_number = {"type": "number"}
_positive = {"type": "number", "exclusiveMinimum": 0}
_non_negative = {"type": "number", "minimum": 0}
_positive_int = {"type": "integer", "minimum": 1}
_unit_interval = {"type": "number", "minimum": 0, "maximum": 1}
_bounds = {"type": "array", "items": _number, "minItems": 2, "maxItems": 2}


def _object(properties, required=()):
    schema = {"type": "object", "properties": properties, "additionalProperties": False}
    if required:
        schema["required"] = list(required)
    return schema


_joint_schema = _object(
    {
        "reduction_ratio": _positive,
        "torque_constant": _positive,
        "motor_inertia": _positive,
        "load_inertia": _positive,
        "g_amp": _non_negative,
        "stiffness": _positive,
        "damping": _non_negative,
        "s_min": _number,
        "s_max": _number,
        "i_max": _positive,
        "current_time_constant": _non_negative,
    },
)

_friction_params_schema = {
    "type": "object",
    "properties": {
        "model_kind": {"type": "string", "enum": ["CV", "SCV", "cv", "scv"]},
        "k_a": _positive,
        "k_c": _non_negative,
        "k_v": _non_negative,
        "k_s": _non_negative,
        "v_s": _positive,
        "alpha": _positive,
    },
    "required": ["model_kind", "k_a", "k_c", "k_v"],
}

_friction_schema = _object(
    {
        "kind": {
            "type": "string",
            "enum": sorted(GroundTruthKind._NAMES_TO_VALUES) + sorted(
                k.lower() for k in GroundTruthKind._NAMES_TO_VALUES
            ),
        },
        "params": _friction_params_schema,
        "hysteresis_gain": _non_negative,
        "hysteresis_timeconstant": _positive,
    },
)

_excitation_schema = _object(
    {
        "manifest": {"type": "string", "minLength": 1},
        "include_ramps": {"type": "boolean"},
        "include_steps": {"type": "boolean"},
        "max_trajectories": _positive_int,
        "noise": {"type": "boolean"},
    },
)

_pipeline_schema = _object(
    {
        "current_cutoff": _positive,
        "filter_order": {"type": "integer", "enum": [2, 4]},
        "kalman_q": _positive,
        "kalman_r": {"anyOf": [_positive, {"type": "null"}]},
        "kalman_smooth": {"type": "boolean"},
        "include_rotor_inertia": {"type": "boolean"},
    },
)

_fit_schema = _object(
    {
        "learning_rate": _positive,
        "beta1": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
        "beta2": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
        "epsilon": _positive,
        "epochs": _positive_int,
        "batch_size": {"anyOf": [_positive_int, {"type": "null"}]},
        "seed": {"type": "integer", "minimum": 0},
        "lr_schedule": {"type": "string", "enum": ["constant", "cosine"]},
        "lr_min": _positive,
    },
)

_pinn_schema = _object(
    {
        "preset": {"type": "string", "enum": list(constant.SUPPORTED_FIXTURES)},
        "history_length": _positive_int,
        "hidden1": _positive_int,
        "hidden2": _positive_int,
        "dropout_rate": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
        "learning_rate": _positive,
        "batch_size": _positive_int,
        "epochs": _positive_int,
        "lambda": _unit_interval,
        "seed": {"type": "integer", "minimum": 0},
    },
)

_search_schema = _object(
    {
        "n_trials": _positive_int,
        "space": _object(
            {
                "batch_size": _bounds,
                "hidden1": _bounds,
                "hidden2": _bounds,
                "learning_rate": _bounds,
                "history_length": _bounds,
                "lam": _bounds,
                "dropout_rate": _bounds,
                "epochs": _positive_int,
            },
        ),
    },
)

_eval_schema = _object(
    {
        "models": {
            "type": "array",
            "items": {"type": "string", "enum": sorted(ModelKind._NAMES_TO_VALUES)},
            "minItems": 1,
            "uniqueItems": True,
        },
        "tracking_duration": _positive,
        "settle_time": _non_negative,
        "kd": _non_negative,
        "rmse_threshold": _positive,
        "kp_bounds": _bounds,
        "kp_points_per_decade": _positive_int,
        "search_method": {"type": "string", "enum": ["binary", "linear"]},
        "disturbance_amplitude": {"anyOf": [_number, {"type": "null"}]},
        "disturbance_start": _non_negative,
        "displacement_threshold": _positive,
        "moment_iterations": _positive_int,
    },
)

_experiment_schema = _object(
    {
        "fixture": {"type": "string", "enum": list(constant.SUPPORTED_FIXTURES)},
        "seed": {"type": "integer", "minimum": 0},
        "log_rate": {"type": "integer", "enum": list(constant.SUPPORTED_LOG_RATES)},
        "parallelism": _positive_int,
        "joint": _joint_schema,
        "friction": _friction_schema,
        "excitation": _excitation_schema,
        "pipeline": _pipeline_schema,
        "fit": _fit_schema,
        "pinn": _pinn_schema,
        "search": _search_schema,
        "eval": _eval_schema,
    },
)


class ConfigError(Exception):
    """Invalid experiment configuration; path is a JSON path like $.fit.epochs."""

    def __init__(self, path, message):
        super().__init__("{}: {}".format(path, message))
        self.path = path
        self.message = message


def json_path(parts):
    path = "$"
    for part in parts:
        path += "[{}]".format(part) if isinstance(part, int) else ".{}".format(part)
    return path


def validate_experiment_config(conf):
    try:
        jsonschema.validate(conf, schema=_experiment_schema)
    except jsonschema.ValidationError as e:
        path = json_path(e.absolute_path)
        logging.error("invalid experiment config at %s: %s", path, e.message)
        raise ConfigError(path, e.message) from e
