"""实验配置

One JSON document configures every stage. Values resolve as command-line
flag > config file > environment > built-in default; the seed has no
built-in default.
"""
import logging
import os
from dataclasses import dataclass
from dataclasses import field
from dataclasses import replace
from typing import Dict
from typing import List

from joint_friction_id import constant
from joint_friction_id.config.validation import ConfigError
from joint_friction_id.config.validation import validate_experiment_config
from joint_friction_id.control.closed_loop import LoopSettings
from joint_friction_id.evaluation.protocols import EvalSettings
from joint_friction_id.excitation import trajectory
from joint_friction_id.fitting.adam import AdamSettings
from joint_friction_id.friction.ttypes import GroundTruthKind
from joint_friction_id.friction.ttypes import value_of
from joint_friction_id.friction import models
from joint_friction_id.io import json_io
from joint_friction_id.io.table_io import Provenance
from joint_friction_id.pinn.network import PinnConfig
from joint_friction_id.pinn.search import SearchSpace
from joint_friction_id.sigproc.pipeline import PipelineSettings
from joint_friction_id.sim import fixtures
from joint_friction_id.sim.jointsim import FrictionGroundTruth
from joint_friction_id.sim.jointsim import SensorNoise
from joint_friction_id.util import hashing

DEFAULT_EVAL_MODELS = ["NONE", "CV", "SCV", "PINN"]
DEFAULT_N_TRIALS = 8


class EnvHolder:
    @classmethod
    def pickup_non_blank_value(cls, *args):
        """First argument that is neither None nor a blank string."""
        for arg in args:
            if arg is None:
                continue
            if isinstance(arg, str):
                if len(arg.strip()) > 0:
                    return arg.strip()
                continue
            return arg
        return None


def _int_value(name, value, path):
    if value is None or isinstance(value, int):
        return value
    try:
        return int(value)
    except ValueError as e:
        logging.error("invalid %s %s", name, value)
        raise ConfigError(path, "{} must be an integer, got {!r}".format(name, value)) from e


@dataclass
class ExperimentConfig:
    """Resolved configuration of one experiment.

    ``document`` is the validated config with seed and fixture filled in;
    its canonical hash identifies every artifact of the run.
    """

    seed: int
    fixture_name: str
    document: Dict = field(default_factory=dict)
    base_dir: str = "."

    def section(self, name):
        return dict(self.document.get(name, {}))

    @property
    def log_rate(self):
        return self.document.get("log_rate", constant.DEFAULT_LOG_RATE)

    @property
    def parallelism(self):
        return self.document.get("parallelism", 1)

    def config_hash(self):
        return hashing.config_hash(self.document)

    def provenance(self):
        return Provenance(self.config_hash(), self.seed)

    def fixture(self) -> fixtures.JointFixture:
        fixture = fixtures.get_fixture(self.fixture_name)
        joint = self.section("joint")
        if joint:
            fixture = fixture.with_params(**joint)
        friction = self.section("friction")
        if friction:
            gt = fixture.ground_truth
            kind = value_of(GroundTruthKind, friction["kind"]) if "kind" in friction else gt.kind
            params = models.params_from_dict(friction["params"]) if "params" in friction else gt.params
            fixture = fixture.with_ground_truth(
                FrictionGroundTruth(
                    kind=kind,
                    params=params,
                    hysteresis_gain=friction.get("hysteresis_gain", gt.hysteresis_gain),
                    hysteresis_timeconstant=friction.get(
                        "hysteresis_timeconstant",
                        gt.hysteresis_timeconstant,
                    ),
                ),
            )
        if not self.section("excitation").get("noise", True):
            fixture = fixture.with_noise(SensorNoise.disabled())
        return fixture

    def manifest_path(self):
        path = self.section("excitation").get("manifest")
        if path is None:
            return None
        return path if os.path.isabs(path) else os.path.join(self.base_dir, path)

    def trajectories(self) -> List[trajectory.TrajectorySpec]:
        excitation = self.section("excitation")
        path = self.manifest_path()
        if path is not None:
            specs = trajectory.load_manifest(path)
        else:
            specs = trajectory.fixture_manifest(
                self.fixture(),
                include_ramps=excitation.get("include_ramps", True),
                include_steps=excitation.get("include_steps", True),
            )
        limit = excitation.get("max_trajectories")
        return specs[:limit] if limit else specs

    def pipeline_settings(self):
        return PipelineSettings.from_dict(self.section("pipeline"))

    def fit_settings(self):
        conf = self.section("fit")
        conf.setdefault("seed", self.seed)
        return AdamSettings.from_dict(conf)

    def pinn_config(self) -> PinnConfig:
        conf = self.section("pinn")
        preset = conf.pop("preset", self.fixture_name)
        base = PinnConfig.knee() if preset == constant.KNEE_FIXTURE else PinnConfig.ankle()
        if "lambda" in conf:
            conf["lam"] = conf.pop("lambda")
        conf.setdefault("seed", self.seed)
        return replace(base, **conf).validate()

    def search_space(self) -> SearchSpace:
        return SearchSpace.from_dict(self.section("search").get("space", {}))

    @property
    def n_trials(self):
        return self.section("search").get("n_trials", DEFAULT_N_TRIALS)

    def eval_models(self):
        return list(self.section("eval").get("models", DEFAULT_EVAL_MODELS))

    def eval_settings(self) -> EvalSettings:
        conf = self.section("eval")
        conf.pop("models", None)
        if "kp_bounds" in conf:
            conf["kp_bounds"] = tuple(conf["kp_bounds"])
        loop = LoopSettings(noise=self.fixture().noise, seed=self.seed)
        return EvalSettings(loop=loop, **conf).validate()


def load_config(path=None, seed=None, fixture=None, env=None) -> ExperimentConfig:
    """Reads, validates and resolves an experiment configuration.

    Args:
        path: JSON config file, optional
        seed: --seed flag value
        fixture: --fixture flag value
        env: environment mapping, default os.environ

    Raises:
        ConfigError: unreadable or invalid config, missing seed or a referenced
            file that does not exist
    """
    env = os.environ if env is None else env
    document = {}
    base_dir = "."
    if path is not None:
        if not os.path.isfile(path):
            raise ConfigError("$", "config file {} does not exist".format(path))
        try:
            document = json_io.load_json(path)
        except ValueError as e:
            logging.error("config %s is not valid json", path)
            raise ConfigError("$", "config file {} is not valid JSON: {}".format(path, e)) from e
        base_dir = os.path.dirname(os.path.abspath(path))
    validate_experiment_config(document)

    final_seed = EnvHolder.pickup_non_blank_value(
        seed,
        document.get("seed"),
        env.get(constant.SEED_ENV_NAME),
    )
    final_seed = _int_value("seed", final_seed, "$.seed")
    if final_seed is None:
        raise ConfigError(
            "$.seed",
            "seed is required: pass --seed, set it in the config or in {}".format(
                constant.SEED_ENV_NAME,
            ),
        )
    if final_seed < 0:
        raise ConfigError("$.seed", "seed must be >= 0, got {}".format(final_seed))
    final_fixture = EnvHolder.pickup_non_blank_value(
        fixture,
        document.get("fixture"),
        env.get(constant.FIXTURE_ENV_NAME),
        constant.ANKLE_FIXTURE,
    )
    if final_fixture not in constant.SUPPORTED_FIXTURES:
        raise ConfigError(
            "$.fixture",
            "Invalid fixture {}, values should be one of {}".format(
                final_fixture,
                constant.SUPPORTED_FIXTURES,
            ),
        )

    document = dict(document, seed=final_seed, fixture=final_fixture)
    config = ExperimentConfig(final_seed, final_fixture, document, base_dir)
    manifest = config.manifest_path()
    if manifest is not None and not os.path.isfile(manifest):
        raise ConfigError(
            "$.excitation.manifest",
            "manifest {} does not exist".format(manifest),
        )
    try:
        config.fixture()
        config.pinn_config()
        config.fit_settings()
        config.eval_settings()
        config.search_space()
    except (ValueError, TypeError) as e:
        logging.error("config values are inconsistent: %s", e)
        raise ConfigError("$", str(e)) from e
    logging.info(
        "resolved config: fixture=%s seed=%s hash=%s",
        final_fixture,
        final_seed,
        config.config_hash(),
    )
    return config
