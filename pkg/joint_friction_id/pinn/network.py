"""PINN 摩擦估计网络

A two-hidden-layer ReLU network over a history window of transmission
wind-up and joint velocity. Inputs are standardized with training-split
statistics and the output is scaled back to N·m.
"""
import logging
from dataclasses import asdict
from dataclasses import dataclass
from dataclasses import replace
from typing import Dict
from typing import Optional

import numpy as np

from joint_friction_id.friction import models
from joint_friction_id.io import json_io

LAYER_NAMES = ("W1", "b1", "W2", "b2", "W3", "b3")
MIN_FEATURE_STD = 1e-12
MIN_TARGET_SCALE = 1e-6
CI_EPOCHS = 100


@dataclass(frozen=True)
class PinnConfig:
    """
    Attributes:
     - history_length: window length L in samples
     - hidden1, hidden2: neurons of the hidden layers
     - dropout_rate: in [0, 1), applied after each hidden layer in training
     - learning_rate: Adam step size
     - batch_size: windows per minibatch
     - epochs: passes over the training windows
     - lam: physics weight lambda in [0, 1]
     - seed: init, split, dropout and shuffling seed
     - physics_params: SCV parameters of the physics target, None means fit
       them on the training split
    """

    history_length: int = 20
    hidden1: int = 268
    hidden2: int = 215
    dropout_rate: float = 0.07
    learning_rate: float = 0.00076
    batch_size: int = 4316
    epochs: int = CI_EPOCHS
    lam: float = 0.164
    seed: int = 0
    physics_params: Optional[models.ScvParams] = None

    @classmethod
    def ankle(cls, epochs=CI_EPOCHS, seed=0):
        return cls(20, 268, 215, 0.07, 0.00076, 4316, epochs, 0.164, seed)

    @classmethod
    def knee(cls, epochs=CI_EPOCHS, seed=0):
        return cls(22, 194, 247, 0.01176, 0.00076, 4914, epochs, 0.484, seed)

    @property
    def input_dim(self):
        return 2 * self.history_length

    def validate(self):
        if self.history_length < 1:
            raise ValueError("history_length must be >= 1, got {}".format(self.history_length))
        if self.hidden1 < 1 or self.hidden2 < 1:
            raise ValueError(
                "hidden sizes must be >= 1, got {} and {}".format(self.hidden1, self.hidden2),
            )
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError("dropout_rate must be in [0, 1), got {}".format(self.dropout_rate))
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0, got {}".format(self.learning_rate))
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1, got {}".format(self.batch_size))
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1, got {}".format(self.epochs))
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError("lambda must be in [0, 1], got {}".format(self.lam))
        if self.physics_params is not None:
            self.physics_params.validate()
        return self

    def with_physics(self, physics_params):
        return replace(self, physics_params=physics_params)

    def to_dict(self):
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        if self.physics_params is not None:
            d["physics_params"] = self.physics_params.to_dict()
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if "lambda" in d:
            d["lam"] = d.pop("lambda")
        physics = d.pop("physics_params", None)
        if physics is not None:
            physics = models.params_from_dict(physics)
        return cls(physics_params=physics, **d).validate()


@dataclass(frozen=True)
class HistoryWindow:
    """Newest-last history of delta_theta = r*s - theta (rad) and s_dot (rad/s)."""

    delta_theta: np.ndarray
    s_dot: np.ndarray

    def __post_init__(self):
        if len(self.delta_theta) != len(self.s_dot):
            raise ValueError(
                "window columns differ in length: {} vs {}".format(
                    len(self.delta_theta),
                    len(self.s_dot),
                ),
            )

    def __len__(self):
        return len(self.s_dot)

    def features(self):
        """[delta_theta oldest..newest, s_dot oldest..newest]"""
        return np.concatenate(
            [
                np.asarray(self.delta_theta, dtype=np.float64),
                np.asarray(self.s_dot, dtype=np.float64),
            ],
        )


def composite_loss(pred, true, physics, lam):
    """(total, data term, physics term), both terms already weighted.

    data = (1 - lam) * mean((pred - true)^2)
    physics = lam * mean((pred - physics)^2)
    """
    pred = np.asarray(pred, dtype=np.float64).ravel()
    true = np.asarray(true, dtype=np.float64).ravel()
    physics = np.asarray(physics, dtype=np.float64).ravel()
    if not len(pred) == len(true) == len(physics):
        raise ValueError(
            "length mismatch: pred {} true {} physics {}".format(
                len(pred),
                len(true),
                len(physics),
            ),
        )
    if len(pred) == 0:
        raise ValueError("composite_loss needs at least one sample")
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lambda must be in [0, 1], got {}".format(lam))
    l_data = (1.0 - lam) * float(np.mean((pred - true) ** 2))
    l_physics = lam * float(np.mean((pred - physics) ** 2))
    return l_data + l_physics, l_data, l_physics


def dropout_mask(rng, shape, rate):
    """Inverted dropout: kept units are scaled by 1 / (1 - rate)."""
    if rate <= 0.0:
        return np.ones(shape)
    return (rng.random(shape) >= rate) / (1.0 - rate)


class PinnModel:
    def __init__(
        self,
        config: PinnConfig,
        weights: Dict[str, np.ndarray],
        feature_mean=None,
        feature_std=None,
        target_scale=1.0,
    ):
        self.config = config
        self.weights = {k: np.asarray(weights[k], dtype=np.float64) for k in LAYER_NAMES}
        dim = config.input_dim
        self.feature_mean = (
            np.zeros(dim) if feature_mean is None else np.asarray(feature_mean, dtype=np.float64)
        )
        self.feature_std = (
            np.ones(dim) if feature_std is None else np.asarray(feature_std, dtype=np.float64)
        )
        self.target_scale = float(target_scale)
        self._check_shapes()

    @classmethod
    def initialize(cls, config: PinnConfig, rng=None, **normalization):
        """He-uniform weights with limit sqrt(6 / fan_in), zero biases."""
        config.validate()
        rng = np.random.default_rng(config.seed) if rng is None else rng
        dims = [config.input_dim, config.hidden1, config.hidden2, 1]
        weights = {}
        for i, (fan_in, fan_out) in enumerate(zip(dims[:-1], dims[1:]), start=1):
            limit = np.sqrt(6.0 / fan_in)
            weights["W%d" % i] = rng.uniform(-limit, limit, size=(fan_out, fan_in))
            weights["b%d" % i] = np.zeros(fan_out)
        return cls(config, weights, **normalization)

    def _check_shapes(self):
        c = self.config
        expected = {
            "W1": (c.hidden1, c.input_dim),
            "b1": (c.hidden1,),
            "W2": (c.hidden2, c.hidden1),
            "b2": (c.hidden2,),
            "W3": (1, c.hidden2),
            "b3": (1,),
        }
        for name, shape in expected.items():
            if self.weights[name].shape != shape:
                raise ValueError(
                    "{} has shape {}, expected {}".format(name, self.weights[name].shape, shape),
                )
        if self.feature_mean.shape != (c.input_dim,) or self.feature_std.shape != (c.input_dim,):
            raise ValueError("normalization stats must have length {}".format(c.input_dim))
        if np.any(self.feature_std <= 0):
            raise ValueError("feature std must be > 0")
        if self.target_scale <= 0:
            raise ValueError("target_scale must be > 0, got {}".format(self.target_scale))

    def set_normalization(self, features, targets):
        """Standardization stats from training features and targets."""
        features = np.asarray(features, dtype=np.float64)
        std = features.std(axis=0)
        self.feature_mean = features.mean(axis=0)
        self.feature_std = np.where(std < MIN_FEATURE_STD, 1.0, std)
        self.target_scale = max(float(np.std(targets)), MIN_TARGET_SCALE)

    def normalize(self, features):
        return (np.asarray(features, dtype=np.float64) - self.feature_mean) / self.feature_std

    def _forward(self, features, masks=None):
        w = self.weights
        x = self.normalize(features)
        z1 = x @ w["W1"].T + w["b1"]
        a1 = np.maximum(z1, 0.0)
        if masks is not None:
            a1 = a1 * masks[0]
        z2 = a1 @ w["W2"].T + w["b2"]
        a2 = np.maximum(z2, 0.0)
        if masks is not None:
            a2 = a2 * masks[1]
        y = a2 @ w["W3"].T + w["b3"]
        return y[:, 0] * self.target_scale, (x, z1, a1, z2, a2)

    def _masks(self, n, rng):
        rate = self.config.dropout_rate
        return (
            dropout_mask(rng, (n, self.config.hidden1), rate),
            dropout_mask(rng, (n, self.config.hidden2), rate),
        )

    def predict(self, features, training=False, rng=None):
        """Friction torque (N·m) for a (n, 2L) feature matrix."""
        features = np.atleast_2d(np.asarray(features, dtype=np.float64))
        if features.shape[1] != self.config.input_dim:
            raise ValueError(
                "expected {} features, got {}".format(self.config.input_dim, features.shape[1]),
            )
        masks = None
        if training:
            if rng is None:
                raise ValueError("training mode needs an rng for dropout")
            masks = self._masks(len(features), rng)
        pred, _ = self._forward(features, masks)
        return pred

    def forward(self, window: HistoryWindow, training=False, rng=None):
        if len(window) != self.config.history_length:
            raise ValueError(
                "window length {} does not match history_length {}".format(
                    len(window),
                    self.config.history_length,
                ),
            )
        return float(self.predict(window.features(), training, rng)[0])

    def loss_and_gradients(self, features, true, physics, lam=None, rng=None):
        """Composite loss of a batch and its exact gradients.

        Dropout masks are sampled from rng; rng None disables dropout.

        Returns:
            ((total, data term, physics term), gradients dict keyed like weights)
        """
        lam = self.config.lam if lam is None else lam
        features = np.atleast_2d(np.asarray(features, dtype=np.float64))
        true = np.asarray(true, dtype=np.float64).ravel()
        physics = np.asarray(physics, dtype=np.float64).ravel()
        n = len(features)
        if n == 0:
            raise ValueError("batch is empty")
        masks = None if rng is None else self._masks(n, rng)
        pred, (x, z1, a1, z2, a2) = self._forward(features, masks)
        losses = composite_loss(pred, true, physics, lam)

        w = self.weights
        d_pred = 2.0 / n * ((1.0 - lam) * (pred - true) + lam * (pred - physics))
        dy = (d_pred * self.target_scale)[:, None]
        grads = {"W3": dy.T @ a2, "b3": dy.sum(axis=0)}
        dz2 = (dy @ w["W3"]) * (z2 > 0.0)
        if masks is not None:
            dz2 = dz2 * masks[1]
        grads["W2"] = dz2.T @ a1
        grads["b2"] = dz2.sum(axis=0)
        dz1 = (dz2 @ w["W2"]) * (z1 > 0.0)
        if masks is not None:
            dz1 = dz1 * masks[0]
        grads["W1"] = dz1.T @ x
        grads["b1"] = dz1.sum(axis=0)
        return losses, grads

    def copy(self):
        return PinnModel(
            self.config,
            {k: v.copy() for k, v in self.weights.items()},
            self.feature_mean.copy(),
            self.feature_std.copy(),
            self.target_scale,
        )

    def to_dict(self):
        return {
            "config": self.config.to_dict(),
            "weights": {k: v.tolist() for k, v in self.weights.items()},
            "feature_mean": self.feature_mean.tolist(),
            "feature_std": self.feature_std.tolist(),
            "target_scale": self.target_scale,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            PinnConfig.from_dict(d["config"]),
            {k: np.array(v, dtype=np.float64) for k, v in d["weights"].items()},
            d["feature_mean"],
            d["feature_std"],
            d["target_scale"],
        )

    def save(self, path, provenance=None):
        doc = self.to_dict()
        if provenance is not None:
            doc["provenance"] = provenance.to_dict()
        json_io.dump_json(doc, path)
        logging.info("saved pinn model to %s", path)

    @classmethod
    def load(cls, path):
        return cls.from_dict(json_io.load_json(path))
