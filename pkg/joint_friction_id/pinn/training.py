"""PINN 训练

Minibatch Adam on the composite loss. Both curves hold the unweighted data
MSE with dropout off; index 0 is the initialized network. The returned model
carries the weights of the best validation epoch.
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from joint_friction_id.fitting.adam import AdamOptimizer
from joint_friction_id.fitting.adam import AdamSettings
from joint_friction_id.fitting.static_fit import fit_static_arrays
from joint_friction_id.friction import models
from joint_friction_id.friction.ttypes import ModelKind
from joint_friction_id.io import table_io
from joint_friction_id.pinn.features import WindowSet
from joint_friction_id.pinn.features import featurize
from joint_friction_id.pinn.features import split_segments
from joint_friction_id.pinn.network import PinnConfig
from joint_friction_id.pinn.network import PinnModel
from joint_friction_id.sim.jointsim import JointParams
from joint_friction_id.util import metric

PREDICT_CHUNK = 8192
PHYSICS_FIT_SETTINGS = AdamSettings(learning_rate=2e-2, epochs=2000, lr_schedule="cosine")


class TrainingError(Exception):
    pass


@dataclass
class PreparedWindows:
    windows: WindowSet
    train_idx: np.ndarray
    val_idx: np.ndarray
    physics_params: models.ScvParams
    physics_targets: np.ndarray


@dataclass
class TrainResult:
    model: PinnModel
    train_curve: np.ndarray
    val_curve: np.ndarray
    best_epoch: int
    physics_params: models.ScvParams

    @property
    def best_val_loss(self):
        return float(self.val_curve[self.best_epoch])

    def save_curves(self, path, provenance=None):
        table_io.write_table(
            path,
            ["epoch", "train_mse", "val_mse"],
            [np.arange(len(self.train_curve)), self.train_curve, self.val_curve],
            provenance,
        )


def fit_physics_params(s_dot, tau, settings: AdamSettings = PHYSICS_FIT_SETTINGS):
    """SCV parameters of the physics target, fitted on training samples."""
    return fit_static_arrays(ModelKind.SCV, s_dot, tau, settings).params


def prepare_windows(
    dataset,
    params: JointParams,
    config: PinnConfig,
    split_seed=None,
    fit_settings: AdamSettings = PHYSICS_FIT_SETTINGS,
) -> PreparedWindows:
    """Featurizes, splits and computes the physics targets of every window."""
    windows = featurize(dataset, params, config.history_length)
    train_idx, val_idx = split_segments(
        windows,
        seed=config.seed if split_seed is None else split_seed,
    )
    physics = config.physics_params
    if physics is None:
        physics = fit_physics_params(
            windows.s_dot[train_idx],
            windows.targets[train_idx],
            fit_settings,
        )
    return PreparedWindows(
        windows,
        train_idx,
        val_idx,
        physics,
        models.scv_eval(physics, windows.s_dot),
    )


def data_mse(model: PinnModel, features, targets):
    """Unweighted data MSE with dropout off, evaluated in chunks."""
    total = 0.0
    for start in range(0, len(targets), PREDICT_CHUNK):
        stop = start + PREDICT_CHUNK
        residual = model.predict(features[start:stop]) - targets[start:stop]
        total += float(residual @ residual)
    return total / len(targets)


def train(
    dataset,
    params: JointParams,
    config: PinnConfig,
    prepared: Optional[PreparedWindows] = None,
    split_seed=None,
) -> TrainResult:
    """Trains a PINN on one dataset or a list of trajectory datasets.

    Args:
        dataset: Dataset or list of Dataset with tau_F_true
        params: joint parameters, the reduction ratio builds delta_theta
        config: network and training hyperparameters
        prepared: reuse windows, split and physics targets
        split_seed: seed of the segment split, default config.seed

    Returns:
        TrainResult with the best-validation model and both curves

    Raises:
        TrainingError: a loss or weight became non-finite
    """
    config.validate()
    start_ts = metric.current_ts()
    if prepared is None:
        prepared = prepare_windows(dataset, params, config, split_seed)
    windows = prepared.windows
    x_train = windows.features[prepared.train_idx]
    y_train = windows.targets[prepared.train_idx]
    p_train = prepared.physics_targets[prepared.train_idx]
    x_val = windows.features[prepared.val_idx]
    y_val = windows.targets[prepared.val_idx]

    model = PinnModel.initialize(config)
    model.set_normalization(x_train, y_train)
    optimizer = AdamOptimizer(AdamSettings(learning_rate=config.learning_rate))
    rng = np.random.default_rng([config.seed, 1])
    dropout_rng = rng if config.dropout_rate > 0 else None

    train_curve = np.empty(config.epochs + 1)
    val_curve = np.empty(config.epochs + 1)
    train_curve[0] = data_mse(model, x_train, y_train)
    val_curve[0] = data_mse(model, x_val, y_val)
    best_epoch, best_model = 0, model.copy()

    n = len(y_train)
    batch = min(config.batch_size, n)
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(n)
        for start in range(0, n, batch):
            idx = order[start:start + batch]
            losses, grads = model.loss_and_gradients(
                x_train[idx],
                y_train[idx],
                p_train[idx],
                rng=dropout_rng,
            )
            if not np.isfinite(losses[0]):
                logging.error(
                    "pinn loss is %s at epoch %s, data=%s physics=%s lr=%s",
                    losses[0],
                    epoch,
                    losses[1],
                    losses[2],
                    config.learning_rate,
                )
                raise TrainingError(
                    "non-finite loss at epoch {}; learning rate {} is probably too "
                    "high".format(epoch, config.learning_rate),
                )
            optimizer.step(model.weights, grads)
        train_curve[epoch] = data_mse(model, x_train, y_train)
        val_curve[epoch] = data_mse(model, x_val, y_val)
        if not (np.isfinite(train_curve[epoch]) and np.isfinite(val_curve[epoch])):
            raise TrainingError("non-finite evaluation loss at epoch {}".format(epoch))
        if val_curve[epoch] < val_curve[best_epoch]:
            best_epoch, best_model = epoch, model.copy()
        logging.debug(
            "epoch %s train_mse=%.6g val_mse=%.6g",
            epoch,
            train_curve[epoch],
            val_curve[epoch],
        )

    logging.info(
        "pinn trained: best_epoch=%s val_mse=%.6g train_mse=%.6g cost=%sms",
        best_epoch,
        val_curve[best_epoch],
        train_curve[best_epoch],
        metric.cost_time(start_ts),
    )
    return TrainResult(best_model, train_curve, val_curve, best_epoch, prepared.physics_params)
