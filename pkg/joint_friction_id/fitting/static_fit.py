"""CV / SCV 摩擦参数辨识

Minimizes the MSE between model friction and reconstructed friction torque
with Adam. Parameters are optimized through a softplus reparameterization, so
every intermediate value is a valid parameter set; k_s is k_c + softplus(delta).
"""
import logging
from dataclasses import dataclass
from typing import Sequence
from typing import Union

import numpy as np
from scipy.special import expit

from joint_friction_id.fitting.adam import AdamSettings
from joint_friction_id.fitting.adam import adam_step
from joint_friction_id.fitting.adam import learning_rate_at
from joint_friction_id.friction import models
from joint_friction_id.friction.ttypes import ModelKind
from joint_friction_id.friction.ttypes import name_of
from joint_friction_id.friction.ttypes import value_of
from joint_friction_id.io import json_io
from joint_friction_id.io import table_io
from joint_friction_id.sigproc.dataset import Dataset
from joint_friction_id.util import hashing

MIN_POSITIVE = 1e-8
LOW_SPEED_QUANTILE = 0.3
HIGH_SPEED_QUANTILE = 0.7
INIT_K_A = 10.0
INIT_V_S = 0.1
INIT_ALPHA = 1.0


class FittingError(Exception):
    pass


def softplus(x):
    return np.logaddexp(0.0, x)


def softplus_inv(y):
    y = np.maximum(np.asarray(y, dtype=np.float64), MIN_POSITIVE)
    return np.where(y > 30.0, y, np.log(np.expm1(np.minimum(y, 30.0))))


class _Reparam:
    """Maps unconstrained raw vectors to parameter sets and back."""

    def __init__(self, kind):
        self.kind = kind
        self.names = models.CV_PARAM_NAMES if kind == ModelKind.CV else models.SCV_PARAM_NAMES

    def to_raw(self, params):
        vec = params.as_vector()
        if self.kind == ModelKind.SCV:
            vec[3] = vec[3] - vec[1]
        return softplus_inv(vec)

    def to_params(self, raw):
        vec = softplus(raw)
        if self.kind == ModelKind.CV:
            return models.CvParams.from_vector(vec)
        vec[3] = vec[1] + vec[3]
        return models.ScvParams.from_vector(vec)

    def chain(self, raw, param_grads):
        """Gradient w.r.t. raw from gradient w.r.t. parameters."""
        g = np.array(param_grads, dtype=np.float64)
        if self.kind == ModelKind.SCV:
            g[..., 1] = g[..., 1] + g[..., 3]
        return g * expit(raw)

    def frozen_mask(self, frozen):
        mask = np.ones(len(self.names))
        for name in frozen:
            if name not in self.names:
                raise ValueError(
                    "cannot freeze {}, parameters are {}".format(name, list(self.names)),
                )
            mask[self.names.index(name)] = 0.0
        return mask


@dataclass
class FitResult:
    kind: int
    params: models.FrictionParams
    final_mse: float
    loss_curve: np.ndarray
    best_epoch: int
    settings: AdamSettings
    dataset_hash: str = ""

    def to_dict(self):
        return {
            "model_kind": name_of(ModelKind, self.kind),
            "params": self.params.to_dict(),
            "final_mse": self.final_mse,
            "best_epoch": self.best_epoch,
            "settings": self.settings.to_dict(),
            "dataset_hash": self.dataset_hash,
        }

    def save(self, json_path, curve_path=None, provenance=None):
        doc = self.to_dict()
        if provenance is not None:
            doc["provenance"] = provenance.to_dict()
        json_io.dump_json(doc, json_path)
        if curve_path is not None:
            table_io.write_table(
                curve_path,
                ["epoch", "mse"],
                [np.arange(len(self.loss_curve)), self.loss_curve],
                provenance,
            )

    @classmethod
    def load(cls, json_path):
        doc = json_io.load_json(json_path)
        return cls(
            kind=value_of(ModelKind, doc["model_kind"]),
            params=models.params_from_dict(doc["params"]),
            final_mse=float(doc["final_mse"]),
            loss_curve=np.empty(0),
            best_epoch=int(doc["best_epoch"]),
            settings=AdamSettings.from_dict(doc["settings"]),
            dataset_hash=doc.get("dataset_hash", ""),
        )


def initial_guess(kind, s_dot, tau):
    """Heuristic start from robust statistics of the data.

    k_c is the median |tau| at low speed, k_v the slope of |tau| against
    |s_dot| at high speed and k_s the 90th percentile of |tau| at low speed.
    """
    speed = np.abs(np.asarray(s_dot, dtype=np.float64))
    mag = np.abs(np.asarray(tau, dtype=np.float64))
    moving = speed > 0.0
    k_c = k_v = 0.0
    k_s = 0.0
    if np.count_nonzero(moving) >= 2:
        low = moving & (speed <= np.quantile(speed[moving], LOW_SPEED_QUANTILE))
        high = moving & (speed >= np.quantile(speed[moving], HIGH_SPEED_QUANTILE))
        k_c = float(np.median(mag[low]))
        k_s = float(np.quantile(mag[low], 0.9))
        if np.ptp(speed[high]) > 0:
            k_v = max(float(np.polyfit(speed[high], mag[high], 1)[0]), 0.0)
    k_s = max(k_s, k_c)
    if kind == ModelKind.CV:
        return models.CvParams(INIT_K_A, k_c, k_v)
    return models.ScvParams(INIT_K_A, k_c, k_v, k_s, INIT_V_S, INIT_ALPHA)


def _mse_and_grad(reparam, raw, s_dot, tau):
    params = reparam.to_params(raw)
    residual = models.friction_eval(params, s_dot) - tau
    mse = float(np.mean(residual * residual))
    param_grads = models.friction_grad(params, s_dot)
    grad_params = 2.0 * residual @ param_grads / len(tau)
    return mse, reparam.chain(raw, grad_params)


def fit_static_arrays(
    kind,
    s_dot,
    tau,
    settings: AdamSettings = AdamSettings(),
    init=None,
    frozen: Sequence[str] = (),
) -> FitResult:
    """Fits a CV or SCV model to (s_dot, tau) pairs.

    Args:
        kind: ModelKind.CV or ModelKind.SCV
        s_dot: joint velocities (rad/s)
        tau: friction torques (N·m)
        settings: Adam settings; batch_size None means full batch
        init: initial parameters, default from ``initial_guess``
        frozen: parameter names kept at their initial value

    Returns:
        FitResult holding the best-epoch parameters; best_epoch is -1 when
        no epoch improved on the initial parameters

    Raises:
        FittingError: the loss became nan or inf
    """
    if kind not in (ModelKind.CV, ModelKind.SCV):
        raise ValueError("static fit supports CV and SCV, got {}".format(kind))
    settings.validate()
    s_dot = np.asarray(s_dot, dtype=np.float64).ravel()
    tau = np.asarray(tau, dtype=np.float64).ravel()
    if len(s_dot) == 0 or len(s_dot) != len(tau):
        raise ValueError(
            "need equal nonempty s_dot and tau, got {} and {}".format(len(s_dot), len(tau)),
        )
    reparam = _Reparam(kind)
    init = init if init is not None else initial_guess(kind, s_dot, tau)
    if models.model_kind_of(init) != kind:
        raise ValueError("init params do not match kind {}".format(name_of(ModelKind, kind)))
    init.validate()
    raw = reparam.to_raw(init)
    mask = reparam.frozen_mask(frozen)
    moments = (np.zeros_like(raw), np.zeros_like(raw))

    n = len(tau)
    batch = n if settings.batch_size is None else min(settings.batch_size, n)
    rng = np.random.default_rng(settings.seed)
    loss_curve = np.empty(settings.epochs)
    # epoch -1 是初始参数
    best_mse, _ = _mse_and_grad(reparam, raw, s_dot, tau)
    best_raw, best_epoch = raw.copy(), -1
    step_idx = 0
    for epoch in range(settings.epochs):
        lr = learning_rate_at(settings, epoch)
        order = np.arange(n) if batch == n else rng.permutation(n)
        for start in range(0, n, batch):
            idx = order[start:start + batch]
            _, grad = _mse_and_grad(reparam, raw, s_dot[idx], tau[idx])
            step_idx += 1
            raw, moments = adam_step(raw, grad * mask, moments, settings, step_idx, lr)
        mse, _ = _mse_and_grad(reparam, raw, s_dot, tau)
        if not np.isfinite(mse) or not np.all(np.isfinite(raw)):
            logging.error(
                "fit diverged at epoch %s, mse=%s, learning_rate=%s",
                epoch,
                mse,
                lr,
            )
            raise FittingError(
                "loss became non-finite at epoch {}; learning rate {} is probably "
                "too high".format(epoch, lr),
            )
        loss_curve[epoch] = mse
        if mse < best_mse:
            best_mse, best_raw, best_epoch = mse, raw.copy(), epoch

    params = reparam.to_params(best_raw).validate()
    logging.info(
        "%s fit done: mse=%.6g best_epoch=%s params=%s",
        name_of(ModelKind, kind),
        best_mse,
        best_epoch,
        params,
    )
    return FitResult(
        kind=kind,
        params=params,
        final_mse=float(best_mse),
        loss_curve=loss_curve,
        best_epoch=best_epoch,
        settings=settings,
        dataset_hash=hashing.arrays_hash(s_dot, tau),
    )


def fit_static_model(
    kind,
    dataset: Union[Dataset, Sequence[Dataset]],
    settings: AdamSettings = AdamSettings(),
    init=None,
    frozen: Sequence[str] = (),
) -> FitResult:
    """Fits on the (s_dot, tau_F_true) pairs of one or more datasets."""
    datasets = [dataset] if isinstance(dataset, Dataset) else list(dataset)
    if not datasets:
        raise ValueError("no dataset to fit")
    for ds in datasets:
        if ds.tau_F_true is None:
            raise ValueError("dataset has no tau_F_true column")
    s_dot = np.concatenate([ds.s_dot for ds in datasets])
    tau = np.concatenate([ds.tau_F_true for ds in datasets])
    if len(tau) == 0:
        raise ValueError("dataset is empty")
    return fit_static_arrays(kind, s_dot, tau, settings, init, frozen)
