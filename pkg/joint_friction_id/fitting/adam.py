import math
from dataclasses import asdict
from dataclasses import dataclass
from typing import Dict
from typing import Optional
from typing import Tuple

import numpy as np

from joint_friction_id import constant

LR_SCHEDULES = ("constant", "cosine")


@dataclass(frozen=True)
class AdamSettings:
    """
    Attributes:
     - learning_rate: step size
     - beta1, beta2: moment decay rates in [0, 1)
     - epsilon: denominator guard
     - epochs: passes over the data, >= 1
     - batch_size: None means full batch
     - seed: minibatch shuffling seed
     - lr_schedule: "constant" or "cosine"
     - lr_min: floor of the cosine schedule
    """

    learning_rate: float = constant.FIT_LEARNING_RATE
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    epochs: int = constant.FIT_EPOCHS
    batch_size: Optional[int] = None
    seed: int = 0
    lr_schedule: str = "constant"
    lr_min: float = 1e-4

    def validate(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0, got {}".format(self.learning_rate))
        for name in ("beta1", "beta2"):
            value = getattr(self, name)
            if not 0.0 <= value < 1.0:
                raise ValueError("{} must be in [0, 1), got {}".format(name, value))
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1, got {}".format(self.epochs))
        if self.batch_size is not None and self.batch_size < 1:
            raise ValueError("batch_size must be >= 1, got {}".format(self.batch_size))
        if self.lr_schedule not in LR_SCHEDULES:
            raise ValueError(
                "lr_schedule must be one of {}, got {}".format(LR_SCHEDULES, self.lr_schedule),
            )
        return self

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d).validate()


def learning_rate_at(settings: AdamSettings, epoch):
    """Learning rate of a 0-based epoch."""
    if settings.lr_schedule == "constant" or settings.epochs == 1:
        return settings.learning_rate
    progress = epoch / (settings.epochs - 1)
    lr_min = min(settings.lr_min, settings.learning_rate)
    return lr_min + 0.5 * (settings.learning_rate - lr_min) * (1.0 + math.cos(math.pi * progress))


def adam_step(
    params_vec,
    grads,
    moments: Tuple[np.ndarray, np.ndarray],
    settings: AdamSettings,
    t,
    learning_rate=None,
):
    """One bias-corrected Adam update.

    Args:
        params_vec: current parameters
        grads: gradients, same shape
        moments: (m, v) first and second moment estimates
        settings: optimizer constants
        t: 1-based step index
        learning_rate: overrides settings.learning_rate

    Returns:
        (new params, (new m, new v))
    """
    params_vec = np.asarray(params_vec, dtype=np.float64)
    grads = np.asarray(grads, dtype=np.float64)
    m, v = moments
    if not params_vec.shape == grads.shape == np.shape(m) == np.shape(v):
        raise ValueError(
            "dimension mismatch: params {} grads {} m {} v {}".format(
                params_vec.shape,
                grads.shape,
                np.shape(m),
                np.shape(v),
            ),
        )
    if t < 1:
        raise ValueError("step index t must be >= 1, got {}".format(t))
    lr = settings.learning_rate if learning_rate is None else learning_rate
    m_new = settings.beta1 * m + (1.0 - settings.beta1) * grads
    v_new = settings.beta2 * v + (1.0 - settings.beta2) * grads * grads
    m_hat = m_new / (1.0 - settings.beta1**t)
    v_hat = v_new / (1.0 - settings.beta2**t)
    return params_vec - lr * m_hat / (np.sqrt(v_hat) + settings.epsilon), (m_new, v_new)


class AdamOptimizer:
    """Adam over a dict of named arrays, updated in place."""

    def __init__(self, settings: AdamSettings):
        self.settings = settings
        self.m: Dict[str, np.ndarray] = {}
        self.v: Dict[str, np.ndarray] = {}
        self.t = 0

    def step(self, params: Dict[str, np.ndarray], grads: Dict[str, np.ndarray], learning_rate=None):
        self.t += 1
        s = self.settings
        lr = s.learning_rate if learning_rate is None else learning_rate
        bc1 = 1.0 - s.beta1**self.t
        bc2 = 1.0 - s.beta2**self.t
        for k in params:
            g = grads[k]
            if k not in self.m:
                self.m[k] = np.zeros_like(params[k])
                self.v[k] = np.zeros_like(params[k])
            self.m[k] *= s.beta1
            self.m[k] += (1.0 - s.beta1) * g
            self.v[k] *= s.beta2
            self.v[k] += (1.0 - s.beta2) * (g * g)
            params[k] -= (lr / bc1) * self.m[k] / (np.sqrt(self.v[k] / bc2) + s.epsilon)
