"""静态摩擦模型：Coulomb-viscous (CV) 与 Stribeck-Coulomb-viscous (SCV)

Both models take the joint-side velocity ``s_dot`` (rad/s) and return the
friction torque in N·m. Scalars and numpy arrays are accepted; gradients are
returned with the parameter axis last.
"""
from dataclasses import asdict
from dataclasses import dataclass
from typing import Union

import numpy as np

from joint_friction_id.friction.ttypes import ModelKind
from joint_friction_id.friction.ttypes import name_of
from joint_friction_id.friction.ttypes import value_of

CV_PARAM_NAMES = ("k_a", "k_c", "k_v")
SCV_PARAM_NAMES = ("k_a", "k_c", "k_v", "k_s", "v_s", "alpha")


@dataclass(frozen=True)
class CvParams:
    """
    Attributes:
     - k_a: tanh sharpness (s/rad)
     - k_c: Coulomb level (N·m)
     - k_v: viscous coefficient (N·m·s/rad)
    """

    k_a: float
    k_c: float
    k_v: float

    def validate(self):
        if not np.all(np.isfinite(self.as_vector())):
            raise ValueError("CvParams must be finite: {}".format(self))
        if self.k_a <= 0:
            raise ValueError("k_a must be > 0, got {}".format(self.k_a))
        if self.k_c < 0:
            raise ValueError("k_c must be >= 0, got {}".format(self.k_c))
        if self.k_v < 0:
            raise ValueError("k_v must be >= 0, got {}".format(self.k_v))
        return self

    def as_vector(self):
        return np.array([self.k_a, self.k_c, self.k_v], dtype=np.float64)

    @classmethod
    def from_vector(cls, vec):
        return cls(*(float(v) for v in vec))

    def to_dict(self):
        d = asdict(self)
        d["model_kind"] = name_of(ModelKind, ModelKind.CV)
        return d


@dataclass(frozen=True)
class ScvParams:
    """
    Attributes:
     - k_a: tanh sharpness (s/rad)
     - k_c: Coulomb level (N·m)
     - k_v: viscous coefficient (N·m·s/rad)
     - k_s: breakaway level (N·m), never below k_c
     - v_s: Stribeck velocity (rad/s)
     - alpha: Stribeck shape exponent
    """

    k_a: float
    k_c: float
    k_v: float
    k_s: float
    v_s: float
    alpha: float

    def validate(self):
        if not np.all(np.isfinite(self.as_vector())):
            raise ValueError("ScvParams must be finite: {}".format(self))
        if self.k_a <= 0:
            raise ValueError("k_a must be > 0, got {}".format(self.k_a))
        if self.k_c < 0:
            raise ValueError("k_c must be >= 0, got {}".format(self.k_c))
        if self.k_v < 0:
            raise ValueError("k_v must be >= 0, got {}".format(self.k_v))
        if self.k_s < self.k_c:
            raise ValueError(
                "k_s must be >= k_c, got k_s={} k_c={}".format(self.k_s, self.k_c),
            )
        if self.v_s <= 0:
            raise ValueError("v_s must be > 0, got {}".format(self.v_s))
        if self.alpha <= 0:
            raise ValueError("alpha must be > 0, got {}".format(self.alpha))
        return self

    def as_vector(self):
        return np.array(
            [self.k_a, self.k_c, self.k_v, self.k_s, self.v_s, self.alpha],
            dtype=np.float64,
        )

    @classmethod
    def from_vector(cls, vec):
        return cls(*(float(v) for v in vec))

    def to_dict(self):
        d = asdict(self)
        d["model_kind"] = name_of(ModelKind, ModelKind.SCV)
        return d


FrictionParams = Union[CvParams, ScvParams]


def params_from_dict(d) -> FrictionParams:
    kind = value_of(ModelKind, d.get("model_kind", ""))
    if kind == ModelKind.CV:
        return CvParams(*(float(d[k]) for k in CV_PARAM_NAMES)).validate()
    if kind == ModelKind.SCV:
        return ScvParams(*(float(d[k]) for k in SCV_PARAM_NAMES)).validate()
    raise ValueError(
        "model_kind {} has no static parameters".format(d.get("model_kind")),
    )


def model_kind_of(params: FrictionParams):
    if isinstance(params, ScvParams):
        return ModelKind.SCV
    if isinstance(params, CvParams):
        return ModelKind.CV
    raise ValueError("unsupported friction params type {}".format(type(params)))


def cv_eval(p: CvParams, s_dot):
    s_dot = np.asarray(s_dot, dtype=np.float64)
    return p.k_c * np.tanh(p.k_a * s_dot) + p.k_v * s_dot


def _stribeck_decay(p: ScvParams, s_dot):
    ratio = np.abs(s_dot) / p.v_s
    u = ratio**p.alpha
    return ratio, u, np.exp(-u)


def scv_eval(p: ScvParams, s_dot):
    s_dot = np.asarray(s_dot, dtype=np.float64)
    _, _, decay = _stribeck_decay(p, s_dot)
    th = np.tanh(p.k_a * s_dot)
    return p.k_c * th + p.k_v * s_dot + (p.k_s - p.k_c) * decay * th


def friction_eval(p: FrictionParams, s_dot):
    if isinstance(p, ScvParams):
        return scv_eval(p, s_dot)
    return cv_eval(p, s_dot)


def breakaway_torque(p: FrictionParams):
    """Torque needed to leave rest: k_s for SCV, k_c for CV."""
    if isinstance(p, ScvParams):
        return p.k_s
    return p.k_c


def cv_grad(p: CvParams, s_dot):
    """Partial derivatives of cv_eval w.r.t. (k_a, k_c, k_v)."""
    s_dot = np.asarray(s_dot, dtype=np.float64)
    th = np.tanh(p.k_a * s_dot)
    sech2 = 1.0 - th * th
    return np.stack(
        [p.k_c * s_dot * sech2, th, s_dot],
        axis=-1,
    )


def scv_grad(p: ScvParams, s_dot):
    """Partial derivatives of scv_eval w.r.t. (k_a, k_c, k_v, k_s, v_s, alpha).

    At s_dot == 0 the v_s and alpha partials are defined as exactly 0.
    """
    s_dot = np.asarray(s_dot, dtype=np.float64)
    ratio, u, decay = _stribeck_decay(p, s_dot)
    th = np.tanh(p.k_a * s_dot)
    sech2 = 1.0 - th * th
    gap = p.k_s - p.k_c
    moving = ratio > 0.0
    safe_ratio = np.where(moving, ratio, 1.0)

    d_ka = (p.k_c + gap * decay) * s_dot * sech2
    d_kc = th * (1.0 - decay)
    d_kv = s_dot
    d_ks = decay * th
    d_vs = np.where(moving, gap * th * decay * p.alpha * u / p.v_s, 0.0)
    d_alpha = np.where(moving, -gap * th * decay * u * np.log(safe_ratio), 0.0)
    return np.stack([d_ka, d_kc, d_kv, d_ks, d_vs, d_alpha], axis=-1)


def friction_grad(p: FrictionParams, s_dot):
    if isinstance(p, ScvParams):
        return scv_grad(p, s_dot)
    return cv_grad(p, s_dot)
