from typing import Optional
from typing import Union

from joint_friction_id.friction import models
from joint_friction_id.friction.ttypes import ModelKind
from joint_friction_id.friction.ttypes import name_of
from joint_friction_id.pinn.network import PinnModel
from joint_friction_id.pinn.online import OnlineEstimator


class CompensatorHandle:
    """Friction estimator of the low-level controller.

    Static models read the joint velocity only; the PINN keeps its own
    history of (delta_theta, s_dot) and must be reset between experiments.
    """

    def __init__(self, kind, model: Optional[Union[models.CvParams, models.ScvParams, PinnModel]] = None):
        expected = {
            ModelKind.NONE: type(None),
            ModelKind.CV: models.CvParams,
            ModelKind.SCV: models.ScvParams,
            ModelKind.PINN: PinnModel,
        }
        if kind not in expected:
            raise ValueError(
                "Invalid compensator kind %s, values should be one of %s" % (kind, list(expected)),
            )
        if type(model) is not expected[kind]:
            raise ValueError(
                "compensator {} needs a {} model, got {}".format(
                    name_of(ModelKind, kind),
                    expected[kind].__name__,
                    type(model).__name__,
                ),
            )
        self.kind = kind
        self.model = model
        self._online = OnlineEstimator(model) if kind == ModelKind.PINN else None

    @classmethod
    def none(cls):
        return cls(ModelKind.NONE)

    @classmethod
    def cv(cls, params: models.CvParams):
        return cls(ModelKind.CV, params)

    @classmethod
    def scv(cls, params: models.ScvParams):
        return cls(ModelKind.SCV, params)

    @classmethod
    def pinn(cls, model: PinnModel):
        return cls(ModelKind.PINN, model)

    @property
    def name(self):
        return name_of(ModelKind, self.kind)

    def reset(self):
        if self._online is not None:
            self._online.reset()

    def estimate(self, delta_theta, s_dot):
        """Friction torque estimate (N·m)."""
        if self.kind == ModelKind.NONE:
            return 0.0
        if self._online is not None:
            return self._online.estimate(delta_theta, s_dot)
        return float(models.friction_eval(self.model, s_dot))
