"""单关节逆动力学

The torque model behind friction reconstruction. Providers implement
``InverseDynamics.torque`` so a multibody model can take the place of the
single-joint one.
"""
import abc

import numpy as np

from joint_friction_id.sim.jointsim import JointParams


class InverseDynamics(abc.ABC):
    @abc.abstractmethod
    def torque(self, s, s_dot, s_ddot):
        """Joint torque (N·m) that produces the given motion."""


class RigidLoadDynamics(InverseDynamics):
    """tau = I_l * s_ddot + g_amp * sin(s).

    With include_rotor_inertia the reflected rotor inertia r^2 * J_m joins the
    load inertia, so the reconstructed friction excludes the torque spent
    accelerating the motor.
    """

    def __init__(self, params: JointParams, include_rotor_inertia=False):
        self.params = params
        self.include_rotor_inertia = include_rotor_inertia

    @property
    def inertia(self):
        inertia = self.params.load_inertia
        if self.include_rotor_inertia:
            inertia += self.params.reduction_ratio**2 * self.params.motor_inertia
        return inertia

    def torque(self, s, s_dot, s_ddot):
        s = np.asarray(s, dtype=np.float64)
        s_ddot = np.asarray(s_ddot, dtype=np.float64)
        return self.inertia * s_ddot + self.params.g_amp * np.sin(s)


def inverse_dynamics_single_joint(s, s_dot, s_ddot, params: JointParams):
    return RigidLoadDynamics(params).torque(s, s_dot, s_ddot)
