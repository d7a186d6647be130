"""两层力矩控制：高层关节位置正则 + 低层电流前馈"""
import math
from dataclasses import dataclass

from joint_friction_id import constant
from joint_friction_id.sim.jointsim import JointParams


@dataclass(frozen=True)
class ControllerGains:
    kp: float
    kd: float = constant.DEFAULT_KD

    def validate(self):
        if not (self.kp >= 0 and self.kd >= 0):
            raise ValueError("gains must be >= 0, got kp={} kd={}".format(self.kp, self.kd))
        return self


def high_level_accel(s_des, s_dot_des, s_ddot_des, s, s_dot, gains: ControllerGains):
    """s_ddot* = s_ddot_des + K_d (s_dot_des - s_dot) + K_p (s_des - s)"""
    return s_ddot_des + gains.kd * (s_dot_des - s_dot) + gains.kp * (s_des - s)


def high_level_torque(s_ddot_star, s, params: JointParams):
    """Desired joint torque of the single-joint rigid load."""
    return params.load_inertia * s_ddot_star + params.g_amp * math.sin(s)


def low_level_current(tau_des, tau_f_hat, params: JointParams):
    """Feedforward current with friction compensation.

    Returns:
        (i_ref clamped to +-i_max, whether the clamp was active)
    """
    i_ref = (tau_des + tau_f_hat) / params.drive_gain
    if abs(i_ref) > params.i_max:
        return math.copysign(params.i_max, i_ref), True
    return i_ref, False
