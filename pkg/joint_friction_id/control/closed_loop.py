"""闭环仿真

The controller runs at the control rate on noisy encoder readings filtered by
causal Kalman differentiators; each current command is held over the
simulator substeps of one tick. An optional rectangular torque pulse acts on
the load side.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from joint_friction_id import constant
from joint_friction_id.control.compensator import CompensatorHandle
from joint_friction_id.control.controller import ControllerGains
from joint_friction_id.control.controller import high_level_accel
from joint_friction_id.control.controller import high_level_torque
from joint_friction_id.control.controller import low_level_current
from joint_friction_id.io import table_io
from joint_friction_id.sigproc.filters import OnlineKalmanDifferentiator
from joint_friction_id.sim import jointsim
from joint_friction_id.sim.jointsim import FrictionGroundTruth
from joint_friction_id.sim.jointsim import JointParams
from joint_friction_id.sim.jointsim import SensorNoise
from joint_friction_id.sim.jointsim import SimState


@dataclass(frozen=True)
class SineReference:
    amplitude: float
    frequency: float
    offset: float = 0.0

    def __call__(self, t):
        w = 2.0 * math.pi * self.frequency
        return (
            self.offset + self.amplitude * math.sin(w * t),
            self.amplitude * w * math.cos(w * t),
            -self.amplitude * w * w * math.sin(w * t),
        )


@dataclass(frozen=True)
class HoldReference:
    position: float

    def __call__(self, t):
        return self.position, 0.0, 0.0


@dataclass(frozen=True)
class DisturbancePulse:
    """Rectangular load-side torque (N·m) over [t_start, t_start + duration)."""

    amplitude: float
    t_start: float
    duration: float = constant.DISTURBANCE_DURATION

    @property
    def t_end(self):
        return self.t_start + self.duration

    def torque(self, t):
        return self.amplitude if self.t_start <= t < self.t_end else 0.0


@dataclass(frozen=True)
class LoopSettings:
    control_rate: float = constant.CONTROL_RATE
    substeps: int = 20
    noise: SensorNoise = SensorNoise()
    kalman_q: float = constant.KALMAN_JERK_PSD
    seed: int = 0

    @property
    def sim_dt(self):
        return 1.0 / (self.control_rate * self.substeps)

    def validate(self):
        if self.control_rate <= 0 or self.substeps < 1:
            raise ValueError(
                "control_rate must be > 0 and substeps >= 1, got {} and {}".format(
                    self.control_rate,
                    self.substeps,
                ),
            )
        if self.sim_dt > jointsim.MAX_DT:
            raise ValueError("simulator step {} is too coarse".format(self.sim_dt))
        return self


@dataclass
class ExperimentTrace:
    """Per-tick controller log; s is the measured joint position."""

    rate: float
    t: np.ndarray
    s_des: np.ndarray
    s: np.ndarray
    s_dot: np.ndarray
    tau_des: np.ndarray
    tau_F_hat: np.ndarray
    i_ref: np.ndarray
    disturbance: np.ndarray
    saturated: np.ndarray

    def __len__(self):
        return len(self.t)

    def energy_proxy(self):
        """sum of i_ref^2 dt (A^2·s)."""
        return float(np.sum(self.i_ref**2) / self.rate)

    def to_csv(self, path, provenance=None):
        table_io.write_table(
            path,
            constant.TRACE_COLUMNS,
            [getattr(self, name) for name in constant.TRACE_COLUMNS],
            provenance,
        )

    @classmethod
    def from_csv(cls, path):
        header, cols, _ = table_io.read_table(path)
        if header != constant.TRACE_COLUMNS:
            raise ValueError("unexpected trace header {}".format(header))
        t = cols["t"]
        rate = 1.0 / float(np.median(np.diff(t))) if len(t) > 1 else constant.CONTROL_RATE
        return cls(rate=float(round(rate)), **cols)


def equilibrium_state(params: JointParams, s0=0.0) -> SimState:
    return jointsim.rest_state(params, s0)


def run_closed_loop(
    reference,
    gains: ControllerGains,
    compensator: CompensatorHandle,
    params: JointParams,
    gt: FrictionGroundTruth,
    duration,
    disturbance: Optional[DisturbancePulse] = None,
    settings: LoopSettings = LoopSettings(),
    initial_state: Optional[SimState] = None,
) -> ExperimentTrace:
    """Runs the two-layer controller against the simulated joint.

    Args:
        reference: callable t -> (s_des, s_dot_des, s_ddot_des)
        gains: K_p and K_d of the joint regularization
        compensator: friction estimator, reset before the run
        params: simulated joint
        gt: ground-truth friction of the simulated joint
        duration: experiment length (s)
        disturbance: optional load-side torque pulse
        settings: rates, sensor noise and seed
        initial_state: default is the equilibrium at the reference start

    Returns:
        ExperimentTrace with one row per control tick
    """
    gains.validate()
    settings.validate()
    if duration <= 0:
        raise ValueError("duration must be > 0, got {}".format(duration))
    n_ticks = int(round(duration * settings.control_rate))
    r = params.reduction_ratio
    dt = settings.sim_dt
    noise = settings.noise
    rng = np.random.default_rng(settings.seed)

    r_n = constant.ENCODER_NOISE_STD**2
    joint_filter = OnlineKalmanDifferentiator(settings.control_rate, settings.kalman_q, r_n)
    motor_filter = OnlineKalmanDifferentiator(
        settings.control_rate,
        settings.kalman_q * r * r,
        r_n * r * r,
    )
    compensator.reset()
    state = initial_state if initial_state is not None else equilibrium_state(params, reference(0.0)[0])

    rows = np.zeros((n_ticks, len(constant.TRACE_COLUMNS)))
    for k in range(n_ticks):
        t = k / settings.control_rate
        s_meas, theta_meas = state.s, state.theta
        if noise.enabled:
            s_meas += noise.sigma_s * rng.standard_normal()
            theta_meas += noise.sigma_theta * rng.standard_normal()
        s_hat, s_dot_hat, _ = joint_filter.update(s_meas)
        theta_hat, _, _ = motor_filter.update(theta_meas)

        tau_f_hat = compensator.estimate(r * s_hat - theta_hat, s_dot_hat)
        s_des, s_dot_des, s_ddot_des = reference(t)
        s_ddot_star = high_level_accel(s_des, s_dot_des, s_ddot_des, s_hat, s_dot_hat, gains)
        tau_des = high_level_torque(s_ddot_star, s_hat, params)
        i_ref, saturated = low_level_current(tau_des, tau_f_hat, params)

        for j in range(settings.substeps):
            tau_ext = disturbance.torque(t + j * dt) if disturbance is not None else 0.0
            state = jointsim.step(state, i_ref, params, gt, dt, tau_ext)
        applied = disturbance.torque(t) if disturbance is not None else 0.0
        rows[k] = (t, s_des, s_meas, s_dot_hat, tau_des, tau_f_hat, i_ref, applied, saturated)

    logging.debug(
        "closed loop %s kp=%s kd=%s ticks=%s",
        compensator.name,
        gains.kp,
        gains.kd,
        n_ticks,
    )
    return ExperimentTrace(settings.control_rate, *rows.T)
