"""单关节电机 + 谐波减速器仿真

Two-mass model: the motor rotor (inertia J_m, position theta) drives the load
(inertia I_l, position s) through a compliant transmission of ratio r. Friction
is a joint-side torque evaluated at theta_dot / r and reflected onto the motor
shaft as tau_F / r.
"""
import logging
import math
from dataclasses import asdict
from dataclasses import dataclass
from dataclasses import replace
from typing import Optional

import numpy as np

from joint_friction_id import constant
from joint_friction_id.friction import models
from joint_friction_id.friction.ttypes import GroundTruthKind
from joint_friction_id.friction.ttypes import name_of
from joint_friction_id.friction.ttypes import value_of
from joint_friction_id.io import table_io

MAX_DT = 1e-3


class SimulationFault(Exception):
    def __init__(self, field, value):
        super().__init__("non-finite simulator state: {}={}".format(field, value))
        self.field = field
        self.value = value


@dataclass(frozen=True)
class JointParams:
    reduction_ratio: float = 100.0
    torque_constant: float = 0.111
    motor_inertia: float = 1e-4
    load_inertia: float = 0.05
    g_amp: float = 0.0
    stiffness: float = 1e4
    damping: float = 5.0
    s_min: float = -0.6
    s_max: float = 0.6
    i_max: float = 2.0
    current_time_constant: float = 0.0

    def validate(self):
        checks = [
            ("reduction_ratio", self.reduction_ratio > 0),
            ("torque_constant", self.torque_constant > 0),
            ("motor_inertia", self.motor_inertia > 0),
            ("load_inertia", self.load_inertia > 0),
            ("stiffness", self.stiffness > 0),
            ("damping", self.damping >= 0),
            ("s_min", self.s_min < self.s_max),
            ("i_max", self.i_max > 0),
            ("current_time_constant", self.current_time_constant >= 0),
        ]
        for field, ok in checks:
            if not ok or not math.isfinite(getattr(self, field)):
                raise ValueError(
                    "Invalid JointParams.{}={}".format(field, getattr(self, field)),
                )
        return self

    @property
    def drive_gain(self):
        """Joint-side torque per ampere, r * k_t."""
        return self.reduction_ratio * self.torque_constant

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**{k: float(v) for k, v in d.items()}).validate()


@dataclass(frozen=True)
class SimState:
    """
    Attributes:
     - s, s_dot: joint position (rad) and velocity (rad/s)
     - theta, theta_dot: motor shaft position (rad) and velocity (rad/s)
     - i_m: actual motor current (A)
     - t: time (s)
     - z: lag state of the hysteresis friction (N·m)
     - tau_F: joint-side friction torque applied in the last step (N·m)
     - at_limit: the last step ended on a position stop
    """

    s: float = 0.0
    s_dot: float = 0.0
    theta: float = 0.0
    theta_dot: float = 0.0
    i_m: float = 0.0
    t: float = 0.0
    z: float = 0.0
    tau_F: float = 0.0
    at_limit: bool = False


@dataclass(frozen=True)
class FrictionGroundTruth:
    kind: int
    params: models.FrictionParams
    hysteresis_gain: float = 0.0
    hysteresis_timeconstant: float = 0.01

    def validate(self):
        name_of(GroundTruthKind, self.kind)
        expected = models.CvParams if self.kind == GroundTruthKind.CV else models.ScvParams
        if not isinstance(self.params, expected):
            raise ValueError(
                "ground truth {} needs {}, got {}".format(
                    name_of(GroundTruthKind, self.kind),
                    expected.__name__,
                    type(self.params).__name__,
                ),
            )
        self.params.validate()
        if self.hysteresis_gain < 0:
            raise ValueError(
                "hysteresis_gain must be >= 0, got {}".format(self.hysteresis_gain),
            )
        if (
            self.kind == GroundTruthKind.SCV_PLUS_HYSTERESIS
            and self.hysteresis_timeconstant <= 0
        ):
            raise ValueError(
                "hysteresis_timeconstant must be > 0, got {}".format(
                    self.hysteresis_timeconstant,
                ),
            )
        return self

    def to_dict(self):
        return {
            "kind": name_of(GroundTruthKind, self.kind),
            "params": self.params.to_dict(),
            "hysteresis_gain": self.hysteresis_gain,
            "hysteresis_timeconstant": self.hysteresis_timeconstant,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            kind=value_of(GroundTruthKind, d["kind"]),
            params=models.params_from_dict(d["params"]),
            hysteresis_gain=float(d.get("hysteresis_gain", 0.0)),
            hysteresis_timeconstant=float(d.get("hysteresis_timeconstant", 0.01)),
        ).validate()


@dataclass(frozen=True)
class SensorNoise:
    enabled: bool = True
    sigma_s: float = constant.ENCODER_NOISE_STD
    sigma_theta: float = constant.ENCODER_NOISE_STD
    sigma_i: float = constant.CURRENT_NOISE_STD

    @classmethod
    def disabled(cls):
        return cls(enabled=False)


def rest_state(params: JointParams, s0=0.0):
    """Motionless state whose spring deflection balances gravity at s0."""
    r = params.reduction_ratio
    deflection = params.g_amp * math.sin(s0) / params.stiffness
    return SimState(s=float(s0), theta=r * (s0 + deflection))


def friction_ground_truth_torque(theta_dot, aux_state, gt: FrictionGroundTruth, reduction_ratio):
    """Joint-side friction torque at motor velocity theta_dot.

    Args:
        theta_dot: motor shaft velocity (rad/s)
        aux_state: hysteresis lag state z (N·m), ignored for CV and SCV
        gt: ground truth friction description
        reduction_ratio: r, maps theta_dot to the joint-side velocity

    Returns:
        friction torque in N·m
    """
    s_dot = theta_dot / reduction_ratio
    if gt.kind == GroundTruthKind.CV:
        return float(models.cv_eval(gt.params, s_dot))
    tau_scv = float(models.scv_eval(gt.params, s_dot))
    if gt.kind == GroundTruthKind.SCV:
        return tau_scv
    z = aux_state
    if gt.hysteresis_gain > 0:
        return z + gt.hysteresis_gain * math.tanh((tau_scv - z) / gt.hysteresis_gain)
    return z


def advance_friction_state(z, theta_dot, gt: FrictionGroundTruth, reduction_ratio, dt):
    """Exact first-order lag update of z toward the SCV torque over dt."""
    if gt.kind != GroundTruthKind.SCV_PLUS_HYSTERESIS:
        return z
    tau_scv = float(models.scv_eval(gt.params, theta_dot / reduction_ratio))
    return tau_scv + (z - tau_scv) * math.exp(-dt / gt.hysteresis_timeconstant)


def step(
    state: SimState,
    i_cmd,
    params: JointParams,
    gt: FrictionGroundTruth,
    dt,
    tau_ext=0.0,
) -> SimState:
    """Advances the joint by one semi-implicit Euler step.

    tau_ext is an external torque acting on the load side.
    """
    if not 0.0 < dt <= MAX_DT:
        raise ValueError("dt must be in (0, {}], got {}".format(MAX_DT, dt))
    i_cmd = min(max(float(i_cmd), -params.i_max), params.i_max)
    if params.current_time_constant == 0:
        i_m = i_cmd
    else:
        gain = min(dt / params.current_time_constant, 1.0)
        i_m = state.i_m + gain * (i_cmd - state.i_m)

    r = params.reduction_ratio
    tau_t = params.stiffness * (state.theta / r - state.s) + params.damping * (
        state.theta_dot / r - state.s_dot
    )
    tau_net = params.drive_gain * i_m - tau_t
    breakaway = models.breakaway_torque(gt.params)

    stuck = False
    if abs(state.theta_dot) < constant.KARNOPP_BAND:
        if abs(tau_net) <= breakaway:
            tau_f = tau_net
            stuck = True
        else:
            tau_f = math.copysign(breakaway, tau_net)
    else:
        tau_f = friction_ground_truth_torque(state.theta_dot, state.z, gt, r)

    if stuck:
        theta_dot = 0.0
    else:
        theta_ddot = (tau_net - tau_f) / (r * params.motor_inertia)
        theta_dot = state.theta_dot + dt * theta_ddot
        # velocity reversal inside the holding band sticks
        if theta_dot * state.theta_dot < 0 and abs(tau_net) <= breakaway:
            theta_dot = 0.0

    s_ddot = (tau_t - params.g_amp * math.sin(state.s) + tau_ext) / params.load_inertia
    s_dot = state.s_dot + dt * s_ddot
    s = state.s + dt * s_dot
    theta = state.theta + dt * theta_dot

    at_limit = False
    if s > params.s_max:
        s, s_dot, at_limit = params.s_max, min(s_dot, 0.0), True
    elif s < params.s_min:
        s, s_dot, at_limit = params.s_min, max(s_dot, 0.0), True

    z = advance_friction_state(state.z, state.theta_dot, gt, r, dt)
    new_state = SimState(
        s=s,
        s_dot=s_dot,
        theta=theta,
        theta_dot=theta_dot,
        i_m=i_m,
        t=state.t + dt,
        z=z,
        tau_F=tau_f,
        at_limit=at_limit,
    )
    _check_finite(new_state)
    return new_state


def _check_finite(state: SimState):
    for field in ("s", "s_dot", "theta", "theta_dot", "i_m", "z", "tau_F"):
        value = getattr(state, field)
        if not math.isfinite(value):
            raise SimulationFault(field, value)


@dataclass
class RawLog:
    """Logged signals of one run.

    s, theta and i_m carry sensor noise; the *_shadow channels and tau_F are
    noiseless and only serve as oracles. Only the columns of
    ``constant.RAW_LOG_COLUMNS`` go to CSV.
    """

    rate: float
    t: np.ndarray
    s: np.ndarray
    theta: np.ndarray
    i_m: np.ndarray
    s_shadow: np.ndarray
    theta_shadow: np.ndarray
    tau_F: Optional[np.ndarray] = None
    truncated: bool = False

    def __len__(self):
        return len(self.t)

    def to_csv(self, path, provenance=None):
        table_io.write_table(
            path,
            constant.RAW_LOG_COLUMNS,
            [getattr(self, name) for name in constant.RAW_LOG_COLUMNS],
            provenance,
        )

    @classmethod
    def from_csv(cls, path):
        header, cols, _ = table_io.read_table(path)
        if header != constant.RAW_LOG_COLUMNS:
            raise ValueError("unexpected raw log header {}".format(header))
        t = cols["t"]
        rate = 1.0 / float(np.median(np.diff(t))) if len(t) > 1 else constant.DEFAULT_LOG_RATE
        return cls(rate=float(round(rate)), **cols)


def run_trajectory(
    params: JointParams,
    gt: FrictionGroundTruth,
    currents,
    log_rate=constant.DEFAULT_LOG_RATE,
    noise: Optional[SensorNoise] = None,
    seed=0,
    initial_state: Optional[SimState] = None,
    dt=constant.SIM_DT,
) -> RawLog:
    """Simulates a current command sequence and logs it at log_rate.

    Commands are held between samples. The run stops at the first contact with
    a position stop; the log then ends at the last sample before contact.

    Args:
        currents: sequence of (t, A) pairs, sampled at least at log_rate
        log_rate: 500 or 1000 Hz
        noise: sensor noise, default on
        seed: seed of the noise generator
        initial_state: default is rest at s = 0

    Returns:
        RawLog
    """
    currents = np.asarray(currents, dtype=np.float64)
    if currents.size == 0:
        raise ValueError("empty current sequence")
    currents = currents.reshape(-1, 2)
    if log_rate not in constant.SUPPORTED_LOG_RATES:
        raise ValueError(
            "log_rate must be one of {}, got {}".format(
                constant.SUPPORTED_LOG_RATES,
                log_rate,
            ),
        )
    noise = noise if noise is not None else SensorNoise()
    t_cmd, i_cmd = currents[:, 0], currents[:, 1]
    log_dt = 1.0 / log_rate
    spacing = float(np.median(np.diff(t_cmd))) if len(t_cmd) > 1 else log_dt
    if spacing > log_dt * (1.0 + 1e-9):
        raise ValueError(
            "currents sampled every {} s, slower than the log rate {} Hz".format(
                spacing,
                log_rate,
            ),
        )

    steps_per_log = int(round(log_dt / dt))
    n_log = int(round((t_cmd[-1] - t_cmd[0] + spacing) * log_rate))
    t0 = float(t_cmd[0])
    sub_t = t0 + np.arange(n_log * steps_per_log) * dt
    hold_idx = np.clip(np.searchsorted(t_cmd, sub_t + 1e-12, side="right") - 1, 0, None)
    sub_i = i_cmd[hold_idx].tolist()

    state = initial_state if initial_state is not None else rest_state(params)
    state = replace(state, t=t0)
    rows = np.zeros((n_log, 4))
    n_recorded = n_log
    truncated = False
    for k in range(n_log):
        rows[k] = (state.s, state.theta, state.i_m, state.tau_F)
        if k == n_log - 1:
            break
        base = k * steps_per_log
        for j in range(steps_per_log):
            state = step(state, sub_i[base + j], params, gt, dt)
            if state.at_limit:
                truncated = True
                break
        if truncated:
            n_recorded = k + 1
            logging.info(
                "position limit reached at t=%.4f s, log truncated to %s samples",
                state.t,
                n_recorded,
            )
            break

    rows = rows[:n_recorded]
    t = t0 + np.arange(n_recorded) * log_dt
    s_shadow, theta_shadow, i_shadow, tau_f = (rows[:, c].copy() for c in range(4))
    if noise.enabled:
        rng = np.random.default_rng(seed)
        s = s_shadow + noise.sigma_s * rng.standard_normal(n_recorded)
        theta = theta_shadow + noise.sigma_theta * rng.standard_normal(n_recorded)
        i_m = i_shadow + noise.sigma_i * rng.standard_normal(n_recorded)
    else:
        s, theta, i_m = s_shadow.copy(), theta_shadow.copy(), i_shadow.copy()
    return RawLog(
        rate=float(log_rate),
        t=t,
        s=s,
        theta=theta,
        i_m=i_m,
        s_shadow=s_shadow,
        theta_shadow=theta_shadow,
        tau_F=tau_f,
        truncated=truncated,
    )
