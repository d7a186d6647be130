"""评估协议

Minimum-K_p search for sine tracking, disturbance recovery at a hold
position, the smallest push that moves a held joint and the report rows
built from them. K_d stays fixed; every experiment owns its simulator
state, so models are evaluated concurrently.
"""
import logging
import math
from dataclasses import asdict
from dataclasses import dataclass
from dataclasses import field
from typing import Dict
from typing import List
from typing import Optional
from typing import Sequence

import numpy as np

from joint_friction_id import constant
from joint_friction_id.control.closed_loop import DisturbancePulse
from joint_friction_id.control.closed_loop import ExperimentTrace
from joint_friction_id.control.closed_loop import HoldReference
from joint_friction_id.control.closed_loop import LoopSettings
from joint_friction_id.control.closed_loop import SineReference
from joint_friction_id.control.closed_loop import run_closed_loop
from joint_friction_id.control.compensator import CompensatorHandle
from joint_friction_id.control.controller import ControllerGains
from joint_friction_id.evaluation.wrench import Pose
from joint_friction_id.evaluation.wrench import Wrench
from joint_friction_id.evaluation.wrench import joint_axis_moment
from joint_friction_id.friction import models
from joint_friction_id.friction.ttypes import ModelKind
from joint_friction_id.friction.ttypes import name_of
from joint_friction_id.sim.fixtures import JointFixture
from joint_friction_id.util import parallel

SEARCH_METHODS = ("binary", "linear")
NOT_ACHIEVED = "not achieved"
MAX_PUSH_DOUBLINGS = 12


@dataclass(frozen=True)
class EvalSettings:
    """
    Attributes:
     - tracking_duration: length of a tracking run (s)
     - settle_time: start of the RMSE window of a tracking run (s)
     - kd: fixed derivative gain
     - rmse_threshold: tracking RMSE counted as accurate (rad)
     - kp_bounds, kp_points_per_decade: logarithmic K_p grid
     - search_method: "binary" assumes RMSE falls with K_p, "linear" scans
     - disturbance_amplitude: pulse torque (N·m), None means twice the
       breakaway torque of the fixture
     - disturbance_start: pulse start (s)
     - displacement_threshold: joint motion counted as moved by a push (rad)
     - moment_iterations: bisection steps of the displacing-moment search
     - lever_arm: distance from the joint axis to the point of push (m)
     - sensor_yaw: rotation of the sensor frame about the joint z-axis (rad)
     - loop: closed-loop settings
    """

    tracking_duration: float = 6.0
    settle_time: float = 2.0
    kd: float = constant.DEFAULT_KD
    rmse_threshold: float = constant.RMSE_THRESHOLD
    kp_bounds: Sequence[float] = constant.KP_GRID_BOUNDS
    kp_points_per_decade: int = constant.KP_POINTS_PER_DECADE
    search_method: str = "binary"
    disturbance_amplitude: Optional[float] = None
    disturbance_start: float = 1.0
    displacement_threshold: float = constant.DISPLACEMENT_THRESHOLD
    moment_iterations: int = constant.MOMENT_SEARCH_ITERATIONS
    lever_arm: float = 0.2
    sensor_yaw: float = math.pi / 6
    loop: LoopSettings = LoopSettings()

    def validate(self):
        if self.search_method not in SEARCH_METHODS:
            raise ValueError(
                "Invalid search_method %s, values should be one of %s"
                % (self.search_method, SEARCH_METHODS),
            )
        if not 0.0 <= self.settle_time < self.tracking_duration:
            raise ValueError(
                "settle_time must be in [0, tracking_duration), got {}".format(self.settle_time),
            )
        if self.lever_arm <= 0:
            raise ValueError("lever_arm must be > 0, got {}".format(self.lever_arm))
        if self.displacement_threshold <= 0 or self.moment_iterations < 1:
            raise ValueError(
                "displacement_threshold must be > 0 and moment_iterations >= 1, got {} and {}".format(
                    self.displacement_threshold,
                    self.moment_iterations,
                ),
            )
        self.loop.validate()
        return self


def tracking_rmse(trace: ExperimentTrace, t_start=0.0):
    """RMS of s_des - s over t >= t_start (rad)."""
    window = trace.t >= t_start
    if not np.any(window):
        raise ValueError("trace has no samples after t_start={}".format(t_start))
    error = trace.s_des[window] - trace.s[window]
    return float(np.sqrt(np.mean(error * error)))


def kp_grid(
    bounds=constant.KP_GRID_BOUNDS,
    points_per_decade=constant.KP_POINTS_PER_DECADE,
):
    """Logarithmic grid 10^(k / points_per_decade) * low, capped at high."""
    low, high = bounds
    if not 0 < low <= high:
        raise ValueError("kp bounds must satisfy 0 < low <= high, got {}".format(bounds))
    if points_per_decade < 1:
        raise ValueError("points_per_decade must be >= 1, got {}".format(points_per_decade))
    n = int(math.floor(math.log10(high / low) * points_per_decade + 1e-9)) + 1
    return low * 10.0 ** (np.arange(n) / points_per_decade)


def _breakaway(fixture: JointFixture):
    return models.breakaway_torque(fixture.ground_truth.params)


def tracking_experiment(
    compensator: CompensatorHandle,
    kp,
    fixture: JointFixture,
    settings: EvalSettings = EvalSettings(),
) -> ExperimentTrace:
    reference = SineReference(
        fixture.reference_amplitude,
        fixture.reference_frequency,
        fixture.hold_position,
    )
    return run_closed_loop(
        reference,
        ControllerGains(kp, settings.kd),
        compensator,
        fixture.params,
        fixture.ground_truth,
        settings.tracking_duration,
        settings=settings.loop,
    )


@dataclass
class MinKpResult:
    model: str
    kp: Optional[float]
    rmse: float
    evaluations: Dict[float, float] = field(default_factory=dict)

    @property
    def achieved(self):
        return self.kp is not None


def min_kp_search(
    compensator: CompensatorHandle,
    rmse_threshold,
    grid,
    fixture: JointFixture,
    settings: EvalSettings = EvalSettings(),
    method=None,
) -> MinKpResult:
    """Smallest grid K_p whose tracking RMSE is within the threshold.

    The binary method evaluates O(log n) grid points and agrees with the
    linear scan whenever RMSE does not increase with K_p.
    """
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim != 1 or len(grid) == 0 or np.any(np.diff(grid) <= 0):
        raise ValueError("kp grid must be nonempty and strictly increasing")
    method = method or settings.search_method
    if method not in SEARCH_METHODS:
        raise ValueError(
            "Invalid search method %s, values should be one of %s" % (method, SEARCH_METHODS),
        )
    evaluations = {}

    def rmse_at(i):
        kp = float(grid[i])
        if kp not in evaluations:
            trace = tracking_experiment(compensator, kp, fixture, settings)
            evaluations[kp] = tracking_rmse(trace, settings.settle_time)
            logging.debug("%s kp=%.6g rmse=%.6g", compensator.name, kp, evaluations[kp])
        return evaluations[kp]

    found = None
    if method == "linear":
        found = next((i for i in range(len(grid)) if rmse_at(i) <= rmse_threshold), None)
    elif rmse_at(len(grid) - 1) <= rmse_threshold:
        lo, hi = 0, len(grid) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if rmse_at(mid) <= rmse_threshold:
                hi = mid
            else:
                lo = mid + 1
        found = lo

    if found is None:
        logging.warning(
            "%s does not reach rmse %s up to kp=%s",
            compensator.name,
            rmse_threshold,
            grid[-1],
        )
        return MinKpResult(compensator.name, None, evaluations[float(grid[-1])], evaluations)
    kp = float(grid[found])
    logging.info("%s min kp=%.6g rmse=%.6g", compensator.name, kp, evaluations[kp])
    return MinKpResult(compensator.name, kp, evaluations[kp], evaluations)


def sensor_wrench(torque, settings: EvalSettings = EvalSettings()):
    """Wrench a load-side sensor reads when a push produces ``torque`` about the joint.

    The push is a pure force at the sensor origin, which sits lever_arm
    along the joint y-axis with its frame yawed by sensor_yaw.

    Returns:
        (wrench in the sensor frame, sensor pose in the joint frame)
    """
    c, s = math.cos(settings.sensor_yaw), math.sin(settings.sensor_yaw)
    pose = Pose(
        np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]),
        np.array([0.0, settings.lever_arm, 0.0]),
    )
    force_joint = np.array([0.0, 0.0, torque / settings.lever_arm])
    return Wrench(pose.rotation.T @ force_joint, np.zeros(3), "sensor"), pose


@dataclass
class RecoveryResult:
    recovery_rmse: float
    moment: float
    trace: ExperimentTrace


def disturbance_recovery(
    compensator: CompensatorHandle,
    gains: ControllerGains,
    pulse: Optional[DisturbancePulse],
    fixture: JointFixture,
    settings: EvalSettings = EvalSettings(),
) -> RecoveryResult:
    """Holds the fixture position, applies the pulse and scores the return.

    The RMSE covers the recovery window after the pulse ends; without a pulse
    it covers the same window from t = 0. The reported moment is recovered
    from the synthesized sensor wrench.
    """
    t_from = pulse.t_end if pulse is not None else 0.0
    duration = t_from + constant.RECOVERY_WINDOW
    trace = run_closed_loop(
        HoldReference(fixture.hold_position),
        gains,
        compensator,
        fixture.params,
        fixture.ground_truth,
        duration,
        disturbance=pulse,
        settings=settings.loop,
    )
    moment = 0.0
    if pulse is not None:
        wrench, pose = sensor_wrench(pulse.amplitude, settings)
        moment = abs(joint_axis_moment(wrench, pose))
    return RecoveryResult(tracking_rmse(trace, t_from), moment, trace)


def joint_displacement(trace: ExperimentTrace, pulse: DisturbancePulse, hold_position=0.0):
    """Largest |s - s_rest| while the pulse acts (rad).

    s_rest is the mean measured position before the pulse, or hold_position
    when the pulse starts at t = 0.
    """
    before = trace.s[trace.t < pulse.t_start]
    rest = float(np.mean(before)) if len(before) else hold_position
    during = (trace.t >= pulse.t_start) & (trace.t < pulse.t_end)
    if not np.any(during):
        raise ValueError("trace ends before the pulse at t={}".format(pulse.t_start))
    return float(np.max(np.abs(trace.s[during] - rest)))


def displacing_moment(
    compensator: CompensatorHandle,
    gains: ControllerGains,
    fixture: JointFixture,
    settings: EvalSettings = EvalSettings(),
):
    """Smallest joint-axis moment (N·m) of a pulse that moves the held joint.

    The pulse torque starts at the breakaway torque of the fixture and doubles
    until the joint leaves its rest position by more than the displacement
    threshold; bisection then narrows the bracket. The upper end of the final
    bracket is pushed through the synthesized sensor wrench.

    Raises:
        ValueError: the joint stays put up to MAX_PUSH_DOUBLINGS doublings
    """
    reference = HoldReference(fixture.hold_position)

    def displaced(amplitude):
        pulse = DisturbancePulse(amplitude, settings.disturbance_start)
        trace = run_closed_loop(
            reference,
            gains,
            compensator,
            fixture.params,
            fixture.ground_truth,
            pulse.t_end,
            disturbance=pulse,
            settings=settings.loop,
        )
        return joint_displacement(trace, pulse, fixture.hold_position) > settings.displacement_threshold

    lo, hi = 0.0, _breakaway(fixture) or 1.0
    doublings = 0
    while not displaced(hi):
        if doublings == MAX_PUSH_DOUBLINGS:
            logging.error("%s holds against %s N·m at kp=%s", compensator.name, hi, gains.kp)
            raise ValueError("joint does not move under a push of {} N·m".format(hi))
        lo, hi = hi, 2.0 * hi
        doublings += 1
    for _ in range(settings.moment_iterations):
        mid = 0.5 * (lo + hi)
        if displaced(mid):
            hi = mid
        else:
            lo = mid
    wrench, pose = sensor_wrench(hi, settings)
    moment = abs(joint_axis_moment(wrench, pose))
    logging.info("%s kp=%.6g moves under %.6g N·m", compensator.name, gains.kp, moment)
    return moment


@dataclass
class ExperimentReport:
    """
    Attributes:
     - model_kind: NONE, CV, SCV or PINN
     - kp: minimum K_p of the tracking search, None when not achieved
     - kd: fixed derivative gain
     - tracking_rmse: RMSE at kp, or at the largest grid K_p
     - tracking_moment: peak |tau_des| over the tracking RMSE window (N·m)
     - recovery_kp: K_p of the recovery run, kp or the largest grid K_p
     - recovery_rmse: RMSE after the disturbance at recovery_kp
     - disturbance_moment: smallest joint-axis moment that moves the held
       joint at recovery_kp (N·m)
     - common_kp: K_p shared by all models
     - common_recovery_rmse: RMSE after the disturbance at common_kp
     - energy_proxy: sum of i_ref^2 dt of tracking at common_kp (A^2·s)
     - trace_path: tracking trace file, empty until written
    """

    model_kind: str
    kp: Optional[float]
    kd: float
    tracking_rmse: float
    tracking_moment: float
    recovery_kp: float
    recovery_rmse: float
    disturbance_moment: float
    common_kp: float
    common_recovery_rmse: float
    energy_proxy: float
    trace_path: str = ""

    @property
    def kp_label(self):
        return NOT_ACHIEVED if self.kp is None else "%.6g" % self.kp

    def to_dict(self):
        return asdict(self)


@dataclass
class EvaluationResult:
    reports: List[ExperimentReport]
    tracking_traces: Dict[str, ExperimentTrace]
    recovery_traces: Dict[str, ExperimentTrace]
    common_recovery_traces: Dict[str, ExperimentTrace]


def _score_model(compensator, search: MinKpResult, common_kp, grid, fixture, settings):
    own_kp = search.kp if search.achieved else float(grid[-1])
    own_gains = ControllerGains(own_kp, settings.kd)
    tracking = tracking_experiment(compensator, own_kp, fixture, settings)
    window = tracking.t >= settings.settle_time
    amplitude = settings.disturbance_amplitude
    if amplitude is None:
        amplitude = 2.0 * _breakaway(fixture)
    pulse = DisturbancePulse(amplitude, settings.disturbance_start)
    recovery = disturbance_recovery(compensator, own_gains, pulse, fixture, settings)

    common, common_recovery = tracking, recovery
    if common_kp != own_kp:
        common_gains = ControllerGains(common_kp, settings.kd)
        common = tracking_experiment(compensator, common_kp, fixture, settings)
        common_recovery = disturbance_recovery(compensator, common_gains, pulse, fixture, settings)

    report = ExperimentReport(
        model_kind=compensator.name,
        kp=search.kp,
        kd=settings.kd,
        tracking_rmse=tracking_rmse(tracking, settings.settle_time),
        tracking_moment=float(np.max(np.abs(tracking.tau_des[window]))),
        recovery_kp=own_kp,
        recovery_rmse=recovery.recovery_rmse,
        disturbance_moment=displacing_moment(compensator, own_gains, fixture, settings),
        common_kp=common_kp,
        common_recovery_rmse=common_recovery.recovery_rmse,
        energy_proxy=common.energy_proxy(),
    )
    return report, tracking, recovery.trace, common_recovery.trace


def run_evaluation(
    compensators: Sequence[CompensatorHandle],
    fixture: JointFixture,
    settings: EvalSettings = EvalSettings(),
    parallelism=1,
) -> EvaluationResult:
    """Min-K_p search per model, then tracking, recovery and energy runs.

    Every model is pushed and scored at its own minimum K_p (the largest grid
    K_p when not achieved). Energy and a second recovery run use a common K_p:
    the PINN's minimum K_p when a PINN model is evaluated and reached the
    threshold, else the largest minimum K_p found.
    """
    settings.validate()
    if len({c.name for c in compensators}) != len(compensators):
        raise ValueError("compensator kinds must be distinct")
    grid = kp_grid(settings.kp_bounds, settings.kp_points_per_decade)
    searches = parallel.run_parallel(
        min_kp_search,
        [
            {
                "compensator": c,
                "rmse_threshold": settings.rmse_threshold,
                "grid": grid,
                "fixture": fixture,
                "settings": settings,
            }
            for c in compensators
        ],
        parallelism=parallelism,
        desc="min kp search",
    )
    by_name = {s.model: s for s in searches}
    pinn = by_name.get(name_of(ModelKind, ModelKind.PINN))
    if pinn is not None and pinn.achieved:
        common_kp = pinn.kp
    else:
        achieved = [s.kp for s in searches if s.achieved]
        common_kp = max(achieved) if achieved else float(grid[-1])

    scored = parallel.run_parallel(
        _score_model,
        [
            {
                "compensator": c,
                "search": s,
                "common_kp": common_kp,
                "grid": grid,
                "fixture": fixture,
                "settings": settings,
            }
            for c, s in zip(compensators, searches)
        ],
        parallelism=parallelism,
        desc="evaluate",
    )
    reports = [row[0] for row in scored]
    return EvaluationResult(
        reports,
        {r.model_kind: t for r, t, _, _ in scored},
        {r.model_kind: t for r, _, t, _ in scored},
        {r.model_kind: t for r, _, _, t in scored},
    )
