"""Ankle and knee joint fixtures.

The friction values are the identified CV/SCV parameters of a humanoid's
ankle-roll and knee joints; the drive constants are configuration defaults.
"""
from dataclasses import dataclass
from dataclasses import replace
from typing import Tuple

from joint_friction_id import constant
from joint_friction_id.friction.models import CvParams
from joint_friction_id.friction.models import ScvParams
from joint_friction_id.friction.ttypes import GroundTruthKind
from joint_friction_id.sim.jointsim import FrictionGroundTruth
from joint_friction_id.sim.jointsim import JointParams
from joint_friction_id.sim.jointsim import SensorNoise

ANKLE_CV = CvParams(k_a=10.53, k_c=1.2, k_v=0.24)
ANKLE_SCV = ScvParams(k_a=2.78, k_c=1.0005, k_v=0.29, k_s=6.0, v_s=0.13, alpha=0.6)
KNEE_CV = CvParams(k_a=50.84, k_c=8.1, k_v=5.55)
KNEE_SCV = ScvParams(k_a=16.95, k_c=5.0, k_v=5.34, k_s=9.7, v_s=5.4, alpha=0.5)

HYSTERESIS_GAIN = 0.5
HYSTERESIS_TIMECONSTANT = 0.01


@dataclass(frozen=True)
class JointFixture:
    """Everything needed to simulate, excite and evaluate one joint.

    Attributes:
     - name: fixture name
     - params: physical constants
     - ground_truth: friction the simulator injects
     - noise: sensor noise
     - amps, freqs: sine grid (A, Hz)
     - dwell: duration of one sine cell (s)
     - ramp_slopes: ramp increments (A/s)
     - step_levels, step_hold: step currents (A) and hold time (s)
     - initial_positions: starting joint positions (rad)
     - hold_position: position held in the disturbance experiment (rad)
     - reference_amplitude, reference_frequency: tracking sine (rad, Hz)
     - cv, scv: published parameter sets, used as initial guesses and baselines
    """

    name: str
    params: JointParams
    ground_truth: FrictionGroundTruth
    noise: SensorNoise
    amps: Tuple[float, ...]
    freqs: Tuple[float, ...]
    dwell: float
    ramp_slopes: Tuple[float, ...]
    step_levels: Tuple[float, ...]
    step_hold: float
    initial_positions: Tuple[float, ...]
    hold_position: float
    reference_amplitude: float
    reference_frequency: float
    cv: CvParams
    scv: ScvParams

    def with_params(self, **changes):
        return replace(self, params=replace(self.params, **changes).validate())

    def with_ground_truth(self, ground_truth: FrictionGroundTruth):
        return replace(self, ground_truth=ground_truth.validate())

    def with_noise(self, noise: SensorNoise):
        return replace(self, noise=noise)


def ankle():
    return JointFixture(
        name=constant.ANKLE_FIXTURE,
        params=JointParams(
            reduction_ratio=100.0,
            torque_constant=0.111,
            motor_inertia=1e-4,
            load_inertia=0.05,
            g_amp=0.0,
            stiffness=1e4,
            damping=5.0,
            s_min=-0.6,
            s_max=0.6,
            i_max=2.0,
            current_time_constant=0.0,
        ),
        ground_truth=FrictionGroundTruth(
            kind=GroundTruthKind.SCV_PLUS_HYSTERESIS,
            params=ANKLE_SCV,
            hysteresis_gain=HYSTERESIS_GAIN,
            hysteresis_timeconstant=HYSTERESIS_TIMECONSTANT,
        ),
        noise=SensorNoise(),
        amps=(0.3, 0.6, 1.0, 1.5),
        freqs=(0.1, 0.3, 0.5, 1.0, 2.0),
        dwell=10.0,
        ramp_slopes=(0.2, 0.5),
        step_levels=(0.6, -0.6, 1.0, -1.0),
        step_hold=3.0,
        initial_positions=(-0.3, 0.0, 0.3),
        hold_position=0.0,
        reference_amplitude=0.2,
        reference_frequency=0.5,
        cv=ANKLE_CV,
        scv=ANKLE_SCV,
    )


def knee():
    return JointFixture(
        name=constant.KNEE_FIXTURE,
        params=JointParams(
            reduction_ratio=100.0,
            torque_constant=0.111,
            motor_inertia=1e-4,
            load_inertia=0.5,
            g_amp=30.0,
            stiffness=1e4,
            damping=5.0,
            s_min=-2.0,
            s_max=0.2,
            i_max=5.0,
            current_time_constant=0.0,
        ),
        ground_truth=FrictionGroundTruth(
            kind=GroundTruthKind.SCV_PLUS_HYSTERESIS,
            params=KNEE_SCV,
            hysteresis_gain=HYSTERESIS_GAIN,
            hysteresis_timeconstant=HYSTERESIS_TIMECONSTANT,
        ),
        noise=SensorNoise(),
        amps=(0.9, 1.8, 3.0, 4.5),
        freqs=(0.1, 0.3, 0.5, 1.0, 2.0),
        dwell=10.0,
        ramp_slopes=(0.6, 1.5),
        step_levels=(1.8, -1.8, 3.0, -3.0),
        step_hold=3.0,
        initial_positions=(-0.9, -0.6, -0.3),
        hold_position=-0.6,
        reference_amplitude=0.2,
        reference_frequency=0.5,
        cv=KNEE_CV,
        scv=KNEE_SCV,
    )


_FIXTURES = {
    constant.ANKLE_FIXTURE: ankle,
    constant.KNEE_FIXTURE: knee,
}


def get_fixture(name) -> JointFixture:
    if name not in _FIXTURES:
        raise ValueError(
            "Invalid fixture {}, values should be one of {}".format(
                name,
                constant.SUPPORTED_FIXTURES,
            ),
        )
    return _FIXTURES[name]()
