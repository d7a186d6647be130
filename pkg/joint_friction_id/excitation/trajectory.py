"""电流激励轨迹：正弦网格、斜坡、阶跃

Commands are pure functions of time, so any sampling rate reproduces them.
"""
import math
from dataclasses import dataclass
from dataclasses import replace
from typing import List
from typing import Optional
from typing import Sequence

import numpy as np

from joint_friction_id import constant
from joint_friction_id.friction.ttypes import TrajectoryKind
from joint_friction_id.friction.ttypes import name_of
from joint_friction_id.friction.ttypes import value_of
from joint_friction_id.io import json_io

COMMAND_RATE = int(round(1.0 / constant.SIM_DT))


@dataclass(frozen=True)
class TrajectorySpec:
    """
    Attributes:
     - kind: TrajectoryKind value
     - amplitude: peak current (A); the signed level for STEP
     - frequency: Hz, SINE only
     - slope: A/s, RAMP only
     - hold_time: s, STEP only
     - duration_max: s
     - initial_joint_position: rad
    """

    kind: int
    amplitude: float
    duration_max: float
    frequency: Optional[float] = None
    slope: Optional[float] = None
    hold_time: Optional[float] = None
    initial_joint_position: float = 0.0

    def validate(self, i_max=None):
        name_of(TrajectoryKind, self.kind)
        if self.duration_max <= 0:
            raise ValueError("duration_max must be > 0, got {}".format(self.duration_max))
        if i_max is not None and abs(self.amplitude) > i_max:
            raise ValueError(
                "amplitude {} A exceeds i_max {} A".format(self.amplitude, i_max),
            )
        if self.kind == TrajectoryKind.SINE and not (self.frequency and self.frequency > 0):
            raise ValueError("SINE needs frequency > 0, got {}".format(self.frequency))
        if self.kind == TrajectoryKind.RAMP and not (self.slope and self.slope > 0):
            raise ValueError("RAMP needs slope > 0, got {}".format(self.slope))
        if self.kind == TrajectoryKind.STEP and not (self.hold_time and self.hold_time > 0):
            raise ValueError("STEP needs hold_time > 0, got {}".format(self.hold_time))
        return self

    def to_dict(self):
        return {
            "kind": name_of(TrajectoryKind, self.kind),
            "amplitude": self.amplitude,
            "duration_max": self.duration_max,
            "frequency": self.frequency,
            "slope": self.slope,
            "hold_time": self.hold_time,
            "initial_joint_position": self.initial_joint_position,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            kind=value_of(TrajectoryKind, d["kind"]),
            amplitude=float(d["amplitude"]),
            duration_max=float(d["duration_max"]),
            frequency=d.get("frequency"),
            slope=d.get("slope"),
            hold_time=d.get("hold_time"),
            initial_joint_position=float(d.get("initial_joint_position", 0.0)),
        ).validate()


def _check_increasing(name, values):
    if len(values) == 0:
        raise ValueError("{} must not be empty".format(name))
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError("{} must be strictly increasing, got {}".format(name, list(values)))


def sine_grid(amps: Sequence[float], freqs: Sequence[float], duration) -> List[TrajectorySpec]:
    """Amplitude-major, frequency-minor grid of sine specs."""
    _check_increasing("amps", amps)
    _check_increasing("freqs", freqs)
    return [
        TrajectorySpec(
            kind=TrajectoryKind.SINE,
            amplitude=float(a),
            frequency=float(f),
            duration_max=float(duration),
        ).validate()
        for a in amps
        for f in freqs
    ]


def ramp_family(slopes: Sequence[float], i_max) -> List[TrajectorySpec]:
    """One ramp per slope, each ending when the command reaches i_max."""
    specs = []
    for slope in slopes:
        if slope <= 0:
            raise ValueError("ramp slope must be > 0, got {}".format(slope))
        specs.append(
            TrajectorySpec(
                kind=TrajectoryKind.RAMP,
                amplitude=float(i_max),
                slope=float(slope),
                duration_max=float(i_max) / float(slope),
            ).validate(),
        )
    return specs


def step_family(levels: Sequence[float], hold) -> List[TrajectorySpec]:
    if hold <= 0:
        raise ValueError("step hold must be > 0, got {}".format(hold))
    return [
        TrajectorySpec(
            kind=TrajectoryKind.STEP,
            amplitude=float(level),
            hold_time=float(hold),
            duration_max=float(hold),
        ).validate()
        for level in levels
    ]


def with_initial_configurations(
    specs: Sequence[TrajectorySpec],
    initial_positions: Sequence[float],
    limits=None,
) -> List[TrajectorySpec]:
    """Repeats every spec from every initial position, spec-major.

    Args:
        specs: trajectories to repeat
        initial_positions: joint positions (rad)
        limits: optional (s_min, s_max); positions outside are rejected
    """
    if limits is not None:
        s_min, s_max = limits
        for pos in initial_positions:
            if not s_min <= pos <= s_max:
                raise ValueError(
                    "initial position {} outside limits [{}, {}]".format(pos, s_min, s_max),
                )
    return [
        replace(spec, initial_joint_position=float(pos))
        for spec in specs
        for pos in initial_positions
    ]


def command_value(spec: TrajectorySpec, t):
    """Current command (A) at time t, scalar or array."""
    t = np.asarray(t, dtype=np.float64)
    if spec.kind == TrajectoryKind.SINE:
        return spec.amplitude * np.sin(2.0 * math.pi * spec.frequency * t)
    if spec.kind == TrajectoryKind.RAMP:
        return np.minimum(spec.slope * t, spec.amplitude)
    return np.full_like(t, spec.amplitude)


def command_samples(spec: TrajectorySpec, rate=COMMAND_RATE):
    """Samples a spec over [0, duration_max) as an (n, 2) array of (t, A)."""
    n = max(int(round(spec.duration_max * rate)), 1)
    t = np.arange(n) / float(rate)
    return np.column_stack([t, command_value(spec, t)])


def save_manifest(specs: Sequence[TrajectorySpec], path, provenance=None):
    doc = {"trajectories": [spec.to_dict() for spec in specs]}
    if provenance is not None:
        doc["provenance"] = provenance.to_dict()
    json_io.dump_json(doc, path)


def load_manifest(path) -> List[TrajectorySpec]:
    doc = json_io.load_json(path)
    return [TrajectorySpec.from_dict(d) for d in doc["trajectories"]]


def fixture_manifest(fixture, include_ramps=True, include_steps=True):
    """The full excitation batch of a joint fixture."""
    specs = sine_grid(fixture.amps, fixture.freqs, fixture.dwell)
    if include_ramps:
        specs += ramp_family(fixture.ramp_slopes, fixture.params.i_max)
    if include_steps:
        specs += step_family(fixture.step_levels, fixture.step_hold)
    specs = with_initial_configurations(
        specs,
        fixture.initial_positions,
        limits=(fixture.params.s_min, fixture.params.s_max),
    )
    for spec in specs:
        spec.validate(i_max=fixture.params.i_max)
    return specs
