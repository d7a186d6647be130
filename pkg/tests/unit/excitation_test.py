import math

import numpy as np
import pytest

from joint_friction_id.excitation import trajectory
from joint_friction_id.excitation.trajectory import TrajectorySpec
from joint_friction_id.friction.ttypes import TrajectoryKind
from joint_friction_id.sim import fixtures


def test_sine_grid_is_amplitude_major():
    specs = trajectory.sine_grid([0.3, 0.6, 1.0], [0.1, 0.5], 10.0)
    assert len(specs) == 6
    assert [(s.amplitude, s.frequency) for s in specs] == [
        (0.3, 0.1),
        (0.3, 0.5),
        (0.6, 0.1),
        (0.6, 0.5),
        (1.0, 0.1),
        (1.0, 0.5),
    ]
    assert all(s.kind == TrajectoryKind.SINE and s.duration_max == 10.0 for s in specs)


@pytest.mark.parametrize(
    "amps, freqs",
    [
        ([], [1.0]),
        ([0.3], []),
        ([0.6, 0.3], [1.0]),
        ([0.3], [1.0, 1.0]),
    ],
)
def test_sine_grid_rejects_bad_axes(amps, freqs):
    with pytest.raises(ValueError):
        trajectory.sine_grid(amps, freqs, 1.0)


def test_ramp_duration_stops_at_i_max():
    specs = trajectory.ramp_family([0.2, 0.5], 2.0)
    assert [s.duration_max for s in specs] == pytest.approx([10.0, 4.0])
    for spec in specs:
        samples = trajectory.command_samples(spec, rate=1000)
        assert samples[-1, 1] <= 2.0
        assert samples[-1, 1] == pytest.approx(2.0, abs=spec.slope / 1000.0 + 1e-12)
    assert trajectory.command_value(specs[0], 50.0) == 2.0
    with pytest.raises(ValueError):
        trajectory.ramp_family([0.2, 0.0], 2.0)


def test_step_family_levels():
    assert trajectory.step_family([], 3.0) == []
    specs = trajectory.step_family([0.6, -1.0], 3.0)
    assert [s.amplitude for s in specs] == [0.6, -1.0]
    assert all(s.hold_time == 3.0 and s.duration_max == 3.0 for s in specs)
    np.testing.assert_array_equal(trajectory.command_samples(specs[1], rate=100)[:, 1], -1.0)
    with pytest.raises(ValueError):
        trajectory.step_family([0.6], 0.0)


def test_initial_configurations_are_spec_major():
    specs = trajectory.step_family([0.6, -0.6], 1.0)
    out = trajectory.with_initial_configurations(specs, [-0.3, 0.0, 0.3], limits=(-0.6, 0.6))
    assert len(out) == 6
    assert [(s.amplitude, s.initial_joint_position) for s in out] == [
        (0.6, -0.3),
        (0.6, 0.0),
        (0.6, 0.3),
        (-0.6, -0.3),
        (-0.6, 0.0),
        (-0.6, 0.3),
    ]
    assert all(s.initial_joint_position == 0.0 for s in specs)


def test_initial_configuration_outside_limits():
    specs = trajectory.step_family([0.6], 1.0)
    with pytest.raises(ValueError):
        trajectory.with_initial_configurations(specs, [0.0, 0.7], limits=(-0.6, 0.6))
    assert len(trajectory.with_initial_configurations(specs, [0.0, 0.7])) == 2


def test_command_samples_reproduce_sine_at_command_rate():
    spec = trajectory.sine_grid([1.5], [2.0], 0.5)[0]
    samples = trajectory.command_samples(spec)
    assert trajectory.COMMAND_RATE == 20000
    assert samples.shape == (10000, 2)
    t = np.arange(10000) / 20000.0
    np.testing.assert_array_equal(samples[:, 0], t)
    assert np.max(np.abs(samples[:, 1] - 1.5 * np.sin(2.0 * math.pi * 2.0 * t))) < 1e-12


def test_spec_validation():
    with pytest.raises(ValueError):
        TrajectorySpec(kind=TrajectoryKind.SINE, amplitude=1.0, duration_max=1.0).validate()
    with pytest.raises(ValueError):
        TrajectorySpec(kind=TrajectoryKind.RAMP, amplitude=1.0, duration_max=0.0, slope=1.0).validate()
    spec = TrajectorySpec(kind=TrajectoryKind.STEP, amplitude=-3.0, duration_max=1.0, hold_time=1.0)
    spec.validate()
    with pytest.raises(ValueError):
        spec.validate(i_max=2.0)


def test_fixture_manifest_save_and_load(tmp_path):
    ankle = fixtures.ankle()
    specs = trajectory.fixture_manifest(ankle)
    assert len(specs) == (4 * 5 + 2 + 4) * 3
    assert len(trajectory.fixture_manifest(ankle, include_ramps=False, include_steps=False)) == 60

    path = str(tmp_path / "manifest.json")
    trajectory.save_manifest(specs, path)
    assert trajectory.load_manifest(path) == specs
