import math

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from joint_friction_id import constant
from joint_friction_id.control.closed_loop import DisturbancePulse
from joint_friction_id.control.closed_loop import ExperimentTrace
from joint_friction_id.control.closed_loop import LoopSettings
from joint_friction_id.control.compensator import CompensatorHandle
from joint_friction_id.control.controller import ControllerGains
from joint_friction_id.evaluation import protocols
from joint_friction_id.evaluation import report
from joint_friction_id.evaluation.protocols import EvalSettings
from joint_friction_id.evaluation.protocols import ExperimentReport
from joint_friction_id.evaluation.wrench import Pose
from joint_friction_id.evaluation.wrench import Wrench
from joint_friction_id.evaluation.wrench import joint_axis_moment
from joint_friction_id.evaluation.wrench import wrench_transform
from joint_friction_id.io.table_io import Provenance
from joint_friction_id.sim import fixtures


def _trace(s_des, s, rate=1000.0):
    n = len(s)
    zeros = np.zeros(n)
    return ExperimentTrace(rate, np.arange(n) / rate, np.asarray(s_des), np.asarray(s), *[zeros] * 6)


def _random_pose(seed):
    rng = np.random.default_rng(seed)
    return Pose(Rotation.random(random_state=seed).as_matrix(), rng.standard_normal(3))


def _report(model, kp):
    return ExperimentReport(
        model_kind=model,
        kp=kp,
        kd=4.0,
        tracking_rmse=0.04,
        tracking_moment=1.5,
        recovery_kp=kp if kp is not None else 1e4,
        recovery_rmse=0.01,
        disturbance_moment=12.0,
        common_kp=550.0,
        common_recovery_rmse=0.2,
        energy_proxy=3.25,
    )


def test_tracking_rmse_examples():
    s = np.linspace(0, 1, 200)
    assert protocols.tracking_rmse(_trace(s, s)) == 0.0
    assert protocols.tracking_rmse(_trace(s + 0.01, s)) == pytest.approx(0.01)
    t = np.arange(2000) / 1000.0
    error = 0.03 * np.sin(2 * np.pi * 2.0 * t)
    assert protocols.tracking_rmse(_trace(error, np.zeros(2000))) == pytest.approx(0.03 / math.sqrt(2), rel=1e-6)
    with pytest.raises(ValueError):
        protocols.tracking_rmse(_trace(s, s), t_start=10.0)


def test_kp_grid():
    grid = protocols.kp_grid()
    assert len(grid) == 69
    assert grid[0] == 1.0
    assert grid[-1] <= 2e4
    np.testing.assert_allclose(grid[1:] / grid[:-1], 10 ** (1 / 16))
    assert np.any(np.isclose(grid, 10.0))
    with pytest.raises(ValueError):
        protocols.kp_grid((0.0, 10.0))


@pytest.fixture
def fake_tracking(monkeypatch):
    # RMSE = 1 / kp，随 K_p 单调下降
    monkeypatch.setattr(protocols, "tracking_experiment", lambda compensator, kp, fixture, settings: kp)
    monkeypatch.setattr(protocols, "tracking_rmse", lambda trace, t_start: 1.0 / trace)


def test_binary_search_agrees_with_linear_scan(fake_tracking):
    grid = protocols.kp_grid((1.0, 1000.0), 4)
    none = CompensatorHandle.none()
    ankle = fixtures.ankle()
    binary = protocols.min_kp_search(none, 0.05, grid, ankle, method="binary")
    linear = protocols.min_kp_search(none, 0.05, grid, ankle, method="linear")
    assert binary.kp == linear.kp
    assert binary.kp == grid[np.argmax(grid >= 20.0)]
    assert len(binary.evaluations) < len(linear.evaluations)
    assert binary.rmse <= 0.05


def test_search_not_achieved(fake_tracking):
    grid = protocols.kp_grid((1.0, 10.0), 4)
    result = protocols.min_kp_search(CompensatorHandle.none(), 0.05, grid, fixtures.ankle())
    assert not result.achieved
    assert result.kp is None
    assert result.rmse == pytest.approx(0.1)
    with pytest.raises(ValueError):
        protocols.min_kp_search(CompensatorHandle.none(), 0.05, [3.0, 2.0], fixtures.ankle())


def test_infinite_threshold_picks_first_kp():
    settings = EvalSettings(tracking_duration=0.3, settle_time=0.1)
    grid = [50.0, 100.0, 200.0]
    result = protocols.min_kp_search(
        CompensatorHandle.scv(fixtures.ANKLE_SCV),
        float("inf"),
        grid,
        fixtures.ankle(),
        settings,
    )
    assert result.kp == 50.0


def test_eval_settings_validation():
    with pytest.raises(ValueError):
        EvalSettings(search_method="golden").validate()
    with pytest.raises(ValueError):
        EvalSettings(settle_time=7.0).validate()
    with pytest.raises(ValueError):
        EvalSettings(displacement_threshold=0.0).validate()
    with pytest.raises(ValueError):
        EvalSettings(moment_iterations=0).validate()


def test_wrench_identity_and_cross_product():
    w = Wrench([1.0, 2.0, 3.0], [0.1, 0.2, 0.3])
    same = wrench_transform(w, np.eye(3), np.zeros(3))
    np.testing.assert_array_equal(same.force, w.force)
    np.testing.assert_array_equal(same.moment, w.moment)

    pushed = wrench_transform(Wrench([1.0, 0.0, 0.0], np.zeros(3)), np.eye(3), [0.0, 0.0, 1.0])
    np.testing.assert_allclose(pushed.moment, [0.0, 1.0, 0.0])


def test_wrench_transform_composes():
    a, b = _random_pose(1), _random_pose(2)
    w = Wrench(np.array([0.3, -1.2, 2.0]), np.array([0.5, 0.1, -0.7]))
    stepwise = wrench_transform(wrench_transform(w, b.rotation, b.translation), a.rotation, a.translation)
    composed = a.compose(b)
    direct = wrench_transform(w, composed.rotation, composed.translation)
    np.testing.assert_allclose(stepwise.force, direct.force, atol=1e-12)
    np.testing.assert_allclose(stepwise.moment, direct.moment, atol=1e-12)
    assert np.linalg.norm(direct.force) == pytest.approx(np.linalg.norm(w.force), abs=1e-12)


def test_rotation_must_be_proper():
    with pytest.raises(ValueError):
        wrench_transform(Wrench(np.ones(3), np.zeros(3)), np.diag([1.0, 1.0, -1.0]), np.zeros(3))
    with pytest.raises(ValueError):
        Wrench([1.0, 2.0], [0.0, 0.0, 0.0])


def test_joint_axis_moment():
    assert joint_axis_moment(Wrench(np.zeros(3), [2.5, 0.0, 0.0]), Pose.identity()) == 2.5
    assert joint_axis_moment(Wrench([1.0, -2.0, 3.0], np.zeros(3)), Pose.identity()) == 0.0

    pose = _random_pose(3)
    w = Wrench(np.array([1.0, 0.5, -2.0]), np.array([0.2, -0.1, 0.4]))
    R, p = pose.rotation, pose.translation
    expected = np.cross(p, R @ w.force)[0] + (R @ w.moment)[0]
    assert joint_axis_moment(w, pose) == pytest.approx(expected, abs=1e-12)


def test_sensor_wrench_recovers_joint_torque():
    settings = EvalSettings()
    wrench, pose = protocols.sensor_wrench(12.0, settings)
    assert wrench.frame == "sensor"
    assert joint_axis_moment(wrench, pose) == pytest.approx(12.0)


def test_recovery_without_disturbance_is_noise_floor():
    ankle = fixtures.ankle()
    settings = EvalSettings(loop=LoopSettings(seed=1))
    result = protocols.disturbance_recovery(
        CompensatorHandle.none(),
        ControllerGains(200.0),
        None,
        ankle,
        settings,
    )
    assert result.moment == 0.0
    assert result.recovery_rmse < 3 * constant.ENCODER_NOISE_STD
    assert len(result.trace) == int(constant.RECOVERY_WINDOW * constant.CONTROL_RATE)


def test_joint_displacement_measures_motion_during_pulse():
    s = np.full(3000, 0.1)
    s[1000:2000] = 0.1 + np.linspace(0.0, 0.05, 1000)
    s[2000:] = 0.4
    trace = _trace(np.zeros(3000), s)
    pulse = DisturbancePulse(6.0, 1.0)
    assert protocols.joint_displacement(trace, pulse) == pytest.approx(0.05)
    # 脉冲从 0 开始时以保持位置为基准
    assert protocols.joint_displacement(trace, DisturbancePulse(6.0, 0.0), hold_position=0.05) == pytest.approx(0.05)
    with pytest.raises(ValueError):
        protocols.joint_displacement(trace, DisturbancePulse(6.0, 5.0))


def test_report_labels():
    assert _report("NONE", None).kp_label == "not achieved"
    assert _report("PINN", 550.0).kp_label == "550"
    assert _report("CV", 1e4).to_dict()["kp"] == 1e4


def test_empty_report_has_headers_only(tmp_path):
    report.emit_report([], str(tmp_path))
    with open(str(tmp_path / report.TRACKING_CSV)) as f:
        assert f.read() == ",".join(constant.REPORT_COLUMNS) + "\n"
    with open(str(tmp_path / report.REPORT_FILE)) as f:
        assert "| model | rmse | moment | kp | kd |" in f.read().replace("  ", " ")


def test_report_rows_and_bytes(tmp_path):
    reports = [_report("NONE", None), _report("PINN", 550.0)]
    provenance = Provenance("abc123", 7)
    first = tmp_path / "a"
    second = tmp_path / "b"
    report.emit_report(reports, str(first), provenance, title="ankle")
    report.emit_report(reports, str(second), provenance, title="ankle")
    for name in (report.REPORT_FILE, report.TRACKING_CSV, report.RECOVERY_CSV, report.COMMON_RECOVERY_CSV):
        assert (first / name).read_bytes() == (second / name).read_bytes()

    lines = (first / report.TRACKING_CSV).read_text().splitlines()
    assert lines[0] == "# config_hash=abc123 seed=7"
    assert lines[1] == "model,rmse,moment,kp,kd"
    assert lines[2] == "NONE,0.04,1.5,not achieved,4"
    assert lines[3] == "PINN,0.04,1.5,550,4"

    recovery = (first / report.RECOVERY_CSV).read_text().splitlines()
    assert recovery[1:] == ["model,recovery_rmse,moment,kp,kd", "NONE,0.01,12,10000,4", "PINN,0.01,12,550,4"]
    common = (first / report.COMMON_RECOVERY_CSV).read_text().splitlines()
    assert common[1:] == ["model,recovery_rmse,kp,kd", "NONE,0.2,550,4", "PINN,0.2,550,4"]
    text = (first / report.REPORT_FILE).read_text()
    assert text.startswith("<!-- config_hash=abc123 seed=7 -->")
    assert "not achieved" in text


def test_plot_data_per_model(tmp_path):
    traces = {"SCV": _trace(np.zeros(5), np.ones(5)), "CV": _trace(np.zeros(5), np.zeros(5))}
    paths = report.emit_plot_data(traces, str(tmp_path), "tracking")
    assert sorted(paths) == ["CV", "SCV"]
    assert paths["SCV"].endswith("tracking_scv.csv")
    np.testing.assert_array_equal(ExperimentTrace.from_csv(paths["SCV"]).s, np.ones(5))
