import numpy as np
import pytest

from joint_friction_id import constant
from joint_friction_id.sigproc import dataset as dataset_util
from joint_friction_id.sigproc import filters
from joint_friction_id.sigproc import pipeline
from joint_friction_id.sigproc.dataset import Dataset
from joint_friction_id.sigproc.dynamics import RigidLoadDynamics
from joint_friction_id.sigproc.dynamics import inverse_dynamics_single_joint
from joint_friction_id.sim import fixtures
from joint_friction_id.sim.jointsim import JointParams
from joint_friction_id.sim.jointsim import RawLog

RATE = 1000.0


def _sine(freq, duration, rate=RATE):
    t = np.arange(int(duration * rate)) / rate
    return t, np.sin(2 * np.pi * freq * t)


def _dataset(n, rate=500.0, **cols):
    t = np.arange(n) / rate
    base = {name: np.zeros(n) for name in dataset_util.SIGNAL_COLUMNS}
    base.update(cols)
    return Dataset(rate=rate, t=t, **base)


def test_lowpass_keeps_constant():
    x = np.full(500, 1.7)
    np.testing.assert_allclose(filters.butterworth_lowpass(x, RATE), x, atol=1e-12)
    np.testing.assert_allclose(filters.butterworth_lowpass(x, RATE, zero_phase=False), x, atol=1e-12)


def test_single_pass_gain_at_cutoff():
    cutoff = 20.0
    _, x = _sine(cutoff, 2.0)
    y = filters.butterworth_lowpass(x, RATE, cutoff, zero_phase=False)
    assert np.max(np.abs(y[1000:])) == pytest.approx(1.0 / np.sqrt(2.0), abs=0.02)


def test_roll_off_a_decade_above_cutoff():
    _, x = _sine(200.0, 2.0)
    y = filters.butterworth_lowpass(x, RATE, 20.0, order=2, zero_phase=False)
    assert np.max(np.abs(y[1000:])) < 0.012


def test_zero_phase_has_no_lag():
    _, x = _sine(2.0, 5.0)
    y = filters.butterworth_lowpass(x, RATE, 20.0)
    max_lag = 50
    lags = np.arange(-max_lag, max_lag + 1)
    corr = [np.dot(y[max_lag + k:len(y) - max_lag + k], x[max_lag:len(x) - max_lag]) for k in lags]
    assert abs(lags[int(np.argmax(corr))]) <= 1


def test_lowpass_rejects_bad_settings():
    x = np.zeros(100)
    with pytest.raises(ValueError):
        filters.butterworth_lowpass(x, RATE, cutoff=600.0)
    with pytest.raises(ValueError):
        filters.butterworth_lowpass(x, RATE, order=3)
    with pytest.raises(ValueError):
        filters.butterworth_lowpass(np.zeros(4), RATE)


def test_kalman_static_signal():
    _, v, a = filters.kalman_differentiate(np.full(1000, 0.3), RATE)
    assert np.max(np.abs(v[500:])) < 1e-6
    assert np.max(np.abs(a[500:])) < 1e-6


def test_kalman_ramp_velocity():
    t = np.arange(3000) / RATE
    _, v, _ = filters.kalman_differentiate(0.5 * t, RATE)
    np.testing.assert_allclose(v[1000:], 0.5, rtol=0.01)


def test_kalman_quadratic_acceleration():
    t = np.arange(4000) / RATE
    _, v, a = filters.kalman_differentiate(0.5 * 0.2 * t**2, RATE)
    np.testing.assert_allclose(a[2000:], 0.2, rtol=0.05)
    np.testing.assert_allclose(v[2000:], 0.2 * t[2000:], rtol=0.01)


def test_kalman_smoother_on_ramp():
    t = np.arange(2000) / RATE
    _, v, _ = filters.kalman_differentiate(0.5 * t, RATE, smooth=True)
    np.testing.assert_allclose(v[500:1500], 0.5, rtol=0.01)


def test_online_kalman_matches_offline():
    rng = np.random.default_rng(0)
    z = np.sin(np.arange(800) / RATE) + 1e-4 * rng.standard_normal(800)
    s_hat, v_hat, a_hat = filters.kalman_differentiate(z, RATE)
    online = filters.OnlineKalmanDifferentiator(RATE)
    est = np.array([online.update(float(zi)) for zi in z])
    np.testing.assert_allclose(est[:, 0], s_hat, atol=1e-12)
    np.testing.assert_allclose(est[:, 1], v_hat, atol=1e-9)
    np.testing.assert_allclose(est[:, 2], a_hat, atol=1e-6)


def test_kalman_rejects_bad_input():
    with pytest.raises(ValueError):
        filters.kalman_differentiate(np.zeros(5), RATE)
    with pytest.raises(ValueError):
        filters.kalman_differentiate(np.array([0.0] * 20 + [np.nan]), RATE)
    with pytest.raises(ValueError):
        filters.OnlineKalmanDifferentiator(RATE).update(float("inf"))


def test_resample_midpoints_and_timestamps():
    n = 50
    ramp = np.arange(n) * 0.01
    ds = _dataset(n, s=ramp, i_m=np.full(n, 0.4))
    up = dataset_util.resample(ds)
    assert up.rate == 1000.0
    assert len(up) == 2 * n - 1
    np.testing.assert_allclose(up.s[1::2], 0.5 * (ramp[:-1] + ramp[1:]))
    np.testing.assert_array_equal(up.s[0::2], ramp)
    np.testing.assert_array_equal(up.i_m, 0.4)
    np.testing.assert_allclose(np.diff(up.t), 1e-3, atol=1e-9)
    up.validate()


def test_resample_requires_500hz():
    with pytest.raises(ValueError):
        dataset_util.resample(_dataset(10, rate=1000.0))


def test_dataset_validation_and_csv(tmp_path):
    ds = _dataset(20, rate=1000.0, s=np.linspace(0, 1, 20))
    path = str(tmp_path / "ds.csv")
    ds.to_csv(path)
    loaded = Dataset.from_csv(path)
    assert loaded.tau is None and loaded.tau_F_true is None
    np.testing.assert_array_equal(loaded.s, ds.s)

    bad = _dataset(20, rate=1000.0)
    bad.t[5] += 1e-4
    with pytest.raises(ValueError):
        bad.validate()


def test_inverse_dynamics_examples():
    params = JointParams(load_inertia=0.05, g_amp=0.0)
    assert inverse_dynamics_single_joint(0.3, 0.0, 0.0, params) == 0.0
    assert inverse_dynamics_single_joint(0.0, 0.0, 2.0, params) == pytest.approx(0.1)
    knee = JointParams(load_inertia=0.5, g_amp=30.0)
    assert inverse_dynamics_single_joint(np.pi / 2, 0.0, 0.0, knee) == pytest.approx(30.0)


def test_rotor_inertia_option():
    params = JointParams()
    assert RigidLoadDynamics(params, include_rotor_inertia=True).inertia == pytest.approx(1.05)
    assert RigidLoadDynamics(params).inertia == pytest.approx(0.05)


def test_reconstruct_friction_arithmetic():
    params = JointParams(reduction_ratio=100.0, torque_constant=0.1)
    ds = _dataset(3, rate=1000.0, i_m=np.array([0.5, 0.0, 0.5]))
    ds = dataset_util.with_torques(ds, tau=np.array([3.0, 0.0, 5.0]))
    out = pipeline.reconstruct_friction(ds, params)
    np.testing.assert_allclose(out.tau_F_true, [2.0, 0.0, 0.0])
    with pytest.raises(ValueError):
        pipeline.reconstruct_friction(_dataset(3, rate=1000.0), params)


def _constant_log(n=400):
    t = np.arange(n) / 500.0
    const = np.full(n, 0.2)
    return RawLog(
        rate=500.0,
        t=t,
        s=const,
        theta=100 * const,
        i_m=np.zeros(n),
        s_shadow=const,
        theta_shadow=100 * const,
    )


def test_pipeline_on_constant_log():
    params = fixtures.ankle().params
    ds = pipeline.run_pipeline(_constant_log(), params)
    assert ds.rate == constant.DATASET_RATE
    assert len(ds) == 2 * 400 - 1
    for col in (ds.s_dot, ds.s_ddot, ds.theta_dot, ds.tau, ds.tau_F_true):
        assert np.max(np.abs(col)) < 1e-6


def test_pipeline_is_deterministic():
    params = fixtures.ankle().params
    raw = _constant_log()
    raw.s = raw.s + 1e-4 * np.sin(np.arange(len(raw)))
    a = pipeline.run_pipeline(raw, params)
    b = pipeline.run_pipeline(raw, params)
    for name in constant.DATASET_COLUMNS:
        np.testing.assert_array_equal(getattr(a, name), getattr(b, name))


def test_pipeline_batch_skips_short_logs():
    params = fixtures.ankle().params
    out = pipeline.run_pipeline_batch([_constant_log(5), _constant_log(), _constant_log(3)], params)
    assert list(out) == [1]
    assert len(out[1]) > 0
    with pytest.raises(ValueError):
        pipeline.run_pipeline_batch([_constant_log(5)], params)
