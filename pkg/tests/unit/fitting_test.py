import numpy as np
import pytest

from joint_friction_id.fitting import static_fit
from joint_friction_id.fitting.adam import AdamOptimizer
from joint_friction_id.fitting.adam import AdamSettings
from joint_friction_id.fitting.adam import adam_step
from joint_friction_id.fitting.adam import learning_rate_at
from joint_friction_id.fitting.static_fit import FitResult
from joint_friction_id.fitting.static_fit import FittingError
from joint_friction_id.friction import models
from joint_friction_id.friction.models import ScvParams
from joint_friction_id.friction.ttypes import ModelKind
from joint_friction_id.sigproc.dataset import Dataset
from joint_friction_id.sim import fixtures


@pytest.fixture
def velocities():
    return np.random.default_rng(5).uniform(-1.5, 1.5, 1000)


def _scaled(params, factor):
    return type(params).from_vector(params.as_vector() * factor)


def test_adam_zero_gradient_keeps_params():
    p = np.array([1.0, -2.0, 3.0])
    zeros = np.zeros(3)
    new, (m, v) = adam_step(p, zeros, (zeros, zeros), AdamSettings(), 1)
    np.testing.assert_array_equal(new, p)
    np.testing.assert_array_equal(m, zeros)
    np.testing.assert_array_equal(v, zeros)


def test_adam_first_step_is_lr_times_sign():
    settings = AdamSettings(learning_rate=1e-2)
    p = np.zeros(3)
    g = np.array([4.0, -0.5, 2e-3])
    new, _ = adam_step(p, g, (np.zeros(3), np.zeros(3)), settings, 1)
    np.testing.assert_allclose(new, -1e-2 * np.sign(g), rtol=1e-4)


def test_adam_is_deterministic_and_checks_shapes():
    settings = AdamSettings()
    args = (np.ones(2), np.array([0.3, -0.1]), (np.full(2, 0.01), np.full(2, 0.02)), settings, 7)
    a, _ = adam_step(*args)
    b, _ = adam_step(*args)
    np.testing.assert_array_equal(a, b)
    with pytest.raises(ValueError):
        adam_step(np.ones(2), np.ones(3), (np.zeros(2), np.zeros(2)), settings, 1)
    with pytest.raises(ValueError):
        adam_step(np.ones(2), np.ones(2), (np.zeros(2), np.zeros(2)), settings, 0)


def test_optimizer_matches_adam_step():
    settings = AdamSettings(learning_rate=3e-3)
    rng = np.random.default_rng(1)
    vec = rng.standard_normal(4)
    params = {"w": vec.copy()}
    opt = AdamOptimizer(settings)
    moments = (np.zeros(4), np.zeros(4))
    for t in range(1, 6):
        g = rng.standard_normal(4)
        vec, moments = adam_step(vec, g, moments, settings, t)
        opt.step(params, {"w": g})
    np.testing.assert_allclose(params["w"], vec, rtol=1e-12, atol=1e-15)


def test_cosine_schedule_endpoints():
    settings = AdamSettings(learning_rate=1e-2, epochs=11, lr_schedule="cosine", lr_min=1e-4)
    assert learning_rate_at(settings, 0) == pytest.approx(1e-2)
    assert learning_rate_at(settings, 10) == pytest.approx(1e-4)
    assert learning_rate_at(AdamSettings(), 500) == AdamSettings().learning_rate
    with pytest.raises(ValueError):
        AdamSettings(lr_schedule="step").validate()


def test_softplus_round_trip():
    y = np.array([1e-6, 0.13, 1.0, 6.0, 55.0])
    np.testing.assert_allclose(static_fit.softplus(static_fit.softplus_inv(y)), y, rtol=1e-9)


def test_cv_fit_recovers_generating_params(velocities):
    true = fixtures.ANKLE_CV
    tau = models.cv_eval(true, velocities)
    settings = AdamSettings(learning_rate=1e-2, epochs=3000, lr_schedule="cosine")
    result = static_fit.fit_static_arrays(ModelKind.CV, velocities, tau, settings)
    assert result.params.k_c == pytest.approx(true.k_c, rel=0.02)
    assert result.params.k_v == pytest.approx(true.k_v, rel=0.02)
    assert result.params.k_a == pytest.approx(true.k_a, rel=0.2)
    assert len(result.loss_curve) == 3000
    assert result.final_mse == np.min(result.loss_curve)

    # 以 100 个 epoch 为窗口取最小值后单调不增
    block_min = result.loss_curve.reshape(-1, 100).min(axis=1)
    assert np.all(np.diff(block_min) <= 1e-12)


def test_scv_fit_on_scv_data(velocities):
    true = fixtures.ANKLE_SCV
    tau = models.scv_eval(true, velocities)
    init = _scaled(true, 1.15)
    settings = AdamSettings(learning_rate=1e-2, epochs=6000, lr_schedule="cosine")
    result = static_fit.fit_static_arrays(ModelKind.SCV, velocities, tau, settings, init=init)
    assert isinstance(result.params, ScvParams)
    assert result.params.k_s >= result.params.k_c
    assert result.final_mse < 1e-4
    assert result.final_mse < 0.01 * np.var(tau)


def test_degenerate_zero_data():
    zeros = np.zeros(200)
    result = static_fit.fit_static_arrays(ModelKind.CV, zeros, zeros, AdamSettings(epochs=20))
    assert result.final_mse == 0.0
    assert np.all(np.isfinite(result.params.as_vector()))


def test_frozen_parameter_stays_put(velocities):
    tau = models.cv_eval(fixtures.ANKLE_CV, velocities)
    init = models.CvParams(k_a=10.0, k_c=1.0, k_v=0.1)
    result = static_fit.fit_static_arrays(
        ModelKind.CV,
        velocities,
        tau,
        AdamSettings(epochs=50),
        init=init,
        frozen=("k_a",),
    )
    assert result.params.k_a == pytest.approx(10.0, rel=1e-9)
    assert result.params.k_c != pytest.approx(1.0, rel=1e-6)
    with pytest.raises(ValueError):
        static_fit.fit_static_arrays(ModelKind.CV, velocities, tau, frozen=("v_s",))


def test_initial_params_kept_when_no_epoch_improves(velocities):
    tau = models.cv_eval(fixtures.ANKLE_CV, velocities)
    init = _scaled(fixtures.ANKLE_CV, 1.001)
    init_mse = float(np.mean((models.cv_eval(init, velocities) - tau) ** 2))
    result = static_fit.fit_static_arrays(
        ModelKind.CV,
        velocities,
        tau,
        AdamSettings(learning_rate=5.0, epochs=3),
        init=init,
    )
    assert result.best_epoch == -1
    assert result.final_mse == pytest.approx(init_mse, rel=1e-9)
    assert result.final_mse < np.min(result.loss_curve)
    np.testing.assert_allclose(result.params.as_vector(), init.as_vector(), rtol=1e-9)


def test_minibatch_fit_runs(velocities):
    tau = models.cv_eval(fixtures.ANKLE_CV, velocities)
    settings = AdamSettings(epochs=30, batch_size=128, seed=3)
    a = static_fit.fit_static_arrays(ModelKind.CV, velocities, tau, settings)
    b = static_fit.fit_static_arrays(ModelKind.CV, velocities, tau, settings)
    np.testing.assert_array_equal(a.loss_curve, b.loss_curve)
    assert a.loss_curve[-1] < a.loss_curve[0]


def test_non_finite_loss_raises():
    s_dot = np.linspace(-1, 1, 50)
    tau = np.zeros(50)
    tau[10] = np.inf
    with pytest.raises(FittingError):
        static_fit.fit_static_arrays(
            ModelKind.CV,
            s_dot,
            tau,
            AdamSettings(epochs=5),
            init=fixtures.ANKLE_CV,
        )


def test_invalid_inputs():
    with pytest.raises(ValueError):
        static_fit.fit_static_arrays(ModelKind.PINN, [0.1], [0.1])
    with pytest.raises(ValueError):
        static_fit.fit_static_arrays(ModelKind.CV, [0.1, 0.2], [0.1])
    with pytest.raises(ValueError):
        static_fit.fit_static_arrays(ModelKind.SCV, [0.1], [0.1], init=fixtures.ANKLE_CV)


def test_initial_guess_is_valid(velocities):
    tau = models.scv_eval(fixtures.ANKLE_SCV, velocities)
    guess = static_fit.initial_guess(ModelKind.SCV, velocities, tau)
    guess.validate()
    assert guess.k_a == static_fit.INIT_K_A
    assert guess.k_v > 0


def test_fit_static_model_uses_reconstructed_friction(velocities):
    n = len(velocities)
    zeros = np.zeros(n)
    ds = Dataset(
        rate=1000.0,
        t=np.arange(n) / 1000.0,
        s=zeros,
        s_dot=velocities,
        s_ddot=zeros,
        theta=zeros,
        theta_dot=100 * velocities,
        i_m=zeros,
        tau=zeros,
        tau_F_true=models.cv_eval(fixtures.ANKLE_CV, velocities),
    )
    result = static_fit.fit_static_model(ModelKind.CV, [ds, ds], AdamSettings(epochs=10))
    assert result.kind == ModelKind.CV
    with pytest.raises(ValueError):
        static_fit.fit_static_model(ModelKind.CV, [])


def test_fit_result_save_and_load(tmp_path, velocities):
    tau = models.cv_eval(fixtures.ANKLE_CV, velocities)
    result = static_fit.fit_static_arrays(ModelKind.CV, velocities, tau, AdamSettings(epochs=5))
    json_path = str(tmp_path / "cv.json")
    curve_path = str(tmp_path / "cv_loss.csv")
    result.save(json_path, curve_path)
    loaded = FitResult.load(json_path)
    assert loaded.params == result.params
    assert loaded.best_epoch == result.best_epoch
    assert loaded.settings == result.settings
