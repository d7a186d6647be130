"""低通滤波与卡尔曼微分

Butterworth low-pass (zero-phase for offline data, single-pass for causal use)
and a constant-jerk Kalman filter that estimates position, velocity and
acceleration from noisy position samples.
"""
import logging
import math

import numpy as np
from scipy import signal

from joint_friction_id import constant

SUPPORTED_ORDERS = (2, 4)
RICCATI_TOL = 1e-12
RICCATI_MAX_ITER = 1000000


def design_butterworth(rate, cutoff, order=constant.BUTTERWORTH_ORDER):
    """Digital low-pass by bilinear transform with prewarping, DC gain 1.

    Returns:
        (b, a) transfer function coefficients
    """
    if order not in SUPPORTED_ORDERS:
        raise ValueError(
            "order must be one of {}, got {}".format(SUPPORTED_ORDERS, order),
        )
    nyquist = rate / 2.0
    if not 0.0 < cutoff < nyquist:
        raise ValueError(
            "cutoff must be in (0, {}) Hz (Nyquist), got {}".format(nyquist, cutoff),
        )
    b, a = signal.butter(order, cutoff, btype="low", fs=rate)
    b = b * (np.sum(a) / np.sum(b))
    return b, a


def butterworth_lowpass(
    x,
    rate,
    cutoff=constant.CURRENT_CUTOFF_HZ,
    order=constant.BUTTERWORTH_ORDER,
    zero_phase=True,
):
    """Low-pass filters a 1-d signal.

    Args:
        x: samples
        rate: sampling rate (Hz)
        cutoff: -3 dB frequency (Hz), below Nyquist
        order: 2 or 4
        zero_phase: forward-backward filtering, no lag, offline only

    Returns:
        filtered samples, same length as x
    """
    b, a = design_butterworth(rate, cutoff, order)
    x = np.asarray(x, dtype=np.float64)
    if len(x) < 3 * order:
        raise ValueError(
            "need at least {} samples for order {}, got {}".format(3 * order, order, len(x)),
        )
    if zero_phase:
        padlen = min(3 * (order + 1), len(x) - 1)
        return signal.filtfilt(b, a, x, padlen=padlen)
    zi = signal.lfilter_zi(b, a) * x[0]
    y, _ = signal.lfilter(b, a, x, zi=zi)
    return y


def constant_jerk_model(dt, q):
    """Transition matrix and white-jerk process covariance for a step dt."""
    F = np.array(
        [
            [1.0, dt, 0.5 * dt * dt],
            [0.0, 1.0, dt],
            [0.0, 0.0, 1.0],
        ],
    )
    Q = q * np.array(
        [
            [dt**5 / 20.0, dt**4 / 8.0, dt**3 / 6.0],
            [dt**4 / 8.0, dt**3 / 3.0, dt**2 / 2.0],
            [dt**3 / 6.0, dt**2 / 2.0, dt],
        ],
    )
    return F, Q


def steady_state_gain(F, Q, r_n):
    """Iterates the Riccati recursion of a position-measured filter.

    Returns:
        (K, P_post, P_pred): steady gain, posterior and prior covariances
    """
    P_pred = Q + np.diag([r_n, r_n, r_n])
    K = np.zeros(3)
    for it in range(RICCATI_MAX_ITER):
        S = P_pred[0, 0] + r_n
        K_new = P_pred[:, 0] / S
        P_post = P_pred - np.outer(K_new, P_pred[0, :])
        P_post = 0.5 * (P_post + P_post.T)
        P_pred = F @ P_post @ F.T + Q
        if np.max(np.abs(K_new - K)) <= RICCATI_TOL * max(np.max(np.abs(K_new)), 1.0):
            return K_new, P_post, P_pred
        K = K_new
    logging.warning("Riccati recursion did not converge after %s iterations", it + 1)
    return K, P_post, P_pred


class KalmanDesign:
    """Steady-state constant-jerk filter for one sampling rate."""

    def __init__(self, rate, q=constant.KALMAN_JERK_PSD, r_n=None):
        if r_n is None:
            r_n = constant.ENCODER_NOISE_STD**2
        if q <= 0 or r_n <= 0:
            raise ValueError("q and r_n must be > 0, got q={} r_n={}".format(q, r_n))
        self.rate = rate
        self.dt = 1.0 / rate
        self.q = q
        self.r_n = r_n
        self.F, self.Q = constant_jerk_model(self.dt, q)
        self.K, self.P_post, self.P_pred = steady_state_gain(self.F, self.Q, r_n)
        H = np.array([[1.0, 0.0, 0.0]])
        self.A = (np.eye(3) - np.outer(self.K, H)) @ self.F


def _forward_pass(design: KalmanDesign, z):
    (a00, a01, a02), (a10, a11, a12), (a20, a21, a22) = design.A.tolist()
    k0, k1, k2 = design.K.tolist()
    out = np.empty((len(z), 3))
    x0, x1, x2 = float(z[0]), 0.0, 0.0
    for i, zi in enumerate(z.tolist()):
        x0, x1, x2 = (
            a00 * x0 + a01 * x1 + a02 * x2 + k0 * zi,
            a10 * x0 + a11 * x1 + a12 * x2 + k1 * zi,
            a20 * x0 + a21 * x1 + a22 * x2 + k2 * zi,
        )
        out[i] = (x0, x1, x2)
    return out


def _rts_pass(design: KalmanDesign, filtered):
    gain = np.linalg.solve(design.P_pred, design.F @ design.P_post).T
    smoothed = filtered.copy()
    F = design.F
    for i in range(len(filtered) - 2, -1, -1):
        smoothed[i] = filtered[i] + gain @ (smoothed[i + 1] - F @ filtered[i])
    return smoothed


def kalman_differentiate(
    s_meas,
    rate,
    q=constant.KALMAN_JERK_PSD,
    r_n=None,
    smooth=False,
):
    """Estimates position, velocity and acceleration from position samples.

    Args:
        s_meas: measured positions
        rate: sampling rate (Hz)
        q: white-jerk power spectral density
        r_n: measurement variance, default encoder noise squared
        smooth: add a Rauch-Tung-Striebel backward pass

    Returns:
        (s_hat, s_dot_hat, s_ddot_hat)
    """
    z = np.asarray(s_meas, dtype=np.float64)
    if len(z) < 10:
        raise ValueError("need at least 10 samples, got {}".format(len(z)))
    if not np.all(np.isfinite(z)):
        raise ValueError("non-finite input to kalman_differentiate")
    design = KalmanDesign(rate, q, r_n)
    est = _forward_pass(design, z)
    if smooth:
        est = _rts_pass(design, est)
    return est[:, 0].copy(), est[:, 1].copy(), est[:, 2].copy()


class OnlineKalmanDifferentiator:
    """Causal single-sample version of ``kalman_differentiate``.

    ``update`` does scalar arithmetic only, so it is safe to call from a
    periodic control task.
    """

    def __init__(self, rate, q=constant.KALMAN_JERK_PSD, r_n=None):
        design = KalmanDesign(rate, q, r_n)
        self._a = design.A.tolist()
        self._k = design.K.tolist()
        self.position = 0.0
        self.velocity = 0.0
        self.acceleration = 0.0
        self._initialized = False

    def reset(self):
        self.position = self.velocity = self.acceleration = 0.0
        self._initialized = False

    def update(self, z):
        if not math.isfinite(z):
            raise ValueError("non-finite measurement {}".format(z))
        if not self._initialized:
            self.position = z
            self._initialized = True
        (a00, a01, a02), (a10, a11, a12), (a20, a21, a22) = self._a
        k0, k1, k2 = self._k
        x0, x1, x2 = self.position, self.velocity, self.acceleration
        self.position = a00 * x0 + a01 * x1 + a02 * x2 + k0 * z
        self.velocity = a10 * x0 + a11 * x1 + a12 * x2 + k1 * z
        self.acceleration = a20 * x0 + a21 * x1 + a22 * x2 + k2 * z
        return self.position, self.velocity, self.acceleration
