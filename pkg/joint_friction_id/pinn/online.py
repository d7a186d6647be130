"""PINN 在线推理

Ring-buffered history and preallocated layer buffers, so an estimate at the
control rate does no array allocation once constructed. Before L samples have
been pushed the missing history reads as zeros.
"""
import numpy as np

from joint_friction_id.pinn.network import HistoryWindow
from joint_friction_id.pinn.network import PinnModel


class OnlineEstimator:
    def __init__(self, model: PinnModel):
        self.model = model
        c = model.config
        self.history_length = L = c.history_length
        # every sample is written twice so the window is always one slice
        self._delta_theta = np.zeros(2 * L)
        self._s_dot = np.zeros(2 * L)
        self._head = 0
        self._count = 0

        w = model.weights
        self._w1, self._b1 = w["W1"], w["b1"]
        self._w2, self._b2 = w["W2"], w["b2"]
        self._w3, self._b3 = w["W3"][0], float(w["b3"][0])
        self._mean_dth, self._mean_vel = model.feature_mean[:L], model.feature_mean[L:]
        self._std_dth, self._std_vel = model.feature_std[:L], model.feature_std[L:]
        self._scale = model.target_scale
        self._x = np.zeros(2 * L)
        self._z1 = np.zeros(c.hidden1)
        self._z2 = np.zeros(c.hidden2)

    @property
    def warmed_up(self):
        return self._count >= self.history_length

    def reset(self):
        self._delta_theta.fill(0.0)
        self._s_dot.fill(0.0)
        self._head = 0
        self._count = 0

    def push(self, delta_theta, s_dot):
        h, L = self._head, self.history_length
        self._delta_theta[h] = self._delta_theta[h + L] = delta_theta
        self._s_dot[h] = self._s_dot[h + L] = s_dot
        self._head = (h + 1) % L
        self._count += 1

    def window(self) -> HistoryWindow:
        """Copy of the current oldest-first window."""
        h, L = self._head, self.history_length
        return HistoryWindow(self._delta_theta[h:h + L].copy(), self._s_dot[h:h + L].copy())

    def predict(self):
        """Friction torque (N·m) of the current window, dropout off."""
        h, L = self._head, self.history_length
        x_dth, x_vel = self._x[:L], self._x[L:]
        np.subtract(self._delta_theta[h:h + L], self._mean_dth, out=x_dth)
        np.divide(x_dth, self._std_dth, out=x_dth)
        np.subtract(self._s_dot[h:h + L], self._mean_vel, out=x_vel)
        np.divide(x_vel, self._std_vel, out=x_vel)
        np.dot(self._w1, self._x, out=self._z1)
        np.add(self._z1, self._b1, out=self._z1)
        np.maximum(self._z1, 0.0, out=self._z1)
        np.dot(self._w2, self._z1, out=self._z2)
        np.add(self._z2, self._b2, out=self._z2)
        np.maximum(self._z2, 0.0, out=self._z2)
        return (float(self._w3.dot(self._z2)) + self._b3) * self._scale

    def estimate(self, delta_theta, s_dot):
        self.push(delta_theta, s_dot)
        return self.predict()
