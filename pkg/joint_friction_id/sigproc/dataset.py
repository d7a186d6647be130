from dataclasses import dataclass
from dataclasses import replace
from typing import Optional

import numpy as np

from joint_friction_id import constant
from joint_friction_id.io import table_io

TIMESTAMP_TOL = 1e-9
SIGNAL_COLUMNS = ("s", "s_dot", "s_ddot", "theta", "theta_dot", "i_m")


@dataclass
class Dataset:
    """Uniformly sampled joint/motor signals, SI units.

    tau and tau_F_true stay None until inverse dynamics and friction
    reconstruction fill them.
    """

    rate: float
    t: np.ndarray
    s: np.ndarray
    s_dot: np.ndarray
    s_ddot: np.ndarray
    theta: np.ndarray
    theta_dot: np.ndarray
    i_m: np.ndarray
    tau: Optional[np.ndarray] = None
    tau_F_true: Optional[np.ndarray] = None

    def __len__(self):
        return len(self.t)

    def columns(self):
        return {name: getattr(self, name) for name in constant.DATASET_COLUMNS}

    def validate(self, rates=(500, 1000)):
        if self.rate not in rates:
            raise ValueError("dataset rate must be one of {}, got {}".format(rates, self.rate))
        n = len(self.t)
        for name, col in self.columns().items():
            if col is not None and len(col) != n:
                raise ValueError(
                    "column {} has {} samples, expected {}".format(name, len(col), n),
                )
        if n > 1:
            expected = self.t[0] + np.arange(n) / self.rate
            if np.max(np.abs(self.t - expected)) > TIMESTAMP_TOL:
                raise ValueError("timestamps are not uniform at {} Hz".format(self.rate))
        return self

    def slice(self, start, stop):
        cols = {
            name: (None if col is None else col[start:stop].copy())
            for name, col in self.columns().items()
        }
        return Dataset(rate=self.rate, **cols)

    def to_csv(self, path, provenance=None):
        """Missing tau columns are written as nan."""
        n = len(self)
        cols = [
            col if col is not None else np.full(n, np.nan)
            for col in self.columns().values()
        ]
        table_io.write_table(path, constant.DATASET_COLUMNS, cols, provenance)

    @classmethod
    def from_csv(cls, path):
        header, cols, _ = table_io.read_table(path)
        if header != constant.DATASET_COLUMNS:
            raise ValueError("unexpected dataset header {}".format(header))
        for name in ("tau", "tau_F_true"):
            if np.all(np.isnan(cols[name])):
                cols[name] = None
        t = cols["t"]
        rate = float(round(1.0 / np.median(np.diff(t)))) if len(t) > 1 else 1000.0
        return cls(rate=rate, **cols).validate()


def resample(x: Dataset) -> Dataset:
    """Doubles a 500 Hz dataset to 1000 Hz by linear interpolation at midpoints.

    Endpoints are preserved and the result has 2n - 1 samples.
    """
    if x.rate != 500:
        raise ValueError("resample expects a 500 Hz dataset, got {} Hz".format(x.rate))
    n = len(x)
    if n < 2:
        raise ValueError("need at least 2 samples to resample, got {}".format(n))

    def upsample(col):
        if col is None:
            return None
        out = np.empty(2 * n - 1)
        out[0::2] = col
        out[1::2] = 0.5 * (col[:-1] + col[1:])
        return out

    cols = {name: upsample(col) for name, col in x.columns().items()}
    cols["t"] = x.t[0] + np.arange(2 * n - 1) / 1000.0
    return Dataset(rate=1000.0, **cols)


def with_torques(x: Dataset, tau=None, tau_F_true=None) -> Dataset:
    changes = {}
    if tau is not None:
        changes["tau"] = np.asarray(tau, dtype=np.float64)
    if tau_F_true is not None:
        changes["tau_F_true"] = np.asarray(tau_F_true, dtype=np.float64)
    return replace(x, **changes)
