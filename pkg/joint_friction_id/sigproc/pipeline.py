"""数据预处理流水线

RawLog -> Dataset in a fixed order: Butterworth on the motor current, Kalman
on joint and motor positions, resampling to 1000 Hz, inverse dynamics and
friction reconstruction.
"""
import logging
from dataclasses import asdict
from dataclasses import dataclass
from typing import Dict
from typing import Optional
from typing import Sequence

import numpy as np

from joint_friction_id import constant
from joint_friction_id.sigproc import filters
from joint_friction_id.sigproc.dataset import Dataset
from joint_friction_id.sigproc.dataset import resample
from joint_friction_id.sigproc.dataset import with_torques
from joint_friction_id.sigproc.dynamics import InverseDynamics
from joint_friction_id.sigproc.dynamics import RigidLoadDynamics
from joint_friction_id.sim.jointsim import JointParams
from joint_friction_id.sim.jointsim import RawLog
from joint_friction_id.util import parallel

MIN_RAW_SAMPLES = 10


@dataclass(frozen=True)
class PipelineSettings:
    """
    Attributes:
     - current_cutoff: Butterworth cutoff for i_m (Hz)
     - filter_order: 2 or 4
     - kalman_q: jerk PSD of the joint position filter; the motor filter
       uses kalman_q * r^2
     - kalman_r: measurement variance of s; None means encoder noise squared.
       The motor filter uses kalman_r * r^2
     - kalman_smooth: add the backward smoothing pass
     - include_rotor_inertia: reconstruct friction net of r^2 J_m s_ddot
    """

    current_cutoff: float = constant.CURRENT_CUTOFF_HZ
    filter_order: int = constant.BUTTERWORTH_ORDER
    kalman_q: float = constant.KALMAN_JERK_PSD
    kalman_r: Optional[float] = None
    kalman_smooth: bool = False
    include_rotor_inertia: bool = False

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def reconstruct_friction(dataset: Dataset, params: JointParams) -> Dataset:
    """tau_F_true = r * k_t * i_m - tau, elementwise."""
    if dataset.tau is None:
        raise ValueError("missing column tau, run inverse dynamics first")
    if dataset.i_m is None:
        raise ValueError("missing column i_m")
    tau_f = params.drive_gain * np.asarray(dataset.i_m) - np.asarray(dataset.tau)
    return with_torques(dataset, tau_F_true=tau_f)


def run_pipeline(
    raw: RawLog,
    params: JointParams,
    settings: PipelineSettings = PipelineSettings(),
    dynamics: Optional[InverseDynamics] = None,
) -> Dataset:
    rate = float(raw.rate)
    r = params.reduction_ratio
    r_n = settings.kalman_r
    if r_n is None:
        r_n = constant.ENCODER_NOISE_STD**2

    i_m = filters.butterworth_lowpass(
        raw.i_m,
        rate,
        settings.current_cutoff,
        settings.filter_order,
        zero_phase=True,
    )
    s_hat, s_dot, s_ddot = filters.kalman_differentiate(
        raw.s,
        rate,
        q=settings.kalman_q,
        r_n=r_n,
        smooth=settings.kalman_smooth,
    )
    theta_hat, theta_dot, _ = filters.kalman_differentiate(
        raw.theta,
        rate,
        q=settings.kalman_q * r * r,
        r_n=r_n * r * r,
        smooth=settings.kalman_smooth,
    )
    dataset = Dataset(
        rate=rate,
        t=np.asarray(raw.t, dtype=np.float64),
        s=s_hat,
        s_dot=s_dot,
        s_ddot=s_ddot,
        theta=theta_hat,
        theta_dot=theta_dot,
        i_m=i_m,
    )
    if dataset.rate == 500:
        dataset = resample(dataset)

    if dynamics is None:
        dynamics = RigidLoadDynamics(params, settings.include_rotor_inertia)
    tau = dynamics.torque(dataset.s, dataset.s_dot, dataset.s_ddot)
    dataset = reconstruct_friction(with_torques(dataset, tau=tau), params)
    return dataset.validate()


def run_pipeline_batch(
    raws: Sequence[RawLog],
    params: JointParams,
    settings: PipelineSettings = PipelineSettings(),
    parallelism=1,
) -> Dict[int, Dataset]:
    """Preprocesses every log long enough for the Kalman filter.

    Returns:
        dict from the index of the log in ``raws`` to its dataset, in order
    """
    kept = [k for k, raw in enumerate(raws) if len(raw) >= MIN_RAW_SAMPLES]
    if len(kept) < len(raws):
        logging.warning(
            "skipped %s logs shorter than %s samples: %s",
            len(raws) - len(kept),
            MIN_RAW_SAMPLES,
            sorted(set(range(len(raws))) - set(kept)),
        )
    if not kept:
        raise ValueError("no raw log is long enough to preprocess")
    datasets = parallel.run_parallel(
        run_pipeline,
        [{"raw": raws[k], "params": params, "settings": settings} for k in kept],
        parallelism=parallelism,
        desc="preprocess",
    )
    return dict(zip(kept, datasets))
