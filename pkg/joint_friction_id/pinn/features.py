"""History-window featurization and the segment-wise train/validation split."""
import logging
from dataclasses import dataclass
from typing import Sequence
from typing import Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from joint_friction_id.pinn.network import HistoryWindow
from joint_friction_id.sigproc.dataset import Dataset
from joint_friction_id.sim.jointsim import JointParams

SEGMENT_WINDOWS = 1000
VAL_FRACTION = 0.2


@dataclass
class WindowSet:
    """
    Attributes:
     - features: (n, 2L) rows laid out [delta_theta oldest..newest, s_dot oldest..newest]
     - targets: tau_F_true at the newest sample of each window
     - source: index of the dataset a window comes from
     - end_index: sample index of the newest sample in its dataset
    """

    history_length: int
    features: np.ndarray
    targets: np.ndarray
    source: np.ndarray
    end_index: np.ndarray

    def __len__(self):
        return len(self.targets)

    @property
    def s_dot(self):
        """Newest joint velocity of every window."""
        return self.features[:, -1]

    def window(self, k) -> HistoryWindow:
        L = self.history_length
        return HistoryWindow(self.features[k, :L].copy(), self.features[k, L:].copy())

    def take(self, idx):
        return WindowSet(
            self.history_length,
            self.features[idx],
            self.targets[idx],
            self.source[idx],
            self.end_index[idx],
        )


def delta_theta(dataset: Dataset, params: JointParams):
    return params.reduction_ratio * np.asarray(dataset.s) - np.asarray(dataset.theta)


def featurize(
    dataset: Union[Dataset, Sequence[Dataset]],
    params: JointParams,
    history_length,
) -> WindowSet:
    """Stride-1 windows; window i covers samples [i-L+1 .. i].

    A list of datasets yields windows that never cross dataset boundaries.
    Datasets shorter than L are rejected.
    """
    if history_length < 1:
        raise ValueError("history_length must be >= 1, got {}".format(history_length))
    datasets = [dataset] if isinstance(dataset, Dataset) else list(dataset)
    if not datasets:
        raise ValueError("no dataset to featurize")
    L = history_length
    features, targets, source, end_index = [], [], [], []
    for k, ds in enumerate(datasets):
        if len(ds) < L:
            raise ValueError(
                "dataset {} has {} samples, shorter than history length {}".format(k, len(ds), L),
            )
        if ds.tau_F_true is None:
            raise ValueError("dataset {} has no tau_F_true column".format(k))
        dth = sliding_window_view(delta_theta(ds, params), L)
        vel = sliding_window_view(np.asarray(ds.s_dot, dtype=np.float64), L)
        features.append(np.concatenate([dth, vel], axis=1))
        targets.append(np.asarray(ds.tau_F_true, dtype=np.float64)[L - 1:])
        source.append(np.full(len(dth), k))
        end_index.append(np.arange(L - 1, len(ds)))
    return WindowSet(
        L,
        np.concatenate(features),
        np.concatenate(targets),
        np.concatenate(source),
        np.concatenate(end_index),
    )


def split_segments(
    windows: WindowSet,
    seed=0,
    val_fraction=VAL_FRACTION,
    segment_windows=SEGMENT_WINDOWS,
):
    """80/20 split by contiguous segments of windows, not by window.

    Each dataset is cut into segments of ``segment_windows`` windows and a
    seeded draw assigns a fraction of segments to validation. When a segment's
    predecessor in the same dataset went to the other side, its first L-1
    windows are dropped so no sample feeds both sides.

    Returns:
        (train indices, validation indices) into ``windows``
    """
    segment_ids = []
    for src in np.unique(windows.source):
        idx = np.flatnonzero(windows.source == src)
        for start in range(0, len(idx), segment_windows):
            segment_ids.append(idx[start:start + segment_windows])
    if len(segment_ids) < 2:
        raise ValueError(
            "need at least 2 segments of {} windows to split, got {} windows".format(
                segment_windows,
                len(windows),
            ),
        )
    n_val = min(max(1, int(round(val_fraction * len(segment_ids)))), len(segment_ids) - 1)
    rng = np.random.default_rng(seed)
    is_val = np.zeros(len(segment_ids), dtype=bool)
    is_val[rng.permutation(len(segment_ids))[:n_val]] = True

    train, val = [], []
    overlap = windows.history_length - 1
    for k, idx in enumerate(segment_ids):
        same_source = k > 0 and windows.source[segment_ids[k - 1][0]] == windows.source[idx[0]]
        if same_source and is_val[k - 1] != is_val[k]:
            idx = idx[overlap:]
        (val if is_val[k] else train).append(idx)
    train_idx = np.concatenate(train) if train else np.empty(0, dtype=int)
    val_idx = np.concatenate(val) if val else np.empty(0, dtype=int)
    if len(train_idx) == 0 or len(val_idx) == 0:
        raise ValueError("split left an empty side, dataset too short")
    logging.info(
        "split %s windows into %s train / %s val over %s segments",
        len(windows),
        len(train_idx),
        len(val_idx),
        len(segment_ids),
    )
    return train_idx, val_idx
