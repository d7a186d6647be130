"""六维力旋量与坐标变换"""
from dataclasses import dataclass

import numpy as np

ORTHONORMAL_TOL = 1e-9


@dataclass(frozen=True)
class Wrench:
    """
    Attributes:
     - force: (3,) N
     - moment: (3,) N·m
     - frame: label of the frame the components are expressed in
    """

    force: np.ndarray
    moment: np.ndarray
    frame: str = ""

    def __post_init__(self):
        for name in ("force", "moment"):
            value = np.asarray(getattr(self, name), dtype=np.float64)
            if value.shape != (3,) or not np.all(np.isfinite(value)):
                raise ValueError("{} must be a finite 3-vector, got {}".format(name, value))
            object.__setattr__(self, name, value)


@dataclass(frozen=True)
class Pose:
    """Rotation and translation of a child frame in its parent frame."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        rotation = np.asarray(self.rotation, dtype=np.float64)
        translation = np.asarray(self.translation, dtype=np.float64)
        check_rotation(rotation)
        if translation.shape != (3,):
            raise ValueError("translation must be a 3-vector, got {}".format(translation))
        object.__setattr__(self, "rotation", rotation)
        object.__setattr__(self, "translation", translation)

    @classmethod
    def identity(cls):
        return cls(np.eye(3), np.zeros(3))

    def compose(self, other: "Pose") -> "Pose":
        """self * other: other is expressed in the frame of self."""
        return Pose(
            self.rotation @ other.rotation,
            self.rotation @ other.translation + self.translation,
        )


def check_rotation(rotation, tol=ORTHONORMAL_TOL):
    if rotation.shape != (3, 3):
        raise ValueError("rotation must be 3x3, got shape {}".format(rotation.shape))
    error = np.max(np.abs(rotation.T @ rotation - np.eye(3)))
    if error > tol or np.linalg.det(rotation) <= 0:
        raise ValueError(
            "rotation is not a proper orthonormal matrix (error {:.3g})".format(error),
        )


def wrench_transform(w: Wrench, rotation, translation, frame="") -> Wrench:
    """Expresses a wrench in the parent frame of the pose (R, p).

    f' = R f and mu' = p x (R f) + R mu.
    """
    rotation = np.asarray(rotation, dtype=np.float64)
    translation = np.asarray(translation, dtype=np.float64)
    check_rotation(rotation)
    force = rotation @ w.force
    return Wrench(force, np.cross(translation, force) + rotation @ w.moment, frame)


def joint_axis_moment(w: Wrench, joint_pose: Pose):
    """Moment about the joint x-axis of a wrench measured in the sensor frame.

    joint_pose is the sensor frame expressed in the joint frame.
    """
    joint_wrench = wrench_transform(w, joint_pose.rotation, joint_pose.translation, "joint")
    return float(joint_wrench.moment[0])
