"""
Ground-truth motions.

The circular motion turns the object around the world z axis at radius
``r`` while it spins about its own x axis:
``T(t) = Rz(w_t t) Trans(r e_x) Rx(w_r t)`` with ``w = theta / frame_dt``.
"""
from typing import List, NamedTuple  # isort:skip

import numpy as np

from ct_spline.core.lie import (
    adjoint, exp_se3, exp_so3, invert_pose, make_pose
)
from ct_spline.core.spline import KnotVector, SplineTrajectory
from ct_spline.core.typing import Pose, TimedPose, Twist
from ct_spline.exceptions import ValidationError


class CircularMotionSpec(NamedTuple):
    """
    Attributes:
        theta_transl: turn about the world z axis per frame, radians
        theta_rot: rotation about the object's x axis per frame, radians
        radius: circle radius, meters
        frame_dt: time between frames, seconds
        n_frames: number of frames
    """
    theta_transl: float = 0.1
    theta_rot: float = 0.1
    radius: float = 1.0
    frame_dt: float = 0.1
    n_frames: int = 30

    def check(self) -> "CircularMotionSpec":
        if not self.frame_dt > 0:
            raise ValidationError(
                f"frame_dt must be positive, got {self.frame_dt!r}"
            )
        if self.n_frames < 4:
            raise ValidationError(
                f"need at least 4 frames, got {self.n_frames!r}"
            )
        return self

    @property
    def rates(self):
        return (
            self.theta_transl / self.frame_dt,
            self.theta_rot / self.frame_dt,
        )

    def frame_times(self) -> np.ndarray:
        return self.frame_dt * np.arange(self.n_frames)


_E_X = np.array([1.0, 0.0, 0.0])
_E_Z = np.array([0.0, 0.0, 1.0])


def _factors(spec: CircularMotionSpec, t: float):
    rate_transl, rate_rot = spec.rates
    turn = make_pose(exp_so3(rate_transl * t * _E_Z))
    offset = make_pose(translation=spec.radius * _E_X)
    spin = make_pose(exp_so3(rate_rot * t * _E_X))
    return turn, offset, spin


def circular_pose(spec: CircularMotionSpec, t: float) -> Pose:
    turn, offset, spin = _factors(spec, t)
    return turn @ offset @ spin


def circular_body_velocity(spec: CircularMotionSpec, t: float) -> Twist:
    """
    Closed-form body twist ``[v; w]`` of the circular motion at ``t``.

    The turn contributes its twist ``[0; w_t e_z]`` transported into the
    body frame by ``Ad((Trans Rx)^-1)``, the spin adds ``[0; w_r e_x]``.
    """
    rate_transl, rate_rot = spec.rates
    _, offset, spin = _factors(spec, t)
    turn_twist = np.concatenate([np.zeros(3), rate_transl * _E_Z])
    spin_twist = np.concatenate([np.zeros(3), rate_rot * _E_X])
    return adjoint(invert_pose(offset @ spin)) @ turn_twist + spin_twist


def generate_circular(spec: CircularMotionSpec) -> List[TimedPose]:
    """
    Ground-truth poses at the frame timestamps.

    Examples:
        >>> poses = generate_circular(CircularMotionSpec(0.0, 0.0))
        >>> all(np.allclose(pose, poses[0][1]) for _, pose in poses)
        True
    """
    spec.check()
    return [(float(t), circular_pose(spec, t)) for t in spec.frame_times()]


def circular_spline(spec: CircularMotionSpec,
                    degree: int = 4) -> SplineTrajectory:
    """
    Spline with one knot per frame whose control points are the ground
    truth sampled at the Greville abscissae of the knots.
    """
    spec.check()
    kv = KnotVector(spec.frame_times(), degree)
    poses = [circular_pose(spec, t) for t in kv.greville_abscissae()]
    return SplineTrajectory(kv, poses)


def random_trajectory(
    n: int,
    degree: int = 4,
    rng: np.random.RandomState = None,
    max_increment: float = 0.5,
    jitter: float = 0.0,
    dt: float = 0.1,
) -> SplineTrajectory:
    """
    Random spline whose relative increments satisfy
    ``||Omega_j|| < max_increment``.

    Args:
        n (int): number of knots and control points
        degree (int): spline order
        rng: random state, a fresh unseeded one if ``None``
        max_increment (float): bound on the increment norms
        jitter (float): relative knot spacing noise in ``[0, 1)``,
            0 gives uniform knots
        dt (float): mean knot spacing, seconds
    """
    assert 0.0 <= jitter < 1.0, f"jitter must be in [0, 1), got {jitter}"
    rng = rng or np.random.RandomState()
    spacing = dt * (1.0 + jitter * rng.uniform(-1.0, 1.0, size=n - 1))
    knots = np.concatenate([[0.0], np.cumsum(spacing)])

    poses = [exp_se3(rng.randn(6))]
    for _ in range(n - 1):
        direction = rng.randn(6)
        size = rng.uniform(0.1, 0.9) * max_increment
        step = size * direction / np.linalg.norm(direction)
        poses.append(poses[-1] @ exp_se3(step))
    return SplineTrajectory(knots, poses, degree)


__all__ = [
    "CircularMotionSpec",
    "circular_pose",
    "circular_body_velocity",
    "generate_circular",
    "circular_spline",
    "random_trajectory",
]
