from typing import Any, Dict, List, Mapping, NamedTuple, Sequence  # isort:skip
from enum import Enum

import numpy as np

from ct_spline.core.jacobians import FORMS, VECTORIZED
from ct_spline.core.typing import Matrix, Pose, Vector
from ct_spline.exceptions import ValidationError


class BAMode(str, Enum):
    """
    ``SPLINE_BA`` keeps the object model fixed, ``LOCAL_BA`` refines the
    object points together with the trajectory.
    """
    SPLINE_BA = "spline_ba"
    LOCAL_BA = "local_ba"


class Observation(NamedTuple):
    """
    One 3D point measured in the camera frame.

    Attributes:
        point_id: identifier of the object point
        timestamp: seconds
        p_c: measured point, camera frame, meters
        camera_pose: ``T_wc``
        covariance: 3x3 SPD measurement covariance, identity if ``None``
    """
    point_id: int
    timestamp: float
    p_c: Vector
    camera_pose: Pose
    covariance: Matrix = None

    def information(self) -> Matrix:
        if self.covariance is None:
            return np.eye(3)
        return np.linalg.inv(self.covariance)


class ObjectPoint(NamedTuple):
    point_id: int
    p_o: Vector


class Frame(NamedTuple):
    """
    Observations taken from one image: same timestamp, same camera pose.
    """
    timestamp: float
    observations: List[Observation]

    @property
    def camera_pose(self) -> Pose:
        return self.observations[0].camera_pose

    @property
    def point_ids(self) -> List[int]:
        return [obs.point_id for obs in self.observations]

    def measured(self) -> np.ndarray:
        return np.array([obs.p_c for obs in self.observations], dtype=float)

    def world_points(self) -> np.ndarray:
        T_wc = self.camera_pose
        return self.measured() @ T_wc[:3, :3].T + T_wc[:3, 3]

    @classmethod
    def from_observations(cls, observations: Sequence[Observation]):
        observations = list(observations)
        if not observations:
            raise ValidationError("frame without observations")
        timestamp = observations[0].timestamp
        camera_pose = observations[0].camera_pose
        for obs in observations[1:]:
            if obs.timestamp != timestamp:
                raise ValidationError(
                    f"frame mixes timestamps {timestamp!r} "
                    f"and {obs.timestamp!r}"
                )
            if not np.array_equal(obs.camera_pose, camera_pose):
                raise ValidationError(
                    f"frame at {timestamp!r} mixes camera poses"
                )
        return cls(timestamp=timestamp, observations=observations)


def group_frames(observations: Sequence[Observation]) -> List[Frame]:
    """
    Groups observations by timestamp into frames ordered in time.
    """
    grouped: Dict[float, List[Observation]] = {}
    for obs in observations:
        grouped.setdefault(obs.timestamp, []).append(obs)
    return [Frame.from_observations(grouped[t]) for t in sorted(grouped)]


class SolverConfig(NamedTuple):
    """
    Robustified Gauss-Newton settings.

    Attributes:
        huber_delta: Huber transition, meters
        max_iterations: iteration cap per window solve
        step_tolerance: stop when the step infinity-norm falls below
        cost_tolerance: stop when the relative cost decrease falls below
        damping_init: first Levenberg damping after a rejected step
        max_damping_attempts: rejected steps tried per iteration
        jacobian_form: ``"vectorized"`` or ``"lie"``
    """
    huber_delta: float = 0.05
    max_iterations: int = 20
    step_tolerance: float = 1e-8
    cost_tolerance: float = 1e-10
    damping_init: float = 1e-4
    max_damping_attempts: int = 10
    jacobian_form: str = VECTORIZED

    def check(self) -> "SolverConfig":
        for name in [
            "huber_delta", "max_iterations", "step_tolerance",
            "cost_tolerance", "damping_init", "max_damping_attempts"
        ]:
            value = getattr(self, name)
            if not value > 0:
                raise ValidationError(
                    f"solver.{name} must be positive, got {value!r}"
                )
        if self.jacobian_form not in FORMS:
            raise ValidationError(
                f"solver.jacobian_form must be one of {FORMS}, "
                f"got {self.jacobian_form!r}"
            )
        return self

    @classmethod
    def from_dict(cls, params: Mapping[str, Any] = None) -> "SolverConfig":
        """
        Builds a config from the ``solver`` section of a config file;
        missing keys keep their defaults, unknown keys are rejected.
        """
        params = dict(params or {})
        unknown = sorted(set(params) - set(cls._fields))
        if unknown:
            raise ValidationError(f"unknown solver settings: {unknown}")
        return cls(**params).check()


__all__ = [
    "BAMode",
    "Observation",
    "ObjectPoint",
    "Frame",
    "group_frames",
    "SolverConfig",
]
