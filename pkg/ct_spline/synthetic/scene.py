from typing import Dict, List, Mapping, NamedTuple, Union  # isort:skip
import logging

import numpy as np

from ct_spline.core.lie import invert_pose, make_pose
from ct_spline.core.spline import interpolate_pose, SplineTrajectory
from ct_spline.core.typing import Pose, TimedPose, TrajectoryFn, Vector
from ct_spline.solver.problem import Frame, group_frames, Observation
from ct_spline.synthetic.motion import (
    circular_pose, CircularMotionSpec, generate_circular
)

logger = logging.getLogger(__name__)

PoseSource = Union[Pose, SplineTrajectory, TrajectoryFn]


class SimulatedScene(NamedTuple):
    """
    Attributes:
        ground_truth_poses: object poses ``T_wo`` at the frame times
        object_points: point id to position in the object frame
        camera_poses: camera poses ``T_wc`` at the frame times
        noise_sigma: standard deviation of the measurement noise, meters
        rng_seed: seed the noise was drawn with
        observations: simulated measurements, ordered by time then id
    """
    ground_truth_poses: List[TimedPose]
    object_points: Dict[int, Vector]
    camera_poses: List[TimedPose]
    noise_sigma: float
    rng_seed: int
    observations: List[Observation]

    def frames(self) -> List[Frame]:
        return group_frames(self.observations)


def _pose_at(source: PoseSource, t: float) -> Pose:
    if isinstance(source, SplineTrajectory):
        return interpolate_pose(source, t)
    if callable(source):
        return source(t)
    return np.asarray(source, dtype=float)


def simulate_observations(
    truth: PoseSource,
    points: Mapping[int, Vector],
    camera: PoseSource,
    times,
    noise_sigma: float = 0.0,
    seed: int = None,
) -> List[Observation]:
    """
    Measures every object point in the camera frame at every timestamp:
    ``p_c = T_wc^-1 T_wo(t) p_o + n`` with ``n ~ N(0, noise_sigma^2 I)``.

    Args:
        truth: object trajectory, a spline, a function of time or a
            constant pose
        points: point id to position in the object frame
        camera: camera pose ``T_wc``, same kinds as ``truth``
        times: frame timestamps
        noise_sigma (float): noise standard deviation, meters
        seed (int): seed of the noise stream

    Returns:
        List[Observation]: one per point and timestamp
    """
    assert noise_sigma >= 0, f"noise_sigma must be >= 0, got {noise_sigma}"
    rng = np.random.RandomState(seed)
    point_ids = sorted(points)
    object_points = np.array([points[k] for k in point_ids], dtype=float)

    observations = []
    for t in times:
        t = float(t)
        camera_pose = _pose_at(camera, t)
        transform = invert_pose(camera_pose) @ _pose_at(truth, t)
        measured = object_points @ transform[:3, :3].T + transform[:3, 3]
        if noise_sigma > 0:
            measured = measured + rng.normal(
                0.0, noise_sigma, size=measured.shape
            )
        observations.extend(
            Observation(
                point_id=point_id,
                timestamp=t,
                p_c=p_c,
                camera_pose=camera_pose,
            ) for point_id, p_c in zip(point_ids, measured)
        )
    return observations


def make_scene(
    spec: CircularMotionSpec,
    n_points: int = 12,
    noise_sigma: float = 0.0,
    seed: int = 42,
    extent: float = 0.15,
) -> SimulatedScene:
    """
    Circular motion seen by a static camera looking from below the
    circle's plane.

    The object points are drawn uniformly in a cube of half-size
    ``extent`` and shifted to zero mean, so the object origin coincides
    with the centroid a bootstrap would pick.
    """
    rng = np.random.RandomState(seed)
    cloud = rng.uniform(-extent, extent, size=(n_points, 3))
    cloud -= cloud.mean(axis=0)
    points = {k: p for k, p in enumerate(cloud)}

    camera_pose = make_pose(
        translation=np.array([0.0, 0.0, -(2.0 * spec.radius + 1.0)])
    )
    truth = generate_circular(spec)
    times = [t for t, _ in truth]
    observations = simulate_observations(
        lambda t: circular_pose(spec, t),
        points,
        camera_pose,
        times,
        noise_sigma=noise_sigma,
        seed=rng.randint(2**31 - 1),
    )
    logger.debug(
        f"simulated {len(observations)} observations of {n_points} points "
        f"over {len(times)} frames, sigma {noise_sigma}"
    )
    return SimulatedScene(
        ground_truth_poses=truth,
        object_points=points,
        camera_poses=[(t, camera_pose) for t in times],
        noise_sigma=noise_sigma,
        rng_seed=seed,
        observations=observations,
    )


__all__ = ["SimulatedScene", "simulate_observations", "make_scene"]
