"""
Sliding-window bookkeeping: a spline segment over the newest frames,
the object points and the gauge policy deciding what the solver may move.
"""
from typing import Dict, List, Optional, Tuple  # isort:skip
from collections import Counter
import logging

import numpy as np

from ct_spline.core.lie import invert_pose, make_pose
from ct_spline.core.spline import interpolate_pose, SplineTrajectory
from ct_spline.core.typing import Pose, Vector
from ct_spline.exceptions import DegenerateCloudError, KnotError
from ct_spline.solver.problem import BAMode, Frame

logger = logging.getLogger(__name__)

#: relative singular value below which a point cloud counts as collinear
COLLINEAR_TOL = 1e-9
#: frames needed before the first optimization
MIN_FRAMES = 4


class Window:
    """
    Active part of the estimation problem.

    The newest ``window_size`` knots live in ``trajectory``; older knots
    and their control points are moved to the archive and never change
    again. Frames whose timestamp precedes the first active knot are
    dropped.

    Args:
        mode (BAMode): which variables are optimized
        window_size (int): maximum number of active knots
        degree (int): spline order
        trajectory (SplineTrajectory): initial active segment
        object_points (dict): ``point_id -> p_o``
        frames (list): frames inside the active segment
    """
    def __init__(
        self,
        mode: BAMode = BAMode.SPLINE_BA,
        window_size: int = 10,
        degree: int = 4,
        trajectory: SplineTrajectory = None,
        object_points: Dict[int, Vector] = None,
        frames: List[Frame] = None,
    ):
        assert window_size >= degree, \
            f"window_size {window_size} is smaller than degree {degree}"
        self.mode = BAMode(mode)
        self.window_size = window_size
        self.degree = degree
        self.trajectory = trajectory
        self.object_points: Dict[int, Vector] = {
            key: np.asarray(value, dtype=float)
            for key, value in (object_points or {}).items()
        }
        self.frames: List[Frame] = list(frames or [])
        self.archive_knots: List[float] = []
        self.archive_poses: List[Pose] = []
        # single knot before the first advance
        self._head: Optional[Tuple[float, Pose]] = None

    def __repr__(self) -> str:
        return (
            f"Window(mode={self.mode.value}, knots={self.n_knots}, "
            f"frames={len(self.frames)}, points={len(self.object_points)})"
        )

    @property
    def n_knots(self) -> int:
        if self.trajectory is None:
            return 0 if self._head is None else 1
        return len(self.trajectory)

    @property
    def last_knot(self) -> Optional[float]:
        if self.trajectory is not None:
            return float(self.trajectory.knots[-1])
        return None if self._head is None else self._head[0]

    @property
    def newest_pose(self) -> Pose:
        if self.trajectory is not None:
            return self.trajectory.control_points[-1]
        return self._head[1]

    @property
    def ready(self) -> bool:
        """
        Whether enough frames arrived for the first optimization.
        """
        return self.trajectory is not None \
            and len(self.frames) >= MIN_FRAMES \
            and len(self.trajectory) >= self.degree

    def fixed_flags(self) -> np.ndarray:
        """
        Per-control-point gauge flags: the first (first two in LocalBA)
        and the last two control points stay fixed.
        """
        n_control = self.n_knots
        flags = np.zeros(n_control, dtype=bool)
        n_head = 2 if self.mode == BAMode.LOCAL_BA else 1
        flags[:n_head] = True
        flags[max(0, n_control - 2):] = True
        return flags

    def free_control_points(self) -> np.ndarray:
        return np.flatnonzero(~self.fixed_flags())

    def active_frames(self) -> List[Frame]:
        """
        Frames inside the valid range of the active segment.
        """
        if self.trajectory is None or len(self.trajectory) < self.degree:
            return []
        start, _ = self.trajectory.valid_range()
        return [frame for frame in self.frames if frame.timestamp >= start]

    def free_points(self) -> List[int]:
        """
        Object points refined in LocalBA: those observed in at least two
        active frames. Always empty in SplineBA.
        """
        if self.mode != BAMode.LOCAL_BA:
            return []
        counts = Counter()
        for frame in self.active_frames():
            counts.update(set(frame.point_ids))
        return sorted(
            point_id for point_id, count in counts.items()
            if count >= 2 and point_id in self.object_points
        )

    def full_trajectory(self) -> SplineTrajectory:
        """
        Archived and active control points as one spline.

        Raises:
            KnotError: if fewer than two knots exist
        """
        knots = list(self.archive_knots)
        poses = list(self.archive_poses)
        if self.trajectory is not None:
            knots.extend(self.trajectory.knots)
            poses.extend(self.trajectory.control_points)
        elif self._head is not None:
            knots.append(self._head[0])
            poses.append(self._head[1])
        return SplineTrajectory(knots, poses, self.degree, closed=True)

    def _append_knot(self, t: float, pose: Pose) -> None:
        if self.trajectory is None:
            t_head, pose_head = self._head
            self.trajectory = SplineTrajectory(
                [t_head, t], [pose_head, pose], self.degree, closed=True
            )
            self._head = None
        else:
            self.trajectory.append(t, pose)

    def _evict(self) -> None:
        excess = len(self.trajectory) - self.window_size
        if excess <= 0:
            return
        self.archive_knots.extend(self.trajectory.knots[:excess])
        self.archive_poses.extend(self.trajectory.control_points[:excess])
        self.trajectory.drop_first(excess)
        first = self.trajectory.knots[0]
        self.frames = [
            frame for frame in self.frames if frame.timestamp >= first
        ]
        logger.debug(f"evicted {excess} knot(s), window starts at {first}")


def _principal_axes(centered: np.ndarray) -> np.ndarray:
    _, singular, vt = np.linalg.svd(centered, full_matrices=False)
    if singular[0] <= 0 or singular[1] <= COLLINEAR_TOL * singular[0]:
        raise DegenerateCloudError(
            f"point cloud is collinear or coincident "
            f"(singular values {np.round(singular, 12).tolist()})"
        )
    first, second = vt[0], vt[1]
    # sign choice: first axis towards +x, second towards +y when defined
    if first[0] < 0:
        first = -first
    if second[1] < 0:
        second = -second
    return np.stack([first, second, np.cross(first, second)], axis=1)


def bootstrap(
    first_frame: Frame,
    mode: BAMode = BAMode.SPLINE_BA,
    window_size: int = 10,
    degree: int = 4,
) -> Tuple[Window, Dict[int, Vector]]:
    """
    Creates the first control point from the first frame's point cloud:
    its origin at the centroid, its orientation along the principal axes.

    Returns:
        tuple: window holding the single knot, and the object points
        ``point_id -> p_o`` expressed in the first control point's frame

    Raises:
        DegenerateCloudError: if fewer than three points are observed
            or they are collinear
    """
    world = first_frame.world_points()
    if len(world) < 3:
        raise DegenerateCloudError(
            f"need at least 3 points to bootstrap, got {len(world)}"
        )
    centroid = world.mean(axis=0)
    rotation = _principal_axes(world - centroid)
    pose = make_pose(rotation, centroid)

    pose_inv = invert_pose(pose)
    object_points = {
        point_id: pose_inv[:3, :3] @ point + pose_inv[:3, 3]
        for point_id, point in zip(first_frame.point_ids, world)
    }
    window = Window(
        mode=mode,
        window_size=window_size,
        degree=degree,
        object_points=object_points,
        frames=[first_frame],
    )
    window._head = (first_frame.timestamp, pose)
    logger.info(
        f"bootstrapped {len(object_points)} object points "
        f"at t={first_frame.timestamp}"
    )
    return window, window.object_points


def advance_window(window: Window, frame: Frame) -> Window:
    """
    Adds the knot of a new frame.

    The new control point starts as a copy of the newest one. From the
    fourth knot on, ``T_{i-2}`` is re-initialized at the world centroid of
    the frame's points with the orientation of ``T_{i-3}``, and
    ``T_{i-1}``, ``T_i`` copy it. Knots beyond ``window_size`` are
    archived.

    Raises:
        KnotError: if the frame does not come after the newest knot
    """
    last = window.last_knot
    if last is not None and not frame.timestamp > last:
        raise KnotError(
            f"frame timestamp {frame.timestamp!r} does not follow "
            f"the newest knot {last!r}"
        )

    window._append_knot(frame.timestamp, window.newest_pose.copy())

    traj = window.trajectory
    i = len(traj) - 1
    if i >= 3:
        centroid = frame.world_points().mean(axis=0)
        pose = make_pose(traj.control_points[i - 3][:3, :3], centroid)
        for j in (i - 2, i - 1, i):
            traj.set_control_point(j, pose)

    if window.mode == BAMode.LOCAL_BA:
        _add_new_points(window, frame)
    window.frames.append(frame)
    window._evict()
    return window


def _add_new_points(window: Window, frame: Frame) -> None:
    new = [
        (point_id, point)
        for point_id, point in zip(frame.point_ids, frame.world_points())
        if point_id not in window.object_points
    ]
    if not new:
        return
    pose_inv = invert_pose(interpolate_pose(window.trajectory,
                                            frame.timestamp)) \
        if len(window.trajectory) >= window.degree \
        else invert_pose(window.trajectory.control_points[-1])
    for point_id, point in new:
        window.object_points[point_id] = \
            pose_inv[:3, :3] @ point + pose_inv[:3, 3]
    logger.debug(f"added {len(new)} object points at t={frame.timestamp}")


__all__ = [
    "COLLINEAR_TOL",
    "MIN_FRAMES",
    "Window",
    "bootstrap",
    "advance_window",
]
