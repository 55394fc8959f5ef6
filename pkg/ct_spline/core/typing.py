from typing import Callable, Sequence, Tuple  # isort:skip

import numpy as np

# 4x4 homogeneous transform, last row [0, 0, 0, 1]
Pose = np.ndarray
# 6-vector ordered [v; w]
Twist = np.ndarray
Vector = np.ndarray
Matrix = np.ndarray

TimedPose = Tuple[float, Pose]
TimedPoses = Sequence[TimedPose]
TrajectoryFn = Callable[..., np.ndarray]

__all__ = [
    "Pose",
    "Twist",
    "Vector",
    "Matrix",
    "TimedPose",
    "TimedPoses",
    "TrajectoryFn",
]
