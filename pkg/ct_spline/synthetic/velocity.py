"""
Discrete-time velocity baselines and the continuous-time comparison.

The two baselines hold one twist constant over ``[t_k, t_{k+1})``:
the coupled one reads it from the relative pose as a screw motion, the
decoupled one differentiates position and orientation separately.
"""
from typing import Dict, List, NamedTuple, Sequence, Tuple  # isort:skip
import logging

import numpy as np
import pandas as pd
from tqdm import tqdm

from ct_spline.core.lie import invert_pose, log_se3, log_so3
from ct_spline.core.spline import body_velocity
from ct_spline.core.typing import Pose, Twist
from ct_spline.exceptions import ValidationError
from ct_spline.synthetic.motion import (
    circular_body_velocity, circular_pose, circular_spline,
    CircularMotionSpec
)
from ct_spline.utils.misc import pairwise
from ct_spline.utils.parallel import get_pool, tqdm_parallel_imap

logger = logging.getLogger(__name__)

CT = "ct"
DT_COUPLED = "dt_coupled"
DT_DECOUPLED = "dt_decoupled"
METHODS = (CT, DT_COUPLED, DT_DECOUPLED)

DEFAULT_THETAS = tuple(np.round(0.05 * np.arange(11), 2))
MSE_COLUMNS = ["theta_transl", "theta_rot", "method", "mse_v", "mse_w"]


def dt_velocity_coupled(T_k: Pose, T_k1: Pose, dt: float) -> Twist:
    """
    ``Log(T_k^-1 T_{k+1}) / dt``.

    Raises:
        BranchAmbiguityError: if the relative rotation is ~pi
    """
    assert dt > 0, f"dt must be positive, got {dt}"
    return log_se3(invert_pose(T_k) @ T_k1) / dt


def dt_velocity_decoupled(T_k: Pose, T_k1: Pose, dt: float) -> Twist:
    """
    ``v = R_k^T (t_{k+1} - t_k) / dt`` and
    ``w = Log(R_k^T R_{k+1}) / dt``.

    Raises:
        BranchAmbiguityError: if the relative rotation is ~pi
    """
    assert dt > 0, f"dt must be positive, got {dt}"
    R_k = T_k[:3, :3]
    linear = R_k.T @ (T_k1[:3, 3] - T_k[:3, 3]) / dt
    angular = log_so3(R_k.T @ T_k1[:3, :3]) / dt
    return np.concatenate([linear, angular])


DT_ESTIMATORS = {
    DT_COUPLED: dt_velocity_coupled,
    DT_DECOUPLED: dt_velocity_decoupled,
}


def dt_velocities(
    poses: Sequence[Pose],
    dt: float,
    method: str = DT_COUPLED,
) -> np.ndarray:
    """
    One twist per consecutive pair of poses, ``(len(poses) - 1, 6)``.
    """
    estimator = DT_ESTIMATORS[method]
    return np.array([estimator(a, b, dt) for a, b in pairwise(poses)])


def sample_instants(
    start: float, dt: float, samples_per_interval: int
) -> np.ndarray:
    """
    Centers of ``samples_per_interval`` equal sub-intervals of
    ``[start, start + dt)``; a single sample is the midpoint.
    """
    assert samples_per_interval >= 1, \
        f"need at least one sample, got {samples_per_interval}"
    return start + dt * (np.arange(samples_per_interval) + 0.5) \
        / samples_per_interval


class VelocityErrors(NamedTuple):
    mse_v: float
    mse_w: float


def velocity_errors(
    spec: CircularMotionSpec,
    degree: int = 4,
    samples_per_interval: int = 10,
) -> Dict[str, VelocityErrors]:
    """
    Mean squared twist error of each method against the closed-form
    ground truth, averaged over the sample instants of every frame
    interval inside the spline's valid range.

    Squared errors are squared Euclidean norms of the linear part
    ``(m/s)^2`` and the angular part ``(rad/s)^2``.
    """
    spec.check()
    traj = circular_spline(spec, degree)
    times = spec.frame_times()
    poses = [circular_pose(spec, t) for t in times]

    squared = {method: [] for method in METHODS}
    for k in range(degree - 1, len(times) - 1):
        constant = {
            method: estimator(poses[k], poses[k + 1], spec.frame_dt)
            for method, estimator in DT_ESTIMATORS.items()
        }
        for t in sample_instants(
            times[k], spec.frame_dt, samples_per_interval
        ):
            truth = circular_body_velocity(spec, t)
            estimates = dict(constant, **{CT: body_velocity(traj, t)})
            for method, estimate in estimates.items():
                error = estimate - truth
                squared[method].append(
                    [error[:3] @ error[:3], error[3:] @ error[3:]]
                )
    return {
        method: VelocityErrors(*np.mean(values, axis=0))
        for method, values in squared.items()
    }


def _run_cell(args: Tuple) -> List[list]:
    spec, degree, samples_per_interval = args
    errors = velocity_errors(spec, degree, samples_per_interval)
    return [
        [spec.theta_transl, spec.theta_rot, method, e.mse_v, e.mse_w]
        for method, e in errors.items()
    ]


def velocity_mse_experiment(
    theta_transl: Sequence[float] = DEFAULT_THETAS,
    theta_rot: Sequence[float] = DEFAULT_THETAS,
    radius: float = 1.0,
    frame_dt: float = 0.1,
    n_frames: int = 30,
    degree: int = 4,
    samples_per_interval: int = 10,
    workers: int = 0,
    progress: bool = True,
) -> pd.DataFrame:
    """
    Velocity MSE of the continuous-time spline and both discrete-time
    baselines over a ``theta_transl x theta_rot`` grid.

    CT control points are the ground truth at the Greville abscissae of
    the frame knots and DT frames are the ground-truth poses, so neither
    side is fitted. Cells are independent and deterministic; they run in
    ``workers`` processes (in-process for 0).

    Returns:
        pd.DataFrame: one row per cell and method, columns
        ``theta_transl, theta_rot, method, mse_v, mse_w``, sorted
    """
    theta_transl = list(theta_transl)
    theta_rot = list(theta_rot)
    if not theta_transl or not theta_rot:
        raise ValidationError("velocity experiment grid is empty")
    cells = [
        (
            CircularMotionSpec(
                theta_transl=float(a),
                theta_rot=float(b),
                radius=radius,
                frame_dt=frame_dt,
                n_frames=n_frames,
            ).check(),
            degree,
            samples_per_interval,
        ) for a in theta_transl for b in theta_rot
    ]
    logger.info(
        f"velocity experiment: {len(theta_transl)}x{len(theta_rot)} "
        f"cells, {samples_per_interval} samples per interval"
    )
    with get_pool(workers) as pool:
        results = tqdm_parallel_imap(
            _run_cell,
            cells,
            pool,
            pbar=tqdm if progress else None,
            desc="velocity cells",
        )
    rows = [row for cell in results for row in cell]
    table = pd.DataFrame(rows, columns=MSE_COLUMNS)
    return table.sort_values(["theta_transl", "theta_rot", "method"]) \
        .reset_index(drop=True)


__all__ = [
    "CT",
    "DT_COUPLED",
    "DT_DECOUPLED",
    "METHODS",
    "MSE_COLUMNS",
    "dt_velocity_coupled",
    "dt_velocity_decoupled",
    "dt_velocities",
    "sample_instants",
    "VelocityErrors",
    "velocity_errors",
    "velocity_mse_experiment",
]
