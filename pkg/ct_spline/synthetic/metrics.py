from typing import NamedTuple, Sequence, Tuple  # isort:skip
import logging
import warnings

import numpy as np
from scipy.spatial.transform import Rotation

from ct_spline.core.typing import Matrix, Pose, Vector
from ct_spline.exceptions import ValidationError

logger = logging.getLogger(__name__)


def align_se3(source: np.ndarray,
              target: np.ndarray) -> Tuple[Matrix, Vector]:
    """
    Rigid transform ``(R, t)`` minimizing
    ``sum ||target_i - R source_i - t||^2``.

    With fewer than two points, or no spread, only the translation is
    estimated.

    Args:
        source: ``(N, 3)`` points
        target: ``(N, 3)`` points

    Examples:
        >>> R, t = align_se3(np.eye(3), np.eye(3) + 1.0)
        >>> np.allclose(R, np.eye(3)), np.allclose(t, 1.0)
        (True, True)
    """
    source = np.asarray(source, dtype=float).reshape(-1, 3)
    target = np.asarray(target, dtype=float).reshape(-1, 3)
    assert source.shape == target.shape, \
        f"shape mismatch: {source.shape} vs {target.shape}"
    source_mean = source.mean(axis=0)
    target_mean = target.mean(axis=0)
    centered_source = source - source_mean
    centered_target = target - target_mean

    if len(source) < 2 or not np.any(centered_source):
        rotation = np.eye(3)
    else:
        with warnings.catch_warnings():
            # collinear sets leave the rotation about their line free
            warnings.simplefilter("ignore", UserWarning)
            estimate, _ = Rotation.align_vectors(
                centered_target, centered_source
            )
        rotation = estimate.as_matrix()
    return rotation, target_mean - rotation @ source_mean


def _check_lengths(estimated, truth) -> None:
    if len(estimated) != len(truth):
        raise ValidationError(
            f"trajectories differ in length: {len(estimated)} estimated "
            f"vs {len(truth)} ground-truth poses"
        )
    if not len(truth):
        raise ValidationError("trajectories are empty")


def _prefix(align_prefix: int, n: int) -> int:
    if align_prefix is None:
        return n
    if align_prefix < 1:
        raise ValidationError(
            f"align_prefix must be positive, got {align_prefix}"
        )
    return min(align_prefix, n)


class TrajectoryErrors(NamedTuple):
    """
    Attributes:
        ate: RMS translation error after alignment, meters
        max_translation: largest per-axis absolute translation error,
            meters
        max_rotation: largest rotation error, radians, after also
            aligning the object frames
    """
    ate: float
    max_translation: float
    max_rotation: float


def _aligned_differences(
    estimated: Sequence[Pose],
    truth: Sequence[Pose],
    align_prefix: int = None,
):
    _check_lengths(estimated, truth)
    estimated = np.asarray(estimated, dtype=float)
    truth = np.asarray(truth, dtype=float)
    count = _prefix(align_prefix, len(truth))
    rotation, translation = align_se3(
        estimated[:count, :3, 3], truth[:count, :3, 3]
    )
    positions = estimated[:, :3, 3] @ rotation.T + translation
    return estimated, truth, count, rotation, truth[:, :3, 3] - positions


def _rms(diff: np.ndarray) -> float:
    return float(np.sqrt(np.mean(np.sum(diff**2, axis=1))))


def ate(
    estimated: Sequence[Pose],
    truth: Sequence[Pose],
    align_prefix: int = None,
) -> float:
    """
    Absolute trajectory error: RMS of the translation differences after
    aligning the estimate to the ground truth with the rigid transform
    fitted on the first ``align_prefix`` positions (all if ``None``).

    Raises:
        ValidationError: if the lengths differ or the lists are empty
    """
    *_, diff = _aligned_differences(estimated, truth, align_prefix)
    return _rms(diff)


def trajectory_errors(
    estimated: Sequence[Pose],
    truth: Sequence[Pose],
    align_prefix: int = None,
) -> TrajectoryErrors:
    """
    ``ate`` plus the worst translation and rotation errors. Rotation
    errors also remove the constant object-frame offset, the mean of
    ``R_est^-1 R_true`` over the alignment prefix.

    Raises:
        ValidationError: if the lengths differ or the lists are empty
    """
    estimated, truth, count, rotation, diff = _aligned_differences(
        estimated, truth, align_prefix
    )
    aligned = Rotation.from_matrix(rotation @ estimated[:, :3, :3])
    reference = Rotation.from_matrix(truth[:, :3, :3])
    offset = (aligned[:count].inv() * reference[:count]).mean()
    angles = ((aligned * offset).inv() * reference).magnitude()

    result = TrajectoryErrors(
        ate=_rms(diff),
        max_translation=float(np.abs(diff).max()),
        max_rotation=float(angles.max()),
    )
    logger.debug(f"trajectory errors over {len(truth)} poses: {result}")
    return result


__all__ = ["align_se3", "TrajectoryErrors", "ate", "trajectory_errors"]
