"""
Text formats for trajectories, control points and observations.

Trajectories are whitespace-separated ``timestamp tx ty tz qx qy qz qw``
records, one per line, ``#`` starts a comment. Control-point files use
the same records (timestamps are the knots) after ``# degree: k`` and
``# closed: 0|1`` header lines. Observations are CSV with the header
``timestamp,point_id,pcx,pcy,pcz,tx,ty,tz,qx,qy,qz,qw``.
"""
from typing import Dict, List, Sequence, Tuple, Union  # isort:skip
from logging import getLogger
from pathlib import Path
import re

import numpy as np
import pandas as pd
from scipy.spatial.transform import Rotation

from ct_spline.core.lie import make_pose
from ct_spline.core.spline import SplineTrajectory
from ct_spline.core.typing import Pose, TimedPose, TimedPoses
from ct_spline.exceptions import FileFormatError, ValidationError
from ct_spline.solver.problem import Observation
from ct_spline.utils.misc import atomic_write

logger = getLogger(__name__)

QUATERNION_TOL = 1e-6
TRAJECTORY_HEADER = "# timestamp tx ty tz qx qy qz qw"
OBSERVATION_COLUMNS = [
    "timestamp", "point_id", "pcx", "pcy", "pcz",
    "tx", "ty", "tz", "qx", "qy", "qz", "qw",
]
_POSE_COLUMNS = ["tx", "ty", "tz", "qx", "qy", "qz", "qw"]


def pose_from_record(values: Sequence[float]) -> Pose:
    """
    ``[tx, ty, tz, qx, qy, qz, qw]`` to a 4x4 pose. The quaternion must
    already be unit length.
    """
    rotation = Rotation.from_quat(np.asarray(values[3:7], dtype=float))
    return make_pose(rotation.as_matrix(), np.asarray(values[:3]))


def pose_to_record(pose: Pose) -> List[float]:
    quat = Rotation.from_matrix(pose[:3, :3]).as_quat()
    if quat[3] < 0:
        quat = -quat
    return [float(x) for x in pose[:3, 3]] + [float(x) for x in quat]


def _check_quaternion(path, line: int, quat: np.ndarray) -> None:
    norm = float(np.linalg.norm(quat))
    if abs(norm - 1.0) > QUATERNION_TOL:
        raise FileFormatError(
            path, line, f"quaternion norm {norm!r} is not 1"
        )


def _format(values: Sequence[float]) -> str:
    return " ".join(repr(float(v)) for v in values)


def _read_records(
    path: Union[str, Path]
) -> Tuple[Dict[str, str], List[Tuple[int, float, Pose]]]:
    header: Dict[str, str] = {}
    records = []
    with Path(path).open(encoding="utf-8") as stream:
        for line_no, line in enumerate(stream, start=1):
            content = line.strip()
            if content.startswith("#"):
                match = re.match(r"#\s*(\w+)\s*:\s*(\S+)\s*$", content)
                if match:
                    header[match.group(1)] = match.group(2)
                continue
            if not content:
                continue
            fields = content.split()
            if len(fields) != 8:
                raise FileFormatError(
                    path, line_no, f"expected 8 fields, got {len(fields)}"
                )
            try:
                values = np.array([float(f) for f in fields])
            except ValueError as ex:
                raise FileFormatError(path, line_no, str(ex)) from ex
            if not np.all(np.isfinite(values)):
                raise FileFormatError(path, line_no, "non-finite value")
            _check_quaternion(path, line_no, values[4:8])
            if records and values[0] <= records[-1][1]:
                raise FileFormatError(
                    path, line_no,
                    f"timestamp {values[0]!r} does not increase "
                    f"(previous {records[-1][1]!r})"
                )
            records.append(
                (line_no, float(values[0]), pose_from_record(values[1:]))
            )
    return header, records


def read_trajectory(path: Union[str, Path]) -> List[TimedPose]:
    """
    Raises:
        FileFormatError: with the offending line number
    """
    _, records = _read_records(path)
    logger.debug(f"read {len(records)} poses from {path}")
    return [(t, pose) for _, t, pose in records]


def write_trajectory(
    path: Union[str, Path],
    poses: TimedPoses,
    comment: str = None,
) -> None:
    with atomic_write(path) as stream:
        if comment:
            stream.write(f"# {comment}\n")
        stream.write(TRAJECTORY_HEADER + "\n")
        for t, pose in poses:
            stream.write(_format([t] + pose_to_record(pose)) + "\n")


def read_control_points(
    path: Union[str, Path],
    closed: bool = None,
) -> SplineTrajectory:
    """
    Loads a spline written by ``write_control_points``.

    Args:
        path: control-points file
        closed (bool): domain end to use, the file header decides when
            ``None``

    Raises:
        FileFormatError: on malformed records or header values
        KnotError: if there are fewer knots than the degree requires
    """
    header, records = _read_records(path)
    try:
        degree = int(header.get("degree", 4))
        if closed is None:
            closed = bool(int(header.get("closed", 0)))
    except ValueError as ex:
        raise FileFormatError(path, 1, f"bad header: {ex}") from ex
    if len(records) < max(degree, 2):
        raise ValidationError(
            f"{path}: degree {degree} spline needs at least "
            f"{max(degree, 2)} control points, got {len(records)}"
        )
    knots = [t for _, t, _ in records]
    poses = [pose for _, _, pose in records]
    return SplineTrajectory(knots, poses, degree=degree, closed=closed)


def write_control_points(
    path: Union[str, Path],
    traj: SplineTrajectory,
) -> None:
    with atomic_write(path) as stream:
        stream.write(f"# degree: {traj.degree}\n")
        stream.write(f"# closed: {int(traj.closed)}\n")
        stream.write(TRAJECTORY_HEADER + "\n")
        for t, pose in zip(traj.knots, traj.control_points):
            stream.write(_format([t] + pose_to_record(pose)) + "\n")


def _csv_line(ex: Exception) -> int:
    match = re.search(r"line (\d+)", str(ex))
    return int(match.group(1)) if match else 0


def _to_float(value) -> float:
    # float() reads %.17g output back bit for bit
    try:
        return float(value)
    except (TypeError, ValueError):
        return np.nan


def read_observations(path: Union[str, Path]) -> List[Observation]:
    """
    Loads observations; records sharing a timestamp must share the
    camera pose.

    Raises:
        FileFormatError: with the offending line number
    """
    try:
        frame = pd.read_csv(path, dtype=str, skipinitialspace=True)
    except pd.errors.EmptyDataError as ex:
        raise FileFormatError(path, 1, "empty observation file") from ex
    except pd.errors.ParserError as ex:
        raise FileFormatError(path, _csv_line(ex), str(ex)) from ex

    missing = [c for c in OBSERVATION_COLUMNS if c not in frame.columns]
    if missing:
        raise FileFormatError(path, 1, f"missing columns {missing}")

    # data row i sits on line i + 2, after the header
    values = frame[OBSERVATION_COLUMNS].apply(
        lambda column: column.map(_to_float)
    )
    bad = values.isna().any(axis=1) \
        | ~np.isfinite(values.fillna(0.0).to_numpy()).all(axis=1)
    if bad.any():
        row = int(np.argmax(bad.to_numpy()))
        raise FileFormatError(
            path, row + 2, f"non-numeric value in {frame.iloc[row].tolist()}"
        )
    point_ids = values["point_id"].to_numpy()
    if not np.all(point_ids == np.round(point_ids)):
        row = int(np.argmax(point_ids != np.round(point_ids)))
        raise FileFormatError(path, row + 2, "point_id is not an integer")

    observations = []
    cameras: Dict[float, Tuple[np.ndarray, Pose]] = {}
    for row, record in enumerate(values.itertuples(index=False)):
        line_no = row + 2
        t = float(record.timestamp)
        pose_values = np.array([getattr(record, c) for c in _POSE_COLUMNS])
        _check_quaternion(path, line_no, pose_values[3:])
        known = cameras.get(t)
        if known is None:
            cameras[t] = known = (pose_values, pose_from_record(pose_values))
        elif not np.array_equal(known[0], pose_values):
            raise FileFormatError(
                path, line_no,
                f"camera pose differs from earlier records at {t!r}"
            )
        observations.append(
            Observation(
                point_id=int(record.point_id),
                timestamp=t,
                p_c=np.array([record.pcx, record.pcy, record.pcz]),
                camera_pose=known[1],
            )
        )
    logger.debug(
        f"read {len(observations)} observations in {len(cameras)} frames "
        f"from {path}"
    )
    return observations


def observations_to_dataframe(
    observations: Sequence[Observation]
) -> pd.DataFrame:
    rows = [
        [obs.timestamp, obs.point_id, *obs.p_c,
         *pose_to_record(obs.camera_pose)] for obs in observations
    ]
    frame = pd.DataFrame(rows, columns=OBSERVATION_COLUMNS)
    frame["point_id"] = frame["point_id"].astype(int)
    return frame


def write_observations(
    path: Union[str, Path],
    observations: Sequence[Observation],
) -> None:
    write_table(path, observations_to_dataframe(observations))


def write_table(path: Union[str, Path], table: pd.DataFrame) -> None:
    with atomic_write(path) as stream:
        table.to_csv(stream, index=False, float_format="%.17g")


__all__ = [
    "QUATERNION_TOL",
    "OBSERVATION_COLUMNS",
    "pose_from_record",
    "pose_to_record",
    "read_trajectory",
    "write_trajectory",
    "read_control_points",
    "write_control_points",
    "read_observations",
    "observations_to_dataframe",
    "write_observations",
    "write_table",
]
