import numpy as np
import pytest

from ct_spline.core import lie
from ct_spline.core.spline import interpolate_pose
from ct_spline.exceptions import FileFormatError, ValidationError
from ct_spline.solver import Observation
from ct_spline.synthetic import random_trajectory
from ct_spline.utils import (
    OBSERVATION_COLUMNS, pose_from_record, pose_to_record,
    read_control_points, read_observations, read_trajectory,
    write_control_points, write_observations, write_trajectory
)

HEADER = ",".join(OBSERVATION_COLUMNS)


def _poses(count, seed=0):
    rng = np.random.RandomState(seed)
    return [
        (0.1 * k, lie.exp_se3(rng.uniform(-1.0, 1.0, size=6)))
        for k in range(count)
    ]


def test_pose_records():
    for _, pose in _poses(10):
        record = pose_to_record(pose)
        assert len(record) == 7 and record[6] >= 0
        assert np.linalg.norm(record[3:]) == pytest.approx(1.0)
        assert np.allclose(pose_from_record(record), pose, atol=1e-12)
    identity = pose_from_record([1.0, 2.0, 3.0, 0.0, 0.0, 0.0, 1.0])
    assert np.allclose(identity, lie.make_pose(translation=[1, 2, 3]))


def test_trajectory_file(tmp_path):
    path = tmp_path / "poses.txt"
    poses = _poses(5)
    write_trajectory(path, poses, comment="estimated")
    lines = path.read_text().splitlines()
    assert lines[0] == "# estimated"
    assert lines[1] == "# timestamp tx ty tz qx qy qz qw"
    loaded = read_trajectory(path)
    assert [t for t, _ in loaded] == [t for t, _ in poses]
    for (_, pose), (_, expected) in zip(loaded, poses):
        assert np.allclose(pose, expected, atol=1e-12)


def test_trajectory_file_errors(tmp_path):
    path = tmp_path / "poses.txt"
    cases = {
        "0.0 0 0 0 0 0 0 1\n0.1 0 0 0 0 0 0.5 1\n": 2,
        "# comment\n\n0.0 0 0 0 0 0 0 1\n0.1 0 0\n": 4,
        "0.0 0 0 0 0 0 0 1\n0.0 0 0 0 0 0 0 1\n": 2,
        "0.0 0 0 x 0 0 0 1\n": 1,
        "0.0 0 0 nan 0 0 0 1\n": 1,
    }
    for content, line in cases.items():
        path.write_text(content)
        with pytest.raises(FileFormatError) as info:
            read_trajectory(path)
        assert f"poses.txt:{line}:" in str(info.value)


def test_control_points_file(tmp_path):
    path = tmp_path / "spline.txt"
    traj = random_trajectory(9, degree=3, rng=np.random.RandomState(1))
    traj.closed = True
    write_control_points(path, traj)
    loaded = read_control_points(path)
    assert loaded.degree == 3 and loaded.closed
    assert not read_control_points(path, closed=False).closed
    assert np.array_equal(loaded.knots, traj.knots)
    assert np.allclose(loaded.control_points, traj.control_points, atol=1e-12)
    start, end = loaded.valid_range()
    assert np.allclose(
        interpolate_pose(loaded, end), interpolate_pose(traj, end),
        atol=1e-12
    )

    # reading twice gives bit-identical splines
    again = read_control_points(path)
    assert np.array_equal(again.control_points, loaded.control_points)

    path.write_text("# degree: 4\n0.0 0 0 0 0 0 0 1\n0.1 0 0 0 0 0 0 1\n")
    with pytest.raises(ValidationError):
        read_control_points(path)
    path.write_text("# degree: four\n0.0 0 0 0 0 0 0 1\n")
    with pytest.raises(FileFormatError):
        read_control_points(path)


def _observations():
    camera = lie.exp_se3(np.array([0.1, 0.2, -2.0, 0.1, -0.2, 0.3]))
    return [
        Observation(
            point_id=j,
            timestamp=0.1 * k,
            p_c=np.array([0.1 * j, -0.2, 1.0 + k]),
            camera_pose=camera,
        ) for k in range(3) for j in range(4)
    ]


def test_observations_file(tmp_path):
    path = tmp_path / "observations.csv"
    observations = _observations()
    write_observations(path, observations)
    assert path.read_text().splitlines()[0] == HEADER
    loaded = read_observations(path)
    assert len(loaded) == len(observations)
    for obs, expected in zip(loaded, observations):
        assert obs.point_id == expected.point_id
        assert obs.timestamp == expected.timestamp
        assert np.array_equal(obs.p_c, expected.p_c)
        assert np.allclose(obs.camera_pose, expected.camera_pose)
    # one camera pose object per timestamp
    assert loaded[0].camera_pose is loaded[3].camera_pose


def test_observations_keep_every_bit(tmp_path):
    rng = np.random.RandomState(11)
    camera = lie.exp_se3(rng.randn(6))
    observations = [
        Observation(j, float(t), rng.randn(3) / 3.0, camera)
        for t in np.cumsum(rng.uniform(0.01, 0.1, size=5)) for j in range(6)
    ]
    path = tmp_path / "observations.csv"
    write_observations(path, observations)
    for obs, expected in zip(read_observations(path), observations):
        assert obs.timestamp == expected.timestamp
        assert np.array_equal(obs.p_c, expected.p_c)


def test_observation_file_errors(tmp_path):
    path = tmp_path / "observations.csv"
    good = "0.0,1,0.1,0.2,1.0,0,0,0,0,0,0,1"
    cases = {
        f"{HEADER}\n{good}\n0.1,2,0.1,0.2,1.0,0,0,0,0.3,0,0,1\n": 3,
        f"{HEADER}\n{good}\n{good}\n0.1,x,0.1,0.2,1.0,0,0,0,0,0,0,1\n": 4,
        f"{HEADER}\n0.0,1.5,0.1,0.2,1.0,0,0,0,0,0,0,1\n": 2,
        f"{HEADER}\n{good}\n0.0,2,0.1,0.2,1.0,1,0,0,0,0,0,1\n": 3,
        "timestamp,point_id\n0.0,1\n": 1,
        "": 1,
    }
    for content, line in cases.items():
        path.write_text(content)
        with pytest.raises(FileFormatError) as info:
            read_observations(path)
        assert f"observations.csv:{line}:" in str(info.value)
