import numpy as np
import pytest

from ct_spline.core import lie
from ct_spline.exceptions import DegenerateCloudError, KnotError
from ct_spline.solver import (
    advance_window, BAMode, bootstrap, Frame, Observation
)


def _frame(t, world_points, camera_pose=None, first_id=0):
    camera_pose = np.eye(4) if camera_pose is None else camera_pose
    T_cw = lie.invert_pose(camera_pose)
    observations = [
        Observation(
            point_id=first_id + k,
            timestamp=t,
            p_c=T_cw[:3, :3] @ point + T_cw[:3, 3],
            camera_pose=camera_pose,
        ) for k, point in enumerate(world_points)
    ]
    return Frame.from_observations(observations)


def _box(extent=(4.0, 2.0, 1.0), center=(0.0, 0.0, 0.0)):
    corners = np.array(
        [[x, y, z] for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)],
        dtype=float,
    )
    return corners * np.array(extent) / 2.0 + np.array(center)


def test_bootstrap_box_orientation():
    window, points = bootstrap(_frame(0.0, _box()))
    pose = window.newest_pose
    rotation = pose[:3, :3]
    assert np.isclose(np.linalg.det(rotation), 1.0)
    # a signed permutation of the identity
    assert np.allclose(np.abs(rotation).sum(axis=0), 1.0)
    assert np.allclose(np.abs(rotation[:, 0]), [1.0, 0.0, 0.0])
    assert np.allclose(pose[:3, 3], 0.0)
    assert len(points) == 8


def test_bootstrap_translation_equivariance():
    camera_pose = lie.exp_se3(np.array([0.1, 0.2, 0.3, 0.2, -0.1, 0.4]))
    base, _ = bootstrap(_frame(0.0, _box(), camera_pose))
    shifted, points = bootstrap(
        _frame(0.0, _box(center=(1.0, -2.0, 0.5)), camera_pose)
    )
    assert np.allclose(base.newest_pose[:3, :3], shifted.newest_pose[:3, :3])
    assert np.allclose(shifted.newest_pose[:3, 3], [1.0, -2.0, 0.5])
    # object points are the cloud in the first control point's frame
    assert np.allclose(
        np.mean(list(points.values()), axis=0), 0.0, atol=1e-12
    )


def test_bootstrap_degenerate():
    with pytest.raises(DegenerateCloudError):
        bootstrap(_frame(0.0, _box()[:2]))
    line = np.outer(np.arange(5.0), [1.0, 2.0, 3.0])
    with pytest.raises(DegenerateCloudError):
        bootstrap(_frame(0.0, line))


def test_first_frames_do_not_trigger_optimization():
    window, _ = bootstrap(_frame(0.0, _box()))
    for k in range(1, 3):
        advance_window(window, _frame(0.1 * k, _box()))
        assert not window.ready
    advance_window(window, _frame(0.3, _box()))
    assert window.ready


def test_static_object_shares_centroid():
    center = np.array([0.5, 0.2, 2.0])
    window, _ = bootstrap(_frame(0.0, _box(center=center)))
    for k in range(1, 8):
        advance_window(window, _frame(0.1 * k, _box(center=center)))
    translations = window.trajectory.control_points[:, :3, 3]
    assert np.allclose(translations, center)


def test_window_size_bounds_active_knots():
    window, _ = bootstrap(_frame(0.0, _box()), window_size=6)
    for k in range(1, 20):
        advance_window(window, _frame(0.1 * k, _box()))
        assert window.n_knots <= 6
        assert all(
            frame.timestamp >= window.trajectory.knots[0]
            for frame in window.frames
        )
    full = window.full_trajectory()
    assert len(full) == 20
    assert np.allclose(full.knots, 0.1 * np.arange(20))


def test_non_monotonic_frame():
    window, _ = bootstrap(_frame(0.0, _box()))
    advance_window(window, _frame(0.1, _box()))
    with pytest.raises(KnotError):
        advance_window(window, _frame(0.1, _box()))
    with pytest.raises(KnotError):
        advance_window(window, _frame(0.05, _box()))


def test_gauge_flags():
    spline_ba, _ = bootstrap(_frame(0.0, _box()), BAMode.SPLINE_BA)
    local_ba, _ = bootstrap(_frame(0.0, _box()), BAMode.LOCAL_BA)
    for k in range(1, 6):
        advance_window(spline_ba, _frame(0.1 * k, _box()))
        advance_window(local_ba, _frame(0.1 * k, _box()))
    assert spline_ba.fixed_flags().tolist() == [1, 0, 0, 0, 1, 1]
    assert local_ba.fixed_flags().tolist() == [1, 1, 0, 0, 1, 1]


def test_local_ba_adds_and_counts_points():
    window, _ = bootstrap(_frame(0.0, _box()), BAMode.LOCAL_BA)
    for k in range(1, 5):
        advance_window(window, _frame(0.1 * k, _box()))
    # a point seen only in the newest frame
    extra = _frame(0.5, np.vstack([_box(), [[0.3, 0.3, 0.3]]]))
    advance_window(window, extra)
    assert 8 in window.object_points
    free = window.free_points()
    assert 8 not in free
    assert set(free) == set(range(8))
