import numpy as np
import pytest

from ct_spline.core import lie, spline
from ct_spline.exceptions import ValidationError
from ct_spline.synthetic import (
    circular_pose, circular_spline, CircularMotionSpec, CT, DT_COUPLED,
    DT_DECOUPLED, dt_velocities, dt_velocity_coupled, dt_velocity_decoupled,
    METHODS, MSE_COLUMNS, sample_instants, velocity_errors,
    velocity_mse_experiment
)
from ct_spline.synthetic.velocity import DEFAULT_THETAS

# ties between exact methods are decided at round-off level
TIE = 1e-18


def test_identical_poses_give_zero_twist():
    pose = lie.exp_se3(np.array([0.3, -0.2, 0.1, 0.4, 0.2, -0.1]))
    for estimator in [dt_velocity_coupled, dt_velocity_decoupled]:
        assert np.allclose(estimator(pose, pose, 0.1), 0.0)


def test_pure_translation():
    target = lie.make_pose(translation=[0.1, 0.0, 0.0])
    for estimator in [dt_velocity_coupled, dt_velocity_decoupled]:
        velocity = estimator(np.eye(4), target, 0.1)
        assert np.allclose(velocity, [1.0, 0.0, 0.0, 0.0, 0.0, 0.0])


def test_coupled_recovers_constant_twist():
    rng = np.random.RandomState(0)
    for _ in range(10):
        twist = rng.uniform(-1.0, 1.0, size=6)
        start = lie.exp_se3(rng.randn(6))
        end = start @ lie.exp_se3(0.1 * twist)
        assert np.allclose(
            dt_velocity_coupled(start, end, 0.1), twist, atol=1e-12
        )


def test_pure_rotation_agrees():
    start = lie.make_pose(translation=[1.0, 2.0, 3.0])
    end = start @ lie.make_pose(lie.exp_so3(np.array([0.1, -0.2, 0.05])))
    coupled = dt_velocity_coupled(start, end, 0.1)
    decoupled = dt_velocity_decoupled(start, end, 0.1)
    assert np.allclose(decoupled[:3], 0.0)
    assert np.allclose(coupled, decoupled, atol=1e-12)


def test_baselines_differ_on_curved_motion():
    spec = CircularMotionSpec(theta_transl=0.3, theta_rot=0.2)
    start, end = circular_pose(spec, 0.0), circular_pose(spec, 0.1)
    coupled = dt_velocity_coupled(start, end, 0.1)
    decoupled = dt_velocity_decoupled(start, end, 0.1)
    assert np.allclose(coupled[3:], decoupled[3:])
    assert np.linalg.norm(coupled[:3] - decoupled[:3]) > 1e-3


def test_sample_instants():
    assert np.allclose(sample_instants(1.0, 0.1, 1), [1.05])
    assert np.allclose(sample_instants(0.0, 1.0, 4), [0.125, 0.375, 0.625,
                                                      0.875])


def test_static_cell_is_exact():
    errors = velocity_errors(CircularMotionSpec(0.0, 0.0))
    assert set(errors) == set(METHODS)
    for value in errors.values():
        assert value.mse_v < 1e-24 and value.mse_w < 1e-24


def test_continuous_time_wins():
    for theta_transl in [0.0, 0.25, 0.5]:
        for theta_rot in [0.0, 0.25, 0.5]:
            spec = CircularMotionSpec(theta_transl, theta_rot)
            errors = velocity_errors(spec, samples_per_interval=5)
            for method in [DT_COUPLED, DT_DECOUPLED]:
                assert errors[CT].mse_v <= errors[method].mse_v + TIE
                assert errors[CT].mse_w <= errors[method].mse_w + TIE
            if theta_transl > 0 and theta_rot > 0:
                for method in [DT_COUPLED, DT_DECOUPLED]:
                    assert errors[CT].mse_v < errors[method].mse_v
                    assert errors[CT].mse_w < errors[method].mse_w


def test_discrete_errors_grow_with_turn_rate():
    previous = {DT_COUPLED: -1.0, DT_DECOUPLED: -1.0}
    for theta_transl in [0.1, 0.2, 0.3, 0.4, 0.5]:
        errors = velocity_errors(
            CircularMotionSpec(theta_transl, 0.3), samples_per_interval=3
        )
        for method in previous:
            assert errors[method].mse_w > previous[method]
            previous[method] = errors[method].mse_w


def test_discrete_velocity_jumps_at_frames():
    spec = CircularMotionSpec(theta_transl=0.3, theta_rot=0.3)
    poses = [circular_pose(spec, t) for t in spec.frame_times()]
    for method in [DT_COUPLED, DT_DECOUPLED]:
        velocities = dt_velocities(poses, spec.frame_dt, method)
        assert velocities.shape == (29, 6)
        jumps = np.linalg.norm(np.diff(velocities, axis=0), axis=1)
        assert jumps.min() > 1e-2

    traj = circular_spline(spec)
    start, end = traj.valid_range()
    for t in traj.knots[(traj.knots > start) & (traj.knots < end)]:
        left = spline.body_velocity(traj, t, from_left=True)
        right = spline.body_velocity(traj, t)
        assert np.abs(left - right).max() < 1e-8


def test_experiment_table():
    table = velocity_mse_experiment(
        theta_transl=[0.2, 0.0],
        theta_rot=[0.1, 0.3],
        n_frames=12,
        samples_per_interval=2,
        progress=False,
    )
    assert list(table.columns) == MSE_COLUMNS
    assert len(table) == 2 * 2 * 3
    assert table["theta_transl"].tolist()[:6] == [0.0] * 6
    assert table["method"].tolist()[:3] == sorted(METHODS)
    again = velocity_mse_experiment(
        theta_transl=[0.0, 0.2],
        theta_rot=[0.3, 0.1],
        n_frames=12,
        samples_per_interval=2,
        progress=False,
    )
    assert table.equals(again)
    with pytest.raises(ValidationError):
        velocity_mse_experiment(theta_transl=[], progress=False)


def test_default_grid_ordering():
    table = velocity_mse_experiment(progress=False)
    assert len(table) == len(DEFAULT_THETAS)**2 * len(METHODS)
    for (theta_transl, theta_rot), cell in table.groupby(
        ["theta_transl", "theta_rot"]
    ):
        errors = cell.set_index("method")
        for method in [DT_COUPLED, DT_DECOUPLED]:
            for column in ["mse_v", "mse_w"]:
                ct, dt = errors.loc[CT, column], errors.loc[method, column]
                assert ct <= dt + TIE
                if theta_transl > 0 and theta_rot > 0:
                    assert ct < dt
