import numpy as np
import pytest

from ct_spline.core import lie
from ct_spline.exceptions import BranchAmbiguityError


def _random_twist(rng, max_angle=2.5):
    w = rng.randn(3)
    w *= rng.uniform(0.0, max_angle) / np.linalg.norm(w)
    return np.concatenate([rng.randn(3), w])


def test_exp_log_roundtrip():
    rng = np.random.RandomState(42)
    for _ in range(1000):
        tau = _random_twist(rng)
        T = lie.exp_se3(tau)
        assert lie.is_pose(T)
        assert np.allclose(lie.log_se3(T), tau, atol=1e-10)


def test_small_angles_are_continuous():
    v = np.array([0.3, -0.2, 1.0])
    axis = np.array([1.0, 2.0, -1.0]) / np.sqrt(6.0)
    scales = [0.0, 1e-12, 0.5e-6, 0.99e-6, 1.01e-6, 1e-3, 0.99e-2, 1.01e-2]
    for scale in scales:
        tau = np.concatenate([v, scale * axis])
        T = lie.exp_se3(tau)
        assert np.allclose(lie.log_se3(T), tau, atol=1e-14)


def test_log_near_pi_raises():
    R = lie.exp_so3(np.array([0.0, 0.0, np.pi]))
    with pytest.raises(BranchAmbiguityError):
        lie.log_so3(R)
    # just below the margin still has a logarithm
    w = lie.log_so3(lie.exp_so3(np.array([0.0, 0.0, np.pi - 1e-3])))
    assert np.allclose(w, [0.0, 0.0, np.pi - 1e-3])


def test_adjoint_moves_twist_across_pose():
    rng = np.random.RandomState(1)
    T = lie.exp_se3(_random_twist(rng))
    tau = _random_twist(rng, max_angle=1.0)
    lhs = lie.exp_se3(lie.adjoint(T) @ tau) @ T
    rhs = T @ lie.exp_se3(tau)
    assert np.allclose(lhs, rhs)


def test_small_adjoint_is_bracket():
    rng = np.random.RandomState(2)
    a, b = rng.randn(6), rng.randn(6)
    A, B = lie.hat(a), lie.hat(b)
    assert np.allclose(lie.small_adjoint(a) @ b, lie.vee(A @ B - B @ A))


def test_left_jacobian_first_order():
    rng = np.random.RandomState(3)
    eps = 1e-7
    for max_angle in [1e-8, 5e-3, 2e-2, 2.0]:
        tau = _random_twist(rng, max_angle=max_angle)
        J = lie.left_jacobian(tau)
        for d in np.eye(6):
            lhs = lie.exp_se3(tau + eps * d)
            rhs = lie.exp_se3(eps * (J @ d)) @ lie.exp_se3(tau)
            assert np.abs(lhs - rhs).max() < 1e-12


def test_left_jacobian_inverse():
    rng = np.random.RandomState(4)
    for _ in range(20):
        tau = _random_twist(rng)
        product = lie.left_jacobian_inv(tau) @ lie.left_jacobian(tau)
        assert np.allclose(product, np.eye(6), atol=1e-10)


def test_coupling_block_across_series_threshold():
    v = np.array([0.4, -1.0, 0.7])
    axis = np.array([0.0, 0.6, 0.8])

    def jacobian(angle):
        return lie.left_jacobian(np.concatenate([v, angle * axis]))

    step, h = 2e-9, 1e-6
    below, above = jacobian(1e-2 - 0.5 * step), jacobian(1e-2 + 0.5 * step)
    # the change across the threshold follows the smooth slope
    slope = (jacobian(1e-2 + 3 * h) - jacobian(1e-2 + h)) / (2 * h)
    assert np.abs(slope).max() > 0.1
    assert np.abs(above - below - step * slope).max() < 1e-12


def test_generators():
    G = lie.generators()
    assert G.shape == (12, 6)
    assert np.count_nonzero(G) == 9
    for i, e in enumerate(np.eye(6)):
        assert np.allclose(G[:, i], lie.vectorize(lie.hat(e)))
    # translation generators fill the last three entries
    assert np.allclose(G[9:, :3], np.eye(3))


def test_vectorize_layout():
    rng = np.random.RandomState(5)
    T = lie.exp_se3(_random_twist(rng))
    vec = lie.vectorize(T)
    assert np.allclose(vec[:3], T[:3, 0])
    assert np.allclose(vec[9:], T[:3, 3])
    assert np.allclose(lie.devectorize(vec), T)


def test_invert_pose_and_is_pose():
    rng = np.random.RandomState(6)
    T = lie.exp_se3(_random_twist(rng))
    assert np.allclose(lie.invert_pose(T) @ T, np.eye(4))
    assert not lie.is_pose(np.diag([1.0, 1.0, -1.0, 1.0]))
    assert not lie.is_pose(np.eye(3))


def test_body_velocity_from_derivative():
    tau = np.array([1.0, 0.0, 0.0, 0.0, 0.0, 0.5])
    t, eps = 0.7, 1e-6
    T = lie.exp_se3(t * tau)
    T_dot = (lie.exp_se3((t + eps) * tau) - lie.exp_se3((t - eps) * tau)) \
        / (2 * eps)
    assert np.allclose(lie.body_velocity_from_derivative(T, T_dot), tau)
