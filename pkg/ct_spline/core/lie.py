"""
SE(3) and SO(3) primitives.

Poses are 4x4 homogeneous matrices, twists are 6-vectors ordered
``[v; w]`` (linear part first). Every 6x6 operator (``adjoint``,
``left_jacobian``, ``small_adjoint``) follows the same block order.
"""
from typing import Tuple  # isort:skip

import numpy as np

from ct_spline.core.typing import Matrix, Pose, Twist, Vector
from ct_spline.exceptions import BranchAmbiguityError

#: below this rotation angle (rad) coefficient functions use Taylor series
SMALL_ANGLE = 1e-6
#: the coupling block of the SE(3) left Jacobian cancels to fifth order,
#: its coefficients switch to series below this angle
SERIES_ANGLE = 1e-2
#: rotations closer than this to pi have no unique logarithm
PI_MARGIN = 1e-6


def skew(w: Vector) -> Matrix:
    """
    3x3 skew-symmetric matrix of a 3-vector, ``skew(a) @ b == a x b``.
    """
    return np.array(
        [
            [0.0, -w[2], w[1]],
            [w[2], 0.0, -w[0]],
            [-w[1], w[0], 0.0],
        ]
    )


def unskew(W: Matrix) -> Vector:
    return np.array([W[2, 1], W[0, 2], W[1, 0]])


def hat(tau: Twist) -> Matrix:
    """
    Maps a twist to its 4x4 se(3) matrix.

    Args:
        tau (np.ndarray): twist ``[v; w]``

    Returns:
        np.ndarray: ``[[skew(w), v], [0, 0]]``

    Examples:
        >>> hat(np.array([0, 0, 0, 0, 0, 1.0]))[:3, :3]
        array([[ 0., -1.,  0.],
               [ 1.,  0.,  0.],
               [ 0.,  0.,  0.]])
    """
    result = np.zeros((4, 4))
    result[:3, :3] = skew(tau[3:])
    result[:3, 3] = tau[:3]
    return result


def vee(M: Matrix) -> Twist:
    return np.concatenate([M[:3, 3], unskew(M[:3, :3])])


def make_pose(rotation: Matrix = None, translation: Vector = None) -> Pose:
    result = np.eye(4)
    if rotation is not None:
        result[:3, :3] = rotation
    if translation is not None:
        result[:3, 3] = translation
    return result


def invert_pose(T: Pose) -> Pose:
    result = np.eye(4)
    rotation_t = T[:3, :3].T
    result[:3, :3] = rotation_t
    result[:3, 3] = -rotation_t @ T[:3, 3]
    return result


def is_pose(T: Pose, tol: float = 1e-9) -> bool:
    """
    Checks shape, orthonormality and handedness of a homogeneous matrix.
    """
    T = np.asarray(T)
    if T.shape != (4, 4):
        return False
    rotation = T[:3, :3]
    orthonormal = np.linalg.norm(rotation.T @ rotation - np.eye(3)) < tol
    right_handed = abs(np.linalg.det(rotation) - 1.0) < tol
    last_row = np.allclose(T[3], [0.0, 0.0, 0.0, 1.0], atol=tol)
    return bool(orthonormal and right_handed and last_row)


def _rotation_coefficients(theta: float) -> Tuple[float, float, float]:
    # sin(t)/t, (1 - cos(t))/t^2, (t - sin(t))/t^3
    if theta < SMALL_ANGLE:
        theta2 = theta * theta
        theta4 = theta2 * theta2
        return (
            1.0 - theta2 / 6.0 + theta4 / 120.0,
            0.5 - theta2 / 24.0 + theta4 / 720.0,
            1.0 / 6.0 - theta2 / 120.0 + theta4 / 5040.0,
        )
    half_sin = np.sin(0.5 * theta)
    return (
        np.sin(theta) / theta,
        2.0 * half_sin * half_sin / (theta * theta),
        (theta - np.sin(theta)) / theta**3,
    )


def exp_so3(w: Vector) -> Matrix:
    theta = np.linalg.norm(w)
    a, b, _ = _rotation_coefficients(theta)
    W = skew(w)
    return np.eye(3) + a * W + b * (W @ W)


def log_so3(R: Matrix) -> Vector:
    """
    Principal logarithm of a rotation matrix.

    Raises:
        BranchAmbiguityError: if the rotation angle is within
            ``PI_MARGIN`` of pi
    """
    s = 0.5 * unskew(R - R.T)
    sin_theta = np.linalg.norm(s)
    cos_theta = 0.5 * (np.trace(R) - 1.0)
    theta = np.arctan2(sin_theta, cos_theta)
    if np.pi - theta < PI_MARGIN:
        raise BranchAmbiguityError(
            f"rotation angle {theta:.12f} rad is within {PI_MARGIN} of pi"
        )
    if theta < SMALL_ANGLE:
        theta2 = theta * theta
        factor = 1.0 + theta2 / 6.0 + 7.0 * theta2 * theta2 / 360.0
    else:
        factor = theta / sin_theta
    return factor * s


def so3_left_jacobian(w: Vector) -> Matrix:
    theta = np.linalg.norm(w)
    _, b, c = _rotation_coefficients(theta)
    W = skew(w)
    return np.eye(3) + b * W + c * (W @ W)


def so3_left_jacobian_inv(w: Vector) -> Matrix:
    theta = np.linalg.norm(w)
    if theta < SMALL_ANGLE:
        theta2 = theta * theta
        d = 1.0 / 12.0 + theta2 / 720.0 + theta2 * theta2 / 30240.0
    else:
        half = 0.5 * theta
        d = (1.0 - half / np.tan(half)) / (theta * theta)
    W = skew(w)
    return np.eye(3) - 0.5 * W + d * (W @ W)


def exp_se3(tau: Twist) -> Pose:
    """
    Exponential map se(3) -> SE(3).

    Args:
        tau (np.ndarray): twist ``[v; w]``

    Returns:
        np.ndarray: 4x4 pose with ``R = exp_so3(w)`` and
        ``t = so3_left_jacobian(w) @ v``
    """
    v, w = tau[:3], tau[3:]
    theta = np.linalg.norm(w)
    a, b, c = _rotation_coefficients(theta)
    W = skew(w)
    W2 = W @ W
    result = np.eye(4)
    result[:3, :3] = np.eye(3) + a * W + b * W2
    result[:3, 3] = (np.eye(3) + b * W + c * W2) @ v
    return result


def log_se3(T: Pose) -> Twist:
    """
    Logarithm map SE(3) -> se(3) on the principal branch.

    Raises:
        BranchAmbiguityError: if the rotation angle of ``T`` is ~pi
    """
    w = log_so3(T[:3, :3])
    v = so3_left_jacobian_inv(w) @ T[:3, 3]
    return np.concatenate([v, w])


def adjoint(T: Pose) -> Matrix:
    """
    Adjoint of a pose, ``Exp(adjoint(T) @ tau) @ T == T @ Exp(tau)``.
    """
    R = T[:3, :3]
    result = np.zeros((6, 6))
    result[:3, :3] = R
    result[:3, 3:] = skew(T[:3, 3]) @ R
    result[3:, 3:] = R
    return result


def small_adjoint(tau: Twist) -> Matrix:
    """
    Lie bracket operator, ``small_adjoint(a) @ b == vee([hat(a), hat(b)])``.
    """
    W = skew(tau[3:])
    result = np.zeros((6, 6))
    result[:3, :3] = W
    result[:3, 3:] = skew(tau[:3])
    result[3:, 3:] = W
    return result


def _coupling_block(tau: Twist) -> Matrix:
    v, w = tau[:3], tau[3:]
    theta = np.linalg.norm(w)
    if theta < SERIES_ANGLE:
        theta2 = theta * theta
        theta4 = theta2 * theta2
        c1 = 1.0 / 6.0 - theta2 / 120.0 + theta4 / 5040.0
        c2 = 1.0 / 24.0 - theta2 / 720.0 + theta4 / 40320.0
        c3 = 1.0 / 120.0 - theta2 / 2520.0 + theta4 / 120960.0
    else:
        sin_theta = np.sin(theta)
        half_sin = np.sin(0.5 * theta)
        c1 = (theta - sin_theta) / theta**3
        c2 = (theta * theta - 4.0 * half_sin * half_sin) / (2.0 * theta**4)
        c3 = (2.0 * theta - 3.0 * sin_theta + theta * np.cos(theta)) \
            / (2.0 * theta**5)

    V = skew(v)
    W = skew(w)
    WV = W @ V
    VW = V @ W
    WVW = WV @ W
    return (
        0.5 * V + c1 * (WV + VW + WVW) + c2 * (W @ WV + VW @ W - 3.0 * WVW) +
        c3 * (WVW @ W + W @ WVW)
    )


def left_jacobian(tau: Twist) -> Matrix:
    """
    SE(3) left Jacobian, ``Exp(tau + d) ~ Exp(left_jacobian(tau) @ d)
    @ Exp(tau)`` to first order in ``d``.
    """
    J = so3_left_jacobian(tau[3:])
    result = np.zeros((6, 6))
    result[:3, :3] = J
    result[:3, 3:] = _coupling_block(tau)
    result[3:, 3:] = J
    return result


def left_jacobian_inv(tau: Twist) -> Matrix:
    """
    Inverse of ``left_jacobian``; valid while the rotation angle is
    below 2 pi.
    """
    J_inv = so3_left_jacobian_inv(tau[3:])
    result = np.zeros((6, 6))
    result[:3, :3] = J_inv
    result[:3, 3:] = -J_inv @ _coupling_block(tau) @ J_inv
    result[3:, 3:] = J_inv
    return result


def _vectorize_top(M: Matrix) -> Vector:
    return M[:3, :].flatten(order="F")


def vectorize(T: Pose) -> Vector:
    """
    Stacks ``[R column 1; R column 2; R column 3; t]`` into a 12-vector.
    The last row of ``T`` is dropped.
    """
    return _vectorize_top(T)


def devectorize(vec: Vector) -> Pose:
    result = np.eye(4)
    result[:3, :] = np.reshape(vec, (3, 4), order="F")
    return result


_GENERATORS = np.stack(
    [_vectorize_top(hat(e)) for e in np.eye(6)], axis=1
)
# skew(e_i) for the three rotation generators
SKEW_BASIS = np.stack([skew(e) for e in np.eye(3)])


def generators() -> Matrix:
    """
    12x6 matrix whose column ``i`` is ``vectorize(hat(e_i))``.
    """
    return _GENERATORS.copy()


def body_velocity_from_derivative(T: Pose, T_dot: Matrix) -> Twist:
    """
    Body-frame twist ``vee(T^-1 @ T_dot)`` of a moving pose.
    """
    return vee(invert_pose(T) @ T_dot)


__all__ = [
    "SMALL_ANGLE",
    "SERIES_ANGLE",
    "PI_MARGIN",
    "SKEW_BASIS",
    "skew",
    "unskew",
    "hat",
    "vee",
    "make_pose",
    "invert_pose",
    "is_pose",
    "exp_so3",
    "log_so3",
    "so3_left_jacobian",
    "so3_left_jacobian_inv",
    "exp_se3",
    "log_se3",
    "adjoint",
    "small_adjoint",
    "left_jacobian",
    "left_jacobian_inv",
    "vectorize",
    "devectorize",
    "generators",
    "body_velocity_from_derivative",
]
