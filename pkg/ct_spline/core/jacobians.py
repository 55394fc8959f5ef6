"""
Analytical Jacobians of spline poses, body velocities and point errors
with respect to left perturbations ``T_j <- Exp(xi_j) T_j`` of the
control points, plus the central-difference oracle they are checked
against.

Inside a span the pose is ``T = T_0 A_1 ... A_{k-1}`` with
``A_j = Exp(a_j)`` and ``a_j = B~_j Omega_j``. ``P_j = T_0 A_1 ... A_{j-1}``
and ``N_j = A_j ... A_{k-1}`` are the prefix and suffix around ``A_j``;
``P_0 = I`` and ``N_0 = T`` stand for the left perturbation of ``T_0``.
"""
from typing import Callable, List, NamedTuple, Tuple  # isort:skip

import numpy as np

from ct_spline.core.lie import (
    adjoint, exp_se3, invert_pose, left_jacobian, left_jacobian_inv,
    log_se3, SKEW_BASIS, skew, small_adjoint, vectorize
)
from ct_spline.core.spline import (
    body_velocity, interpolate_pose, span_state, SpanState,
    SplineTrajectory
)
from ct_spline.core.typing import Matrix, Pose, Vector

VECTORIZED = "vectorized"
LIE = "lie"
FORMS = (VECTORIZED, LIE)

#: default central-difference step in the tangent space
FD_STEP = 1e-6


class PoseJacobian(NamedTuple):
    """
    Jacobian blocks of one evaluation, one per active control point.

    Attributes:
        indices: global indices of the span's control points
        blocks: ``(k, rows, 6)``, ``blocks[j]`` is the derivative
            w.r.t. ``xi`` of control point ``indices[j]``
    """
    indices: np.ndarray
    blocks: np.ndarray

    def dense(self, n_control_points: int) -> Matrix:
        """
        Full ``rows x 6n`` Jacobian, zero outside the active span.
        """
        rows = self.blocks.shape[1]
        result = np.zeros((rows, 6 * n_control_points))
        for index, block in zip(self.indices, self.blocks):
            result[:, 6 * index:6 * index + 6] = block
        return result


def _omega_chain(state: SpanState, j: int) -> Matrix:
    # d Omega_j / d xi_j
    previous_inv = invert_pose(state.controls[j - 1])
    return left_jacobian_inv(state.omegas[j]) @ adjoint(previous_inv)


def _a_chains(state: SpanState) -> List[Matrix]:
    # d a_j / d xi_j, with d a_0 / d xi_0 = I
    chains = [np.eye(6)]
    for j in range(1, len(state.omegas)):
        chains.append(state.basis.value[j] * _omega_chain(state, j))
    return chains


def d_a_d_xi(
    traj: SplineTrajectory,
    t: float,
    j: int,
    wrt_previous: bool = False,
) -> Matrix:
    """
    Derivative of ``a_j = B~_j(t) Omega_j`` w.r.t. the perturbation of
    local control point ``j`` (or ``j - 1`` when ``wrt_previous``, which
    flips the sign).

    Args:
        traj (SplineTrajectory): spline
        t (float): evaluation time, fixes the span and ``B~_j``
        j (int): local index inside the span, ``0 .. k-1``
        wrt_previous (bool): differentiate w.r.t. ``xi_{j-1}``

    Returns:
        np.ndarray: 6x6 matrix, identity for ``j = 0``
    """
    assert 0 <= j < traj.degree, f"local index {j} outside the span"
    state = span_state(traj, t)
    if j == 0:
        assert not wrt_previous, "a_0 has no previous control point"
        return np.eye(6)
    chain = state.basis.value[j] * _omega_chain(state, j)
    return -chain if wrt_previous else chain


def _prefix_suffix(state: SpanState) -> Tuple[List[Pose], List[Pose]]:
    degree = len(state.omegas)
    prefix = [np.eye(4), state.controls[0]]
    for j in range(1, degree - 1):
        prefix.append(prefix[-1] @ state.increments[j])
    pose = prefix[-1] @ state.increments[degree - 1]

    suffix = [None] * degree
    running = np.eye(4)
    for j in range(degree - 1, 0, -1):
        running = state.increments[j] @ running
        suffix[j] = running
    suffix[0] = pose
    return prefix, suffix


def _vec_product(rotation: Matrix, suffix: Pose) -> Matrix:
    """
    12x6 derivative of ``vec(P Exp(e) N)`` at ``e = 0``; column ``i`` is
    ``vec(R_P E_i N)``, the Kronecker form is never built.
    """
    result = np.zeros((12, 6))
    result[9:, :3] = rotation
    rotated = (rotation @ SKEW_BASIS) @ suffix[:3, :]
    result[:, 3:] = rotated.transpose(0, 2, 1).reshape(3, 12).T
    return result


def _combine(factors: List[Matrix], chains: List[Matrix],
             indices: np.ndarray) -> PoseJacobian:
    # d/d xi_m = F_m C_m - F_{m+1} C_{m+1}
    degree = len(factors)
    blocks = []
    for m in range(degree):
        block = factors[m] @ chains[m]
        if m + 1 < degree:
            block = block - factors[m + 1] @ chains[m + 1]
        blocks.append(block)
    return PoseJacobian(indices=indices, blocks=np.array(blocks))


def _pose_vec_blocks(state: SpanState) -> PoseJacobian:
    prefix, suffix = _prefix_suffix(state)
    factors = [_vec_product(np.eye(3), suffix[0])]
    for j in range(1, len(state.omegas)):
        factors.append(
            _vec_product(prefix[j][:3, :3], suffix[j])
            @ left_jacobian(state.basis.value[j] * state.omegas[j])
        )
    return _combine(factors, _a_chains(state), state.indices)


def _pose_log_blocks(state: SpanState) -> Tuple[PoseJacobian, Pose]:
    prefix, suffix = _prefix_suffix(state)
    pose = suffix[0]
    outer = left_jacobian_inv(log_se3(pose))
    factors = [outer]
    for j in range(1, len(state.omegas)):
        factors.append(
            outer @ adjoint(prefix[j])
            @ left_jacobian(state.basis.value[j] * state.omegas[j])
        )
    return _combine(factors, _a_chains(state), state.indices), pose


def pose_jacobian(state: SpanState, form: str) -> Tuple[PoseJacobian, Pose]:
    """
    Pose Jacobian in either form from a precomputed span state, together
    with the interpolated pose.
    """
    if form == VECTORIZED:
        return _pose_vec_blocks(state), _prefix_suffix(state)[1][0]
    if form == LIE:
        return _pose_log_blocks(state)
    raise ValueError(f"unknown Jacobian form '{form}', expected {FORMS}")


def d_pose_vec_d_control_points(traj: SplineTrajectory,
                                t: float) -> PoseJacobian:
    """
    ``d vectorize(T(t)) / d xi_j`` for the ``k`` control points of the
    span containing ``t``: ``k`` blocks of 12x6.

    Examples:
        >>> jac = d_pose_vec_d_control_points(traj, traj.knots[5])
        >>> np.abs(jac.blocks[-1]).max()  # newest point has no influence
        0.0
    """
    return _pose_vec_blocks(span_state(traj, t))


def d_pose_log_d_control_points(traj: SplineTrajectory,
                                t: float) -> PoseJacobian:
    """
    ``d Log(T(t)) / d xi_j``: ``k`` blocks of 6x6.

    Raises:
        BranchAmbiguityError: if the rotation of ``T(t)`` is ~pi
    """
    return _pose_log_blocks(span_state(traj, t))[0]


def d_velocity_d_control_points(traj: SplineTrajectory,
                                t: float) -> PoseJacobian:
    """
    ``d body_velocity(t) / d xi_j``: ``k`` blocks of 6x6.

    The velocity recursion is differentiated w.r.t. each ``Omega_j``
    and accumulated backwards through the transports ``Ad(A_j^-1)``.
    """
    state = span_state(traj, t)
    degree = len(state.omegas)
    basis = state.basis

    velocity = np.zeros(6)
    transports = [None] * degree
    transported = [None] * degree
    for j in range(1, degree):
        transports[j] = adjoint(exp_se3(-basis.value[j] * state.omegas[j]))
        transported[j] = transports[j] @ velocity
        velocity = transported[j] + basis.first[j] * state.omegas[j]

    d_omega = [None] * degree
    accumulated = np.eye(6)
    for j in range(degree - 1, 0, -1):
        local = basis.first[j] * np.eye(6) + basis.value[j] * (
            small_adjoint(transported[j])
            @ left_jacobian(-basis.value[j] * state.omegas[j])
        )
        d_omega[j] = accumulated @ local
        accumulated = accumulated @ transports[j]

    blocks = []
    for m in range(degree):
        block = np.zeros((6, 6))
        if m >= 1:
            block += d_omega[m] @ _omega_chain(state, m)
        if m + 1 < degree:
            block -= d_omega[m + 1] @ _omega_chain(state, m + 1)
        blocks.append(block)
    return PoseJacobian(indices=state.indices, blocks=np.array(blocks))


def _homogeneous(points: np.ndarray) -> np.ndarray:
    return np.concatenate([points, np.ones((len(points), 1))], axis=1)


def error_jacobians(
    points: np.ndarray,
    T_wc: Pose,
    T_wo: Pose,
    form: str = VECTORIZED,
) -> np.ndarray:
    """
    Batched ``d e / d T_wo`` for ``e = p_c - T_wc^-1 T_wo p_o``.

    Args:
        points (np.ndarray): ``(N, 3)`` object points
        T_wc (np.ndarray): camera pose
        T_wo (np.ndarray): object pose
        form (str): ``"vectorized"`` (w.r.t. the 12-vector of ``T_wo``)
            or ``"lie"`` (w.r.t. ``Log(T_wo)``)

    Returns:
        np.ndarray: ``(N, 3, 12)`` or ``(N, 3, 6)``
    """
    points = np.atleast_2d(points)
    T_cw = invert_pose(T_wc)
    if form == VECTORIZED:
        # -p~^T (x) R_cw
        homogeneous = _homogeneous(points)
        # [n, row, i, col] = p~_i R_cw[row, col], columns grouped per p~_i
        kron = homogeneous[:, None, :, None] * T_cw[None, :3, None, :3]
        return -kron.reshape(-1, 3, 12)
    if form == LIE:
        tau = log_se3(T_wo)
        outer = left_jacobian(adjoint(T_cw) @ tau) @ adjoint(T_cw)
        predicted = _homogeneous(points) @ (T_cw @ T_wo)[:3].T
        lhs = np.zeros((len(points), 3, 6))
        lhs[:, :, :3] = np.eye(3)
        lhs[:, :, 3:] = -np.array([skew(q) for q in predicted])
        return -lhs @ outer
    raise ValueError(f"unknown Jacobian form '{form}', expected {FORMS}")


def d_error_d_pose(
    p_o: Vector,
    T_wc: Pose,
    T_wo: Pose,
    form: str = VECTORIZED,
) -> Matrix:
    """
    Derivative of the point error w.r.t. the object pose.

    The vectorized form is ``-p~_o^T (x) R_cw`` (3x12). The Lie form
    is ``-[I, -q^] J_l(Ad(T_cw) Log T_wo) Ad(T_cw)`` (3x6), where
    ``q = T_cw T_wo p_o`` is the predicted point in the camera frame.

    Examples:
        >>> jac = d_error_d_pose(np.zeros(3), np.eye(4), np.eye(4))
        >>> np.allclose(jac[:, 9:], -np.eye(3)), np.allclose(jac[:, :9], 0)
        (True, True)
    """
    return error_jacobians(np.asarray(p_o)[None], T_wc, T_wo, form)[0]


class ErrorJacobian(NamedTuple):
    indices: np.ndarray
    # (N, k, 3, 6)
    control_blocks: np.ndarray
    # (N, 3, 3)
    point_blocks: np.ndarray
    pose: Pose


def frame_error_jacobians(
    points: np.ndarray,
    T_wc: Pose,
    traj: SplineTrajectory,
    t: float,
    form: str = VECTORIZED,
) -> ErrorJacobian:
    """
    ``d e / d xi_j`` and ``d e / d p_o`` for every point observed at
    time ``t``; the pose Jacobian is computed once and chained per point.
    """
    state = span_state(traj, t)
    pose_jac, pose = pose_jacobian(state, form)
    outer = error_jacobians(points, T_wc, pose, form)
    control_blocks = np.einsum("nab,kbc->nkac", outer, pose_jac.blocks)
    point_block = -(T_wc[:3, :3].T @ pose[:3, :3])
    point_blocks = np.broadcast_to(point_block, (len(outer), 3, 3))
    return ErrorJacobian(
        indices=pose_jac.indices,
        control_blocks=control_blocks,
        point_blocks=point_blocks,
        pose=pose,
    )


def d_error_d_control_points(
    p_o: Vector,
    T_wc: Pose,
    traj: SplineTrajectory,
    t: float,
    form: str = VECTORIZED,
) -> Tuple[PoseJacobian, Matrix]:
    """
    Point error Jacobian w.r.t. the span's control points (3x6 blocks)
    and w.r.t. the object point (3x3).
    """
    jac = frame_error_jacobians(np.asarray(p_o)[None], T_wc, traj, t, form)
    return (
        PoseJacobian(indices=jac.indices, blocks=jac.control_blocks[0]),
        jac.point_blocks[0].copy(),
    )


def pose_vec_fn(traj: SplineTrajectory, t: float) -> Vector:
    return vectorize(interpolate_pose(traj, t))


def pose_log_fn(traj: SplineTrajectory, t: float) -> Vector:
    return log_se3(interpolate_pose(traj, t))


def velocity_fn(traj: SplineTrajectory, t: float) -> Vector:
    return body_velocity(traj, t)


def error_fn(points: np.ndarray, T_wc: Pose,
             measured: np.ndarray = None) -> Callable:
    """
    Builds ``fn(traj, t)`` returning the stacked errors of ``points``.
    """
    points = np.atleast_2d(points)
    if measured is None:
        measured = np.zeros_like(points)
    T_cw = invert_pose(T_wc)

    def fn(traj: SplineTrajectory, t: float) -> Vector:
        transform = T_cw @ interpolate_pose(traj, t)
        predicted = points @ transform[:3, :3].T + transform[:3, 3]
        return (measured - predicted).ravel()

    return fn


def finite_difference_jacobian(
    fn: Callable[[SplineTrajectory, float], Vector],
    traj: SplineTrajectory,
    t: float,
    step: float = FD_STEP,
) -> PoseJacobian:
    """
    Central differences of ``fn(traj, t)`` under left perturbations
    ``T_j <- Exp(+-step e_d) T_j`` of each control point in the span.

    Args:
        fn: function of a trajectory and a time returning a vector,
            e.g. ``pose_vec_fn``
        traj (SplineTrajectory): spline
        t (float): evaluation time
        step (float): perturbation size

    Returns:
        PoseJacobian: blocks of shape ``(len(fn(...)), 6)``
    """
    assert step > 0, f"step must be positive, got {step}"
    indices = span_state(traj, t).indices
    blocks = []
    for index in indices:
        columns = []
        for d in range(6):
            xi = np.zeros(6)
            xi[d] = step
            plus = fn(traj.perturbed(int(index), xi), t)
            minus = fn(traj.perturbed(int(index), -xi), t)
            columns.append((plus - minus) / (2.0 * step))
        blocks.append(np.stack(columns, axis=1))
    return PoseJacobian(indices=indices, blocks=np.array(blocks))


__all__ = [
    "VECTORIZED",
    "LIE",
    "FORMS",
    "FD_STEP",
    "PoseJacobian",
    "ErrorJacobian",
    "d_a_d_xi",
    "pose_jacobian",
    "d_pose_vec_d_control_points",
    "d_pose_log_d_control_points",
    "d_velocity_d_control_points",
    "error_jacobians",
    "d_error_d_pose",
    "frame_error_jacobians",
    "d_error_d_control_points",
    "pose_vec_fn",
    "pose_log_fn",
    "velocity_fn",
    "error_fn",
    "finite_difference_jacobian",
]
