"""
Cumulative B-splines on SE(3).

Control point ``j`` is attached to knot ``t_j``. On the span
``[t_i, t_{i+1})`` the active control points are ``i-k+1 .. i`` and the
pose is ``T_{i-k+1} * prod_j Exp(B~_j(t) * Omega_j)`` with
``Omega_j = Log(T_{j-1}^-1 T_j)``.
"""
from typing import Dict, List, NamedTuple, Sequence, Tuple  # isort:skip
import threading

import numpy as np

from ct_spline.core.lie import (
    adjoint, exp_se3, invert_pose, log_se3, small_adjoint
)
from ct_spline.core.typing import Matrix, Pose, Twist, Vector
from ct_spline.exceptions import KnotError, OutOfRangeError


def _times_linear(coeffs: Vector, const: float, slope: float) -> Vector:
    # coeffs(u) * (const + slope * u), degree stays below len(coeffs)
    result = const * coeffs
    result[1:] += slope * coeffs[:-1]
    return result


def _cumulative_basis_matrix(local_knots: Vector, degree: int) -> Matrix:
    """
    de Boor-Cox recursion carried out on polynomials in ``u``.

    ``local_knots`` holds ``2 * degree`` knots around the span, which is
    ``[local_knots[degree - 1], local_knots[degree])``.
    """
    start = local_knots[degree - 1]
    width = local_knots[degree] - start

    n_bases = 2 * degree - 1
    coeffs = np.zeros((n_bases, degree))
    coeffs[degree - 1, 0] = 1.0
    for order in range(2, degree + 1):
        n_bases -= 1
        next_coeffs = np.zeros((n_bases, degree))
        for j in range(n_bases):
            left = local_knots[j + order - 1] - local_knots[j]
            right = local_knots[j + order] - local_knots[j + 1]
            next_coeffs[j] += _times_linear(
                coeffs[j], (start - local_knots[j]) / left, width / left
            )
            next_coeffs[j] += _times_linear(
                coeffs[j + 1],
                (local_knots[j + order] - start) / right,
                -width / right,
            )
        coeffs = next_coeffs

    # rows are powers of u, columns the bases of control points i-k+1..i
    standard = coeffs.T
    return np.cumsum(standard[:, ::-1], axis=1)[:, ::-1]


class KnotVector:
    """
    Strictly increasing knot timestamps of a degree-``k`` spline
    (``k`` is the order: 4 for cubic).

    Basis matrices are cached per span. A ``KnotVector`` never changes
    after construction, appending knots builds a new one.
    """
    def __init__(self, knots: Sequence[float], degree: int = 4):
        knots = np.array(knots, dtype=float).ravel()
        assert degree >= 2, f"degree must be at least 2, got {degree}"
        if len(knots) < 2:
            raise KnotError(f"need at least 2 knots, got {len(knots)}")
        if np.any(np.diff(knots) <= 0):
            bad = int(np.argmax(np.diff(knots) <= 0)) + 1
            raise KnotError(
                f"knots must be strictly increasing, "
                f"knot {bad} ({knots[bad]!r}) follows {knots[bad - 1]!r}"
            )
        knots.setflags(write=False)
        self.knots = knots
        self.degree = degree
        self._padded = self._pad(knots, degree)
        self._matrices: Dict[int, Matrix] = {}
        self._lock = threading.Lock()

    @staticmethod
    def _pad(knots: Vector, degree: int) -> Vector:
        # repeat the first interval (degree - 1) times and the last one
        # degree times, the extra tail knot closes the final knot's span
        pads = np.arange(1, degree + 1)
        head = knots[0] - (knots[1] - knots[0]) * pads[-2::-1]
        tail = knots[-1] + (knots[-1] - knots[-2]) * pads
        return np.concatenate([head, knots, tail])

    def __len__(self) -> int:
        return len(self.knots)

    def __repr__(self) -> str:
        return f"KnotVector(n={len(self)}, degree={self.degree})"

    def padded(self) -> Vector:
        """
        Knots extended by ``degree - 1`` uniform steps before the first
        knot and ``degree`` steps after the last one.
        Index ``i`` of ``knots`` is index ``i + degree - 1`` here.
        """
        return self._padded.copy()

    def extended(self, t: float) -> "KnotVector":
        return KnotVector(np.append(self.knots, t), self.degree)

    def span_width(self, span: int) -> float:
        offset = self.degree - 1
        return self._padded[span + offset + 1] - self._padded[span + offset]

    def basis_matrix(self, span: int, closed: bool = False) -> Matrix:
        """
        Cumulative basis matrix ``M~`` of a span, ``B~ = u^T M~`` with
        ``u = [1, u, u^2, ...]``.

        Args:
            span (int): span index
            closed (bool): also admit the span starting at the last knot,
                which holds only that knot

        Raises:
            KnotError: if the span lacks ``degree - 1`` preceding knots
                or lies past the last knot
        """
        last = len(self) - 1 if closed else len(self) - 2
        if span < self.degree - 1 or span > last:
            raise KnotError(
                f"span {span} needs knots {span - self.degree + 1}.."
                f"{span + 1}, available 0..{len(self) - 1}"
            )
        matrix = self._matrices.get(span)
        if matrix is None:
            # window of 2k knots t_{i-k+1} .. t_{i+k}, padded index of
            # t_{i-k+1} is i
            local = self._padded[span:span + 2 * self.degree]
            matrix = _cumulative_basis_matrix(local, self.degree)
            matrix.setflags(write=False)
            with self._lock:
                self._matrices[span] = matrix
        return matrix

    def greville_abscissae(self) -> Vector:
        """
        Time each control point represents: mean of ``t_{j+1}..t_{j+k-1}``.
        """
        offset = self.degree - 1
        windows = [
            self._padded[j + offset + 1:j + offset + self.degree]
            for j in range(len(self))
        ]
        return np.array([w.mean() for w in windows])


class BasisValues(NamedTuple):
    span: int
    u: float
    value: Vector
    first: Vector
    second: Vector


class SplineTrajectory:
    """
    SE(3) cumulative B-spline with one control point per knot.

    Relative increments ``Omega_j`` are cached and dropped whenever a
    neighbouring control point changes. Reads are safe from many
    threads; mutation needs exclusive access.

    Args:
        knots: knot timestamps or a ``KnotVector``
        control_points: sequence of 4x4 poses, one per knot
        degree (int): spline order, 4 for cubic
        closed (bool): admit evaluation at the final knot
    """
    def __init__(
        self,
        knots,
        control_points: Sequence[Pose],
        degree: int = 4,
        closed: bool = False,
    ):
        if not isinstance(knots, KnotVector):
            knots = KnotVector(knots, degree)
        control_points = np.array(control_points, dtype=float)
        assert control_points.ndim == 3 \
            and control_points.shape[1:] == (4, 4), \
            f"control points must be (n, 4, 4), got {control_points.shape}"
        if len(control_points) != len(knots):
            raise KnotError(
                f"got {len(control_points)} control points "
                f"for {len(knots)} knots"
            )
        self.knot_vector = knots
        self.closed = closed
        self._control_points = control_points
        self._omegas: Dict[int, Twist] = {}
        self._lock = threading.RLock()

    @property
    def degree(self) -> int:
        return self.knot_vector.degree

    @property
    def knots(self) -> Vector:
        return self.knot_vector.knots

    @property
    def control_points(self) -> np.ndarray:
        view = self._control_points.view()
        view.setflags(write=False)
        return view

    def __len__(self) -> int:
        return len(self._control_points)

    def __repr__(self) -> str:
        return (
            f"SplineTrajectory(n={len(self)}, degree={self.degree}, "
            f"closed={self.closed})"
        )

    def valid_range(self) -> Tuple[float, float]:
        """
        ``(start, end)`` of the evaluation domain ``[t_{k-1}, t_{n-1})``,
        closed at the end when ``self.closed``.
        """
        if len(self) < self.degree:
            raise KnotError(
                f"degree {self.degree} spline needs at least {self.degree} "
                f"knots, got {len(self)}"
            )
        return float(self.knots[self.degree - 1]), float(self.knots[-1])

    def omega(self, j: int) -> Twist:
        """
        ``Log(T_{j-1}^-1 T_j)`` for ``j >= 1``, cached.
        """
        value = self._omegas.get(j)
        if value is None:
            with self._lock:
                relative = invert_pose(self._control_points[j - 1]) \
                    @ self._control_points[j]
                value = log_se3(relative)
                self._omegas[j] = value
        return value

    def copy(self) -> "SplineTrajectory":
        result = SplineTrajectory(
            self.knot_vector,
            self._control_points.copy(),
            closed=self.closed,
        )
        result._omegas = dict(self._omegas)
        return result

    def set_control_point(self, index: int, pose: Pose) -> None:
        with self._lock:
            self._control_points[index] = pose
            self._omegas.pop(index, None)
            self._omegas.pop(index + 1, None)

    def update(self, index: int, xi: Twist) -> None:
        """
        Left update ``T_index <- Exp(xi) T_index``.
        """
        self.set_control_point(
            index,
            exp_se3(xi) @ self._control_points[index],
        )

    def perturbed(self, index: int, xi: Twist) -> "SplineTrajectory":
        """
        Copy with ``T_index <- Exp(xi) T_index``; shares the knot vector.
        """
        result = self.copy()
        result.update(index, xi)
        return result

    def append(self, t: float, pose: Pose) -> None:
        with self._lock:
            self.knot_vector = self.knot_vector.extended(t)
            self._control_points = np.concatenate(
                [self._control_points, pose[None]]
            )

    def drop_first(self, count: int) -> None:
        """
        Removes the ``count`` oldest knots and control points.
        """
        if count <= 0:
            return
        with self._lock:
            self.knot_vector = KnotVector(
                self.knot_vector.knots[count:], self.degree
            )
            self._control_points = self._control_points[count:].copy()
            self._omegas = {
                j - count: value
                for j, value in self._omegas.items() if j - count >= 1
            }


def cumulative_basis_matrix(kv: KnotVector, span: int) -> Matrix:
    """
    Cumulative basis matrix of span ``[t_span, t_{span+1})``.

    Args:
        kv (KnotVector): knots
        span (int): span index, from ``degree - 1`` to ``len(kv) - 2``
            (the last span borrows a uniformly extrapolated knot)

    Returns:
        np.ndarray: ``degree x degree`` matrix, first column ``[1, 0, ...]``

    Raises:
        KnotError: if the span lacks preceding knots

    Examples:
        >>> kv = KnotVector(np.arange(8.0))
        >>> cumulative_basis_matrix(kv, 3)[0]
        array([1.        , 0.83333333, 0.16666667, 0.        ])
    """
    return kv.basis_matrix(span)


def _locate(traj: SplineTrajectory, t: float,
            from_left: bool) -> Tuple[int, float]:
    start, end = traj.valid_range()
    if from_left:
        inside = start < t <= end
    else:
        inside = start <= t < end or (traj.closed and t == end)
    if not inside:
        raise OutOfRangeError(t, start, end, closed=traj.closed)

    if t == end:
        last = len(traj) - 2
        if last >= traj.degree - 1:
            # the final knot is the end of the last span
            return last, 1.0
        # degree knots hold no full span, only the final knot
        return last + 1, 0.0
    side = "left" if from_left else "right"
    span = int(np.searchsorted(traj.knots, t, side=side)) - 1
    u = (t - traj.knots[span]) / traj.knot_vector.span_width(span)
    return span, u


def evaluate_basis(
    traj: SplineTrajectory,
    t: float,
    from_left: bool = False,
) -> BasisValues:
    """
    Cumulative basis values and their first and second time derivatives.

    Args:
        traj (SplineTrajectory): spline
        t (float): timestamp inside ``traj.valid_range()``
        from_left (bool): evaluate the left limit, a knot then belongs
            to the span on its left

    Returns:
        BasisValues: span index, local coordinate and three
        ``degree``-vectors for control points ``span-k+1 .. span``

    Raises:
        OutOfRangeError: if ``t`` is outside the valid range
    """
    span, u = _locate(traj, t, from_left)
    degree = traj.degree
    matrix = traj.knot_vector.basis_matrix(span, closed=traj.closed)
    width = traj.knot_vector.span_width(span)

    powers = np.arange(degree)
    u_pow = np.zeros(degree + 2)
    u_pow[2:] = u**powers
    # rows: u^p, p u^(p-1), p (p-1) u^(p-2)
    u_rows = np.stack(
        [
            u_pow[2:],
            powers * u_pow[1:-1],
            powers * (powers - 1) * u_pow[:-2],
        ]
    )
    value, first, second = u_rows @ matrix
    return BasisValues(
        span=span,
        u=u,
        value=value,
        first=first / width,
        second=second / width**2,
    )


class SpanState(NamedTuple):
    """
    Quantities of one evaluation shared by poses, velocities and their
    Jacobians.

    ``omegas[0]`` and ``increments[0]`` are unused placeholders so that
    index ``j`` refers to local control point ``j``.
    """
    basis: BasisValues
    indices: np.ndarray
    controls: np.ndarray
    omegas: np.ndarray
    increments: np.ndarray


def span_state(
    traj: SplineTrajectory,
    t: float,
    from_left: bool = False,
) -> SpanState:
    basis = evaluate_basis(traj, t, from_left=from_left)
    degree = traj.degree
    first = basis.span - degree + 1
    indices = np.arange(first, basis.span + 1)

    omegas = np.zeros((degree, 6))
    increments = np.empty((degree, 4, 4))
    increments[0] = np.eye(4)
    for j in range(1, degree):
        omegas[j] = traj.omega(first + j)
        increments[j] = exp_se3(basis.value[j] * omegas[j])
    return SpanState(
        basis=basis,
        indices=indices,
        controls=traj.control_points[first:basis.span + 1],
        omegas=omegas,
        increments=increments,
    )


def _compose(state: SpanState) -> Pose:
    result = state.controls[0].copy()
    for increment in state.increments[1:]:
        result = result @ increment
    return result


def interpolate_pose(
    traj: SplineTrajectory,
    t: float,
    from_left: bool = False,
) -> Pose:
    """
    Pose of the spline at time ``t``.

    Raises:
        OutOfRangeError: if ``t`` is outside the valid range
        BranchAmbiguityError: if two adjacent control points differ by a
            rotation of ~pi
    """
    return _compose(span_state(traj, t, from_left=from_left))


def _velocity_recursion(state: SpanState,
                        with_acceleration: bool) -> Tuple[Twist, Twist]:
    velocity = np.zeros(6)
    acceleration = np.zeros(6)
    basis = state.basis
    for j in range(1, len(state.omegas)):
        omega = state.omegas[j]
        transport = adjoint(exp_se3(-basis.value[j] * omega))
        velocity = transport @ velocity + basis.first[j] * omega
        if with_acceleration:
            acceleration = transport @ acceleration \
                + basis.second[j] * omega \
                + basis.first[j] * (small_adjoint(velocity) @ omega)
    return velocity, acceleration


def body_velocity(
    traj: SplineTrajectory,
    t: float,
    from_left: bool = False,
) -> Twist:
    """
    Body-frame twist ``vee(T(t)^-1 dT/dt)`` computed by the recursion
    ``v_j = Ad(A_j^-1) v_{j-1} + dB~_j Omega_j``, ``v_0 = 0``.
    """
    state = span_state(traj, t, from_left=from_left)
    velocity, _ = _velocity_recursion(state, with_acceleration=False)
    return velocity


def body_acceleration(
    traj: SplineTrajectory,
    t: float,
    from_left: bool = False,
) -> Twist:
    """
    Time derivative of ``body_velocity``.
    """
    state = span_state(traj, t, from_left=from_left)
    _, acceleration = _velocity_recursion(state, with_acceleration=True)
    return acceleration


def greville_abscissae(kv: KnotVector) -> Vector:
    return kv.greville_abscissae()


def sample_times(traj: SplineTrajectory, rate: float) -> Vector:
    """
    Timestamps at ``rate`` Hz covering the half-open valid range.
    """
    assert rate > 0, f"rate must be positive, got {rate}"
    start, end = traj.valid_range()
    count = int(np.ceil((end - start) * rate - 1e-9))
    return start + np.arange(count) / rate


def interpolate_many(traj: SplineTrajectory,
                     times: Sequence[float]) -> List[Pose]:
    return [interpolate_pose(traj, t) for t in times]


__all__ = [
    "KnotVector",
    "BasisValues",
    "SplineTrajectory",
    "SpanState",
    "cumulative_basis_matrix",
    "evaluate_basis",
    "span_state",
    "interpolate_pose",
    "body_velocity",
    "body_acceleration",
    "greville_abscissae",
    "sample_times",
    "interpolate_many",
]
