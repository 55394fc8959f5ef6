"""
Robustified Gauss-Newton over the control points of a window and,
in LocalBA, its object points.

Each observation contributes ``e = p_c - T_wc^-1 T_wo(t) p_o`` with
information ``Sigma^-1`` and Huber weight ``rho'``:
``H += rho' J^T Sigma^-1 J`` and ``g += rho' J^T Sigma^-1 e``.
The step solves ``H dx = -g``; control points move by
``T_i <- Exp(xi_i) T_i`` and points by ``p_o <- p_o + dp``.
"""
from typing import (  # isort:skip
    Dict, List, NamedTuple, Optional, Sequence, Tuple
)
import logging

import numpy as np
from scipy.linalg import cho_factor, cho_solve, LinAlgError

from ct_spline.core.jacobians import frame_error_jacobians
from ct_spline.core.lie import invert_pose
from ct_spline.core.spline import interpolate_pose, SplineTrajectory
from ct_spline.core.typing import Vector
from ct_spline.exceptions import SingularSystemError, ValidationError
from ct_spline.solver.huber import HuberLoss
from ct_spline.solver.problem import BAMode, Frame, Observation, SolverConfig
from ct_spline.solver.window import (
    advance_window, bootstrap, MIN_FRAMES, Window
)

logger = logging.getLogger(__name__)

CONVERGED_STEP = "step"
CONVERGED_COST = "cost"
MAX_ITERATIONS = "max_iterations"
NO_DESCENT = "no_descent"
NOT_READY = "not_ready"
NOTHING_FREE = "nothing_free"


def residual(obs: Observation, p_o: Vector,
             traj: SplineTrajectory) -> Vector:
    """
    ``p_c - T_wc^-1 T_wo(t) p_o`` for a single observation.

    Raises:
        OutOfRangeError: if the timestamp is outside the valid range
    """
    transform = invert_pose(obs.camera_pose) \
        @ interpolate_pose(traj, obs.timestamp)
    predicted = transform[:3, :3] @ np.asarray(p_o) + transform[:3, 3]
    return np.asarray(obs.p_c, dtype=float) - predicted


class _Terms(NamedTuple):
    # per-observation quantities of one frame
    frame: Frame
    observations: List[Observation]
    errors: np.ndarray
    information: np.ndarray
    norms: np.ndarray


def _frame_terms(
    frame: Frame,
    traj: SplineTrajectory,
    points: Dict[int, Vector],
) -> Optional[_Terms]:
    observations = [
        obs for obs in frame.observations if obs.point_id in points
    ]
    if not observations:
        return None
    p_o = np.array([points[obs.point_id] for obs in observations])
    transform = invert_pose(frame.camera_pose) \
        @ interpolate_pose(traj, frame.timestamp)
    measured = np.array([obs.p_c for obs in observations], dtype=float)
    errors = measured - (p_o @ transform[:3, :3].T + transform[:3, 3])
    information = np.array([obs.information() for obs in observations])
    norms = np.sqrt(np.einsum("na,nab,nb->n", errors, information, errors))
    return _Terms(frame, observations, errors, information, norms)


def _iter_terms(window: Window, traj: SplineTrajectory,
                points: Dict[int, Vector]):
    for frame in window.active_frames():
        terms = _frame_terms(frame, traj, points)
        if terms is not None:
            yield terms


def _cost(window: Window, traj: SplineTrajectory, points: Dict[int, Vector],
          loss: HuberLoss) -> float:
    return float(
        sum(loss(terms.norms) for terms in _iter_terms(window, traj, points))
    )


def total_cost(window: Window, config: SolverConfig = None) -> float:
    """
    ``sum_i huber(sqrt(e_i^T Sigma_i^-1 e_i))`` over the active frames,
    i.e. ``1/2 sum rho(e^T Sigma^-1 e)``.
    """
    config = config or SolverConfig()
    return _cost(
        window, window.trajectory, window.object_points,
        HuberLoss(config.huber_delta)
    )


def residual_rms(window: Window) -> float:
    """
    Root mean square of the residual norms over the active frames.
    """
    squared = [
        terms.errors**2
        for terms in _iter_terms(
            window, window.trajectory, window.object_points
        )
    ]
    if not squared:
        return 0.0
    return float(np.sqrt(np.concatenate(squared).sum(axis=1).mean()))


class _Layout:
    """
    Column offsets of the free variables in the normal equations:
    6 per free control point, then 3 per free object point.
    """
    def __init__(self, control_points: Sequence[int],
                 point_ids: Sequence[int]):
        self.control = {int(index): 6 * k
                        for k, index in enumerate(control_points)}
        offset = 6 * len(self.control)
        self.points = {point_id: offset + 3 * k
                       for k, point_id in enumerate(point_ids)}
        self.size = offset + 3 * len(self.points)

    def __bool__(self) -> bool:
        return self.size > 0


def _normal_equations(
    window: Window,
    layout: _Layout,
    loss: HuberLoss,
    form: str,
) -> Tuple[np.ndarray, np.ndarray, float]:
    H = np.zeros((layout.size, layout.size))
    g = np.zeros(layout.size)
    cost = 0.0
    traj = window.trajectory
    for terms in _iter_terms(window, traj, window.object_points):
        cost += loss(terms.norms)
        weights = loss.weight(terms.norms)
        p_o = np.array(
            [window.object_points[obs.point_id] for obs in terms.observations]
        )
        jac = frame_error_jacobians(
            p_o, terms.frame.camera_pose, traj, terms.frame.timestamp, form
        )
        columns = [
            (layout.control[int(index)], j)
            for j, index in enumerate(jac.indices)
            if int(index) in layout.control
        ]
        for n, obs in enumerate(terms.observations):
            blocks = [
                (offset, jac.control_blocks[n, j])
                for offset, j in columns
            ]
            if obs.point_id in layout.points:
                blocks.append(
                    (layout.points[obs.point_id], jac.point_blocks[n])
                )
            weighted = weights[n] * terms.information[n]
            rhs = weighted @ terms.errors[n]
            for offset_a, block_a in blocks:
                cols_a = slice(offset_a, offset_a + block_a.shape[1])
                g[cols_a] += block_a.T @ rhs
                left = block_a.T @ weighted
                for offset_b, block_b in blocks:
                    cols_b = slice(offset_b, offset_b + block_b.shape[1])
                    H[cols_a, cols_b] += left @ block_b
    return H, g, cost


def _solve_damped(H: np.ndarray, g: np.ndarray, damping: float) -> Vector:
    system = H + damping * np.eye(len(H)) if damping > 0 else H
    factor = cho_factor(system, lower=True, check_finite=True)
    return cho_solve(factor, -g)


def _apply_step(
    window: Window,
    layout: _Layout,
    step: Vector,
) -> Tuple[SplineTrajectory, Dict[int, Vector]]:
    traj = window.trajectory.copy()
    for index, offset in layout.control.items():
        traj.update(index, step[offset:offset + 6])
    points = dict(window.object_points)
    for point_id, offset in layout.points.items():
        points[point_id] = points[point_id] + step[offset:offset + 3]
    return traj, points


class StepResult(NamedTuple):
    """
    Outcome of one Gauss-Newton iteration.

    Attributes:
        window: the window, updated in place when the step was accepted
        step_norm: infinity-norm of the accepted step, 0 if none
        cost: cost after the iteration
        previous_cost: cost before the iteration
        damping: Levenberg damping to start the next iteration with
        accepted: whether any trial step decreased the cost
    """
    window: Window
    step_norm: float
    cost: float
    previous_cost: float
    damping: float
    accepted: bool


def _layout(window: Window) -> _Layout:
    return _Layout(window.free_control_points(), window.free_points())


def gauss_newton_step(
    window: Window,
    config: SolverConfig = None,
    damping: float = 0.0,
) -> StepResult:
    """
    One robustified Gauss-Newton iteration.

    The undamped step (or the one damped by ``damping`` if positive) is
    tried first. A step that raises the cost, or a normal matrix that
    cannot be factorized, is retried with Levenberg damping ``H + l I``,
    ``l`` starting at ``config.damping_init`` and growing tenfold per
    rejection; an accepted damped step divides it by ten.

    Args:
        window (Window): ready window, modified in place
        config (SolverConfig): settings
        damping (float): damping carried over from the last iteration

    Returns:
        StepResult: step norm, new cost and damping state

    Raises:
        ValidationError: if the window is not ready or nothing is free
        SingularSystemError: if even the most damped system cannot be
            factorized
    """
    config = config or SolverConfig()
    if not window.ready:
        raise ValidationError(
            f"window needs {MIN_FRAMES} frames, "
            f"got {len(window.frames)}"
        )
    layout = _layout(window)
    if not layout:
        raise ValidationError("window has no free variables")

    loss = HuberLoss(config.huber_delta)
    H, g, cost = _normal_equations(
        window, layout, loss, config.jacobian_form
    )

    if damping > 0:
        attempts = range(config.max_damping_attempts)
        trials = [damping * 10.0**i for i in attempts]
    else:
        trials = [0.0] + [
            config.damping_init * 10.0**i
            for i in range(config.max_damping_attempts)
        ]

    factorized = False
    for trial in trials:
        try:
            step = _solve_damped(H, g, trial)
        except (LinAlgError, ValueError):
            logger.debug(f"factorization failed with damping {trial:.1e}")
            continue
        factorized = True
        step_norm = float(np.abs(step).max())
        if step_norm < config.step_tolerance:
            # converged
            return StepResult(window, step_norm, cost, cost, trial, True)

        traj, points = _apply_step(window, layout, step)
        new_cost = _cost(window, traj, points, loss)
        logger.debug(
            f"trial damping {trial:.1e}: cost {cost:.6e} -> {new_cost:.6e}"
        )
        if new_cost <= cost:
            window.trajectory = traj
            window.object_points = points
            relaxed = trial / 10.0
            return StepResult(
                window=window,
                step_norm=step_norm,
                cost=new_cost,
                previous_cost=cost,
                damping=relaxed if relaxed >= config.damping_init else 0.0,
                accepted=True,
            )

    if not factorized:
        raise SingularSystemError(
            "normal equations are not positive definite",
            condition_number=float(np.linalg.cond(H)),
        )
    return StepResult(
        window=window,
        step_norm=0.0,
        cost=cost,
        previous_cost=cost,
        damping=trials[-1] * 10.0,
        accepted=False,
    )


class SolveReport(NamedTuple):
    iterations: int
    initial_cost: float
    final_cost: float
    rms: float
    reason: str


def solve(window: Window, config: SolverConfig = None) -> SolveReport:
    """
    Iterates ``gauss_newton_step`` until the step or the relative cost
    decrease falls below tolerance, no descent is found, or
    ``config.max_iterations`` is reached.
    """
    config = config or SolverConfig()
    if not window.ready:
        return SolveReport(0, 0.0, 0.0, 0.0, NOT_READY)
    if not _layout(window):
        cost = total_cost(window, config)
        return SolveReport(0, cost, cost, residual_rms(window), NOTHING_FREE)

    initial_cost = total_cost(window, config)
    cost = initial_cost
    damping = 0.0
    reason = MAX_ITERATIONS
    iterations = 0
    for iterations in range(1, config.max_iterations + 1):
        result = gauss_newton_step(window, config, damping)
        damping = result.damping
        logger.debug(
            f"iteration {iterations}: cost {result.cost:.6e}, "
            f"step {result.step_norm:.3e}, damping {damping:.1e}"
        )
        if not result.accepted:
            reason = NO_DESCENT
            break
        decrease = (cost - result.cost) / max(cost, np.finfo(float).tiny)
        cost = result.cost
        if result.step_norm < config.step_tolerance:
            reason = CONVERGED_STEP
            break
        if decrease < config.cost_tolerance:
            reason = CONVERGED_COST
            break

    report = SolveReport(
        iterations=iterations,
        initial_cost=initial_cost,
        final_cost=cost,
        rms=residual_rms(window),
        reason=reason,
    )
    logger.info(
        f"window [{window.trajectory.knots[0]:.3f}, "
        f"{window.trajectory.knots[-1]:.3f}]: cost "
        f"{report.initial_cost:.3e} -> {report.final_cost:.3e} in "
        f"{report.iterations} iteration(s) ({report.reason})"
    )
    return report


class FitResult(NamedTuple):
    trajectory: SplineTrajectory
    object_points: Dict[int, Vector]
    reports: List[SolveReport]


def fit_stream(
    frames: Sequence[Frame],
    config: SolverConfig = None,
    mode: BAMode = BAMode.SPLINE_BA,
    window_size: int = 10,
    degree: int = 4,
) -> FitResult:
    """
    Streaming estimation: bootstrap on the first frame, then one knot per
    frame, solving the window whenever it holds enough frames.

    Args:
        frames: frames in increasing time order
        config (SolverConfig): solver settings
        mode (BAMode): SplineBA keeps the bootstrapped model fixed,
            LocalBA refines it
        window_size (int): active knots per window
        degree (int): spline order

    Returns:
        FitResult: archived plus active control points as one spline,
        the object points and one report per solve
    """
    config = (config or SolverConfig()).check()
    frames = list(frames)
    if len(frames) < MIN_FRAMES:
        raise ValidationError(
            f"need at least {MIN_FRAMES} frames, got {len(frames)}"
        )

    window, _ = bootstrap(frames[0], mode, window_size, degree)
    reports = []
    for frame in frames[1:]:
        advance_window(window, frame)
        if window.ready:
            reports.append(solve(window, config))
    return FitResult(
        trajectory=window.full_trajectory(),
        object_points=dict(window.object_points),
        reports=reports,
    )


__all__ = [
    "residual",
    "total_cost",
    "residual_rms",
    "StepResult",
    "gauss_newton_step",
    "SolveReport",
    "solve",
    "FitResult",
    "fit_stream",
]
