"""
Analytic versus central-difference Jacobian timings.

Two workloads are measured, each in the vectorized and the Lie form:
the Jacobian of an interpolated pose w.r.t. its span's control points,
and the error Jacobians of ``N`` observations taken at one time, where
the pose Jacobian is chained with ``d e / d T`` per observation.
Numeric variants replace the pose Jacobian by central differences.
"""
from typing import Callable, Dict, List, NamedTuple, Sequence  # isort:skip
import logging

import numpy as np
import pandas as pd

from ct_spline.core.jacobians import (
    d_pose_log_d_control_points, d_pose_vec_d_control_points, error_fn,
    error_jacobians, FD_STEP, finite_difference_jacobian, FORMS, LIE,
    pose_log_fn, pose_vec_fn, VECTORIZED
)
from ct_spline.core.lie import exp_se3, invert_pose
from ct_spline.core.spline import interpolate_pose, SplineTrajectory
from ct_spline.exceptions import JacobianMismatchError
from ct_spline.synthetic.motion import random_trajectory
from ct_spline.utils.meters import AverageValueMeter
from ct_spline.utils.time_manager import TimeManager

logger = logging.getLogger(__name__)

ANALYTIC = "analytic"
NUMERIC = "numeric"
METHODS = (ANALYTIC, NUMERIC)

WARMUP = 10
MIN_REPEATS = 30
GATE_TOL = 1e-6
REPORT_COLUMNS = [
    "method", "form", "n_observations", "mean_seconds", "std_seconds"
]


class BenchReport(NamedTuple):
    """
    Attributes:
        method: ``analytic`` or ``numeric``
        form: ``vectorized`` or ``lie``
        n_observations: observations per evaluation, 0 for the pose
            Jacobian alone
        mean_time: median of the group means, seconds
        std_time: standard deviation over all repeats, seconds
        n_repeats: timed calls
    """
    method: str
    form: str
    n_observations: int
    mean_time: float
    std_time: float
    n_repeats: int


class BenchInputs(NamedTuple):
    trajectory: SplineTrajectory
    t: float
    points: np.ndarray
    camera_pose: np.ndarray


def make_inputs(
    n_observations: int = 1,
    degree: int = 4,
    seed: int = 42,
) -> BenchInputs:
    """
    Random spline, evaluation time inside its valid range, object points
    and camera pose; identical for identical arguments.
    """
    rng = np.random.RandomState(seed)
    traj = random_trajectory(degree + 4, degree, rng, max_increment=0.2)
    # rotations stay well below pi for the logarithm
    origin = invert_pose(traj.control_points[0])
    traj = SplineTrajectory(
        traj.knot_vector, [origin @ pose for pose in traj.control_points]
    )
    start, end = traj.valid_range()
    t = float(rng.uniform(start, end))
    points = rng.uniform(-0.5, 0.5, size=(max(n_observations, 1), 3))
    camera_pose = exp_se3(rng.randn(6) * 0.5)
    return BenchInputs(traj, t, points, camera_pose)


_POSE_FNS = {VECTORIZED: pose_vec_fn, LIE: pose_log_fn}


def pose_jacobian_fn(method: str, form: str) -> Callable:
    """
    ``fn(inputs) -> (k, rows, 6)`` computing the pose Jacobian blocks.
    """
    if method == ANALYTIC:
        analytic = d_pose_vec_d_control_points if form == VECTORIZED \
            else d_pose_log_d_control_points
        return lambda inputs: analytic(inputs.trajectory, inputs.t).blocks
    pose_fn = _POSE_FNS[form]
    return lambda inputs: finite_difference_jacobian(
        pose_fn, inputs.trajectory, inputs.t, FD_STEP
    ).blocks


def error_chain_fn(method: str, form: str) -> Callable:
    """
    ``fn(inputs) -> (N, k, 3, 6)``: every observation's error Jacobian
    w.r.t. the span's control points.
    """
    pose_blocks = pose_jacobian_fn(method, form)

    def fn(inputs: BenchInputs) -> np.ndarray:
        pose = interpolate_pose(inputs.trajectory, inputs.t)
        outer = error_jacobians(
            inputs.points, inputs.camera_pose, pose, form
        )
        return np.einsum("nab,kbc->nkac", outer, pose_blocks(inputs))

    return fn


def _reference_error_chain(inputs: BenchInputs) -> np.ndarray:
    # differences of the errors themselves, no chain rule involved
    fn = error_fn(inputs.points, inputs.camera_pose)
    blocks = finite_difference_jacobian(
        fn, inputs.trajectory, inputs.t, FD_STEP
    ).blocks
    n_points = len(inputs.points)
    return blocks.reshape(len(blocks), n_points, 3, 6).transpose(1, 0, 2, 3)


def _check_close(name: str, value: np.ndarray, reference: np.ndarray,
                 tol: float) -> None:
    difference = float(np.abs(value - reference).max())
    if not difference < tol:
        raise JacobianMismatchError(
            f"{name}: max difference {difference:.3e} exceeds {tol:.1e}"
        )


def check_pose_jacobians(inputs: BenchInputs, forms: Sequence[str],
                         tol: float = GATE_TOL) -> None:
    """
    Raises:
        JacobianMismatchError: if an analytic pose Jacobian disagrees with
            its numeric counterpart or is not reproducible
    """
    for form in forms:
        analytic = pose_jacobian_fn(ANALYTIC, form)(inputs)
        numeric = pose_jacobian_fn(NUMERIC, form)(inputs)
        _check_close(f"{form} pose Jacobian", analytic, numeric, tol)
        if not np.array_equal(analytic,
                              pose_jacobian_fn(ANALYTIC, form)(inputs)):
            raise JacobianMismatchError(
                f"{form} pose Jacobian differs between identical calls"
            )


def check_error_chains(inputs: BenchInputs, forms: Sequence[str],
                       tol: float = GATE_TOL) -> None:
    """
    Every method and form has to reproduce the central differences of
    the errors.

    Raises:
        JacobianMismatchError: on disagreement beyond ``tol``
    """
    reference = _reference_error_chain(inputs)
    for form in forms:
        for method in METHODS:
            value = error_chain_fn(method, form)(inputs)
            _check_close(f"{method} {form} error chain", value, reference,
                         tol)


def time_call(
    fn: Callable,
    args,
    repeats: int = MIN_REPEATS,
    warmup: int = WARMUP,
    groups: int = 5,
) -> Dict[str, float]:
    """
    Runs ``fn(args)`` ``warmup`` times untimed, then ``repeats`` timed
    calls split into ``groups`` consecutive groups.

    Returns:
        dict: ``mean`` (median of the group means) and ``std`` (over all
        calls), seconds
    """
    assert repeats >= MIN_REPEATS, \
        f"need at least {MIN_REPEATS} repeats, got {repeats}"
    for _ in range(warmup):
        fn(args)

    timer = TimeManager()
    meter = AverageValueMeter()
    samples = []
    for _ in range(repeats):
        timer.start("call")
        fn(args)
        elapsed = timer.stop("call")
        meter.add(elapsed)
        samples.append(elapsed)
    group_means = [
        float(np.mean(chunk))
        for chunk in np.array_split(np.array(samples), groups)
    ]
    _, std = meter.value()
    return {"mean": float(np.median(group_means)), "std": float(std)}


def bench_pose_jacobian(
    forms: Sequence[str] = FORMS,
    repeats: int = MIN_REPEATS,
    degree: int = 4,
    seed: int = 42,
) -> List[BenchReport]:
    """
    Times analytic and numeric pose Jacobians on identical inputs, after
    the correctness gate passed.

    Raises:
        JacobianMismatchError: if the gate fails
    """
    inputs = make_inputs(1, degree, seed)
    check_pose_jacobians(inputs, forms)
    reports = []
    for form in forms:
        for method in METHODS:
            timing = time_call(pose_jacobian_fn(method, form), inputs,
                               repeats)
            reports.append(
                BenchReport(method, form, 0, timing["mean"], timing["std"],
                            repeats)
            )
    _log_speedups(reports)
    return reports


def bench_error_chain(
    n_observations: Sequence[int] = (1, 10, 100),
    forms: Sequence[str] = FORMS,
    repeats: int = MIN_REPEATS,
    degree: int = 4,
    seed: int = 42,
) -> List[BenchReport]:
    """
    Times the error Jacobians of ``N`` observations for each ``N``.

    Raises:
        JacobianMismatchError: if the gate fails for any ``N``
    """
    reports = []
    for count in n_observations:
        assert count >= 1, f"n_observations must be >= 1, got {count}"
        inputs = make_inputs(count, degree, seed)
        check_error_chains(inputs, forms)
        for form in forms:
            for method in METHODS:
                timing = time_call(error_chain_fn(method, form), inputs,
                                   repeats)
                reports.append(
                    BenchReport(method, form, count, timing["mean"],
                                timing["std"], repeats)
                )
    _log_speedups(reports)
    return reports


def speedups(reports: Sequence[BenchReport]) -> Dict[tuple, float]:
    """
    ``numeric / analytic`` time per ``(form, n_observations)``.
    """
    times = {(r.method, r.form, r.n_observations): r.mean_time
             for r in reports}
    return {
        (form, count): times[(NUMERIC, form, count)] / time
        for (method, form, count), time in times.items()
        if method == ANALYTIC and (NUMERIC, form, count) in times
    }


def _log_speedups(reports: Sequence[BenchReport]) -> None:
    for (form, count), ratio in sorted(speedups(reports).items()):
        logger.info(
            f"{form} (N={count}): analytic is {ratio:.1f}x faster "
            f"than central differences"
        )


def reports_to_dataframe(reports: Sequence[BenchReport]) -> pd.DataFrame:
    rows = [
        [r.method, r.form, r.n_observations, r.mean_time, r.std_time]
        for r in reports
    ]
    return pd.DataFrame(rows, columns=REPORT_COLUMNS)


__all__ = [
    "ANALYTIC",
    "NUMERIC",
    "METHODS",
    "WARMUP",
    "MIN_REPEATS",
    "REPORT_COLUMNS",
    "BenchReport",
    "BenchInputs",
    "make_inputs",
    "pose_jacobian_fn",
    "error_chain_fn",
    "check_pose_jacobians",
    "check_error_chains",
    "time_call",
    "bench_pose_jacobian",
    "bench_error_chain",
    "speedups",
    "reports_to_dataframe",
]
