# flake8: noqa
# isort:skip_file

from .timing import (
    ANALYTIC, NUMERIC, METHODS, MIN_REPEATS, REPORT_COLUMNS, WARMUP,
    BenchInputs, BenchReport, bench_error_chain, bench_pose_jacobian,
    check_error_chains, check_pose_jacobians, error_chain_fn, make_inputs,
    pose_jacobian_fn, reports_to_dataframe, speedups, time_call
)
