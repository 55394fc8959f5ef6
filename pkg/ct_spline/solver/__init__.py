# flake8: noqa
# isort:skip_file

from .huber import HuberLoss
from .problem import (
    BAMode, Frame, ObjectPoint, Observation, SolverConfig, group_frames
)
from .window import MIN_FRAMES, Window, advance_window, bootstrap
from .gauss_newton import (
    FitResult, SolveReport, StepResult, fit_stream, gauss_newton_step,
    residual, residual_rms, solve, total_cost
)
