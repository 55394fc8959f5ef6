# flake8: noqa
# isort:skip_file

from .motion import (
    CircularMotionSpec, circular_body_velocity, circular_pose,
    circular_spline, generate_circular, random_trajectory
)
from .scene import SimulatedScene, make_scene, simulate_observations
from .velocity import (
    CT, DT_COUPLED, DT_DECOUPLED, METHODS, MSE_COLUMNS, VelocityErrors,
    dt_velocities, dt_velocity_coupled, dt_velocity_decoupled,
    sample_instants, velocity_errors, velocity_mse_experiment
)
from .metrics import TrajectoryErrors, align_se3, ate, trajectory_errors
