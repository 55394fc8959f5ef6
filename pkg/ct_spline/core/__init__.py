# flake8: noqa
# isort:skip_file

from .lie import (
    adjoint, body_velocity_from_derivative, devectorize, exp_se3, exp_so3,
    generators, hat, invert_pose, is_pose, left_jacobian, left_jacobian_inv,
    log_se3, log_so3, make_pose, skew, small_adjoint, so3_left_jacobian,
    so3_left_jacobian_inv, unskew, vectorize, vee
)
from .spline import (
    BasisValues, KnotVector, SpanState, SplineTrajectory, body_acceleration,
    body_velocity, cumulative_basis_matrix, evaluate_basis,
    greville_abscissae, interpolate_many, interpolate_pose, sample_times,
    span_state
)
from .jacobians import (
    ErrorJacobian, FORMS, LIE, PoseJacobian, VECTORIZED, d_a_d_xi,
    d_error_d_control_points, d_error_d_pose, d_pose_log_d_control_points,
    d_pose_vec_d_control_points, d_velocity_d_control_points, error_fn,
    error_jacobians, finite_difference_jacobian, frame_error_jacobians,
    pose_jacobian, pose_log_fn, pose_vec_fn, velocity_fn
)
