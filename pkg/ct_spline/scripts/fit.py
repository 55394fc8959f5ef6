#!/usr/bin/env python
# usage:
# ct-spline fit observations.csv --mode local-ba --output ./fit

from argparse import ArgumentParser
import logging

import pandas as pd

from ct_spline import utils
from ct_spline.core.spline import interpolate_pose, SplineTrajectory
from ct_spline.exceptions import ValidationError
from ct_spline.scripts.misc import add_common_args, prepare_run
from ct_spline.solver import BAMode, fit_stream, group_frames, SolverConfig

logger = logging.getLogger(__name__)

MODES = {"spline-ba": BAMode.SPLINE_BA, "local-ba": BAMode.LOCAL_BA}

CONTROL_POINTS_FILE = "control_points.txt"
TRAJECTORY_FILE = "trajectory.txt"
REPORT_FILE = "fit_report.json"
OBJECT_POINTS_FILE = "object_points.csv"


def build_args(parser: ArgumentParser):
    """Constructs the command-line arguments for ``ct-spline fit``"""
    parser.add_argument("observations", type=str, help="observations CSV")
    parser.add_argument(
        "--mode",
        type=str,
        choices=sorted(MODES),
        default=None,
        help="spline-ba keeps the object model fixed (default), "
        "local-ba refines it",
    )
    parser.add_argument(
        "--window-size",
        type=int,
        default=None,
        help="active knots per window, 10 if unset",
    )
    parser.add_argument(
        "--at",
        type=float,
        nargs="+",
        default=None,
        help="timestamps of the exported poses, the frame times if unset",
    )
    add_common_args(parser)
    return parser


def parse_args():
    parser = utils.ArgumentParser()
    build_args(parser)
    args, unknown_args = parser.parse_known_args()
    return args, unknown_args


def main(args, unknown_args):
    """Run the ``ct-spline fit`` script"""
    args, config = prepare_run(
        args, unknown_args, {"mode": "spline-ba", "window_size": 10}
    )
    if args.mode not in MODES:
        raise ValidationError(
            f"mode must be one of {sorted(MODES)}, got {args.mode!r}"
        )
    if args.window_size < args.degree:
        raise ValidationError(
            f"--window-size {args.window_size} is smaller than "
            f"--degree {args.degree}"
        )
    solver_config = SolverConfig.from_dict(config.get("solver"))

    observations = utils.read_observations(args.observations)
    frames = group_frames(observations)
    logger.info(
        f"fitting {len(frames)} frames ({len(observations)} observations) "
        f"in {args.mode} mode"
    )
    result = fit_stream(
        frames,
        solver_config,
        MODES[args.mode],
        window_size=args.window_size,
        degree=args.degree,
    )

    # the closed end only serves the solver, exported splines are half-open
    exported = SplineTrajectory(
        result.trajectory.knot_vector,
        result.trajectory.control_points,
        closed=False,
    )
    # poses come from the written file so that re-loading reproduces them
    control_points_path = args.output / CONTROL_POINTS_FILE
    utils.write_control_points(control_points_path, exported)
    trajectory = utils.read_control_points(control_points_path, closed=False)

    if args.at is not None:
        times = args.at
    else:
        # the first degree - 1 frames precede the valid range, the last
        # one sits on its open end
        start, end = trajectory.valid_range()
        times = [
            frame.timestamp for frame in frames
            if start <= frame.timestamp < end
        ]
    poses = [(float(t), interpolate_pose(trajectory, t)) for t in times]
    utils.write_trajectory(
        args.output / TRAJECTORY_FILE, poses, comment="ct-spline fit"
    )

    if MODES[args.mode] == BAMode.LOCAL_BA:
        points = pd.DataFrame(
            [[k, *p] for k, p in sorted(result.object_points.items())],
            columns=["point_id", "x", "y", "z"],
        )
        utils.write_table(args.output / OBJECT_POINTS_FILE, points)

    last = result.reports[-1]
    report = {
        "mode": args.mode,
        "degree": int(args.degree),
        "window_size": int(args.window_size),
        "n_frames": len(frames),
        "n_observations": len(observations),
        "n_control_points": len(trajectory),
        "iterations": int(sum(r.iterations for r in result.reports)),
        "final_cost": float(last.final_cost),
        "rms": float(last.rms),
        "max_rms": float(max(r.rms for r in result.reports)),
        "solver": solver_config._asdict(),
        "windows": [
            {
                "iterations": int(r.iterations),
                "initial_cost": float(r.initial_cost),
                "final_cost": float(r.final_cost),
                "rms": float(r.rms),
                "reason": r.reason,
            } for r in result.reports
        ],
    }
    utils.save_config(report, args.output / REPORT_FILE)
    logger.info(
        f"{utils.format_metric('rms', report['rms'])}, "
        f"{report['iterations']} iterations over "
        f"{len(result.reports)} windows, written to {args.output}"
    )


if __name__ == "__main__":
    args, unknown_args = parse_args()
    main(args, unknown_args)
