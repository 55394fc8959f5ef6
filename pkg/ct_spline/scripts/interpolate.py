#!/usr/bin/env python
# usage:
# ct-spline interpolate control_points.txt --rate 100 --output ./poses

from argparse import ArgumentParser
import logging

import pandas as pd

from ct_spline import utils
from ct_spline.core.spline import (
    body_acceleration, body_velocity, interpolate_pose, sample_times
)
from ct_spline.exceptions import ValidationError
from ct_spline.scripts.misc import add_common_args, prepare_run

logger = logging.getLogger(__name__)

OUTPUT_FILE = "interpolated.csv"
COLUMNS = [
    "timestamp", "tx", "ty", "tz", "qx", "qy", "qz", "qw",
    "vx", "vy", "vz", "wx", "wy", "wz",
    "avx", "avy", "avz", "awx", "awy", "awz",
]


def build_args(parser: ArgumentParser):
    """Constructs the command-line arguments for ``ct-spline interpolate``"""
    parser.add_argument(
        "control_points", type=str, help="control-points file of a spline"
    )
    parser.add_argument(
        "--at",
        type=float,
        nargs="+",
        default=None,
        help="timestamps to evaluate",
    )
    parser.add_argument(
        "--rate",
        type=float,
        default=None,
        help="evaluate the whole valid range at this rate, Hz",
    )
    add_common_args(parser)
    return parser


def parse_args():
    parser = utils.ArgumentParser()
    build_args(parser)
    args, unknown_args = parser.parse_known_args()
    return args, unknown_args


def interpolate_table(trajectory, times) -> pd.DataFrame:
    """
    Pose, body velocity ``[v; w]`` and its time derivative per timestamp.

    Raises:
        OutOfRangeError: naming the first timestamp outside the domain
    """
    rows = []
    for t in times:
        pose = interpolate_pose(trajectory, t)
        rows.append(
            [float(t), *utils.pose_to_record(pose)]
            + list(body_velocity(trajectory, t))
            + list(body_acceleration(trajectory, t))
        )
    return pd.DataFrame(rows, columns=COLUMNS)


def main(args, unknown_args):
    """Run the ``ct-spline interpolate`` script"""
    args, _ = prepare_run(args, unknown_args)
    if (args.at is None) == (args.rate is None):
        raise ValidationError("exactly one of --at and --rate is required")
    if args.rate is not None and not args.rate > 0:
        raise ValidationError(f"--rate must be positive, got {args.rate}")

    # the command evaluates the half-open domain whatever the header says
    trajectory = utils.read_control_points(args.control_points, closed=False)
    times = args.at if args.at is not None \
        else sample_times(trajectory, args.rate)
    table = interpolate_table(trajectory, times)
    utils.write_table(args.output / OUTPUT_FILE, table)
    logger.info(
        f"{len(table)} samples of {trajectory} "
        f"written to {args.output / OUTPUT_FILE}"
    )


if __name__ == "__main__":
    args, unknown_args = parse_args()
    main(args, unknown_args)
