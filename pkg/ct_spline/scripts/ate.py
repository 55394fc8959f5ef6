#!/usr/bin/env python
# usage:
# ct-spline ate trajectory.txt ground_truth.txt --align-prefix 50

from argparse import ArgumentParser
import logging

import numpy as np

from ct_spline import utils
from ct_spline.exceptions import ValidationError
from ct_spline.scripts.misc import add_common_args, prepare_run
from ct_spline.synthetic import trajectory_errors

logger = logging.getLogger(__name__)

REPORT_FILE = "ate.json"


def build_args(parser: ArgumentParser):
    """Constructs the command-line arguments for ``ct-spline ate``"""
    parser.add_argument("estimate", type=str, help="estimated trajectory")
    parser.add_argument("truth", type=str, help="ground-truth trajectory")
    parser.add_argument(
        "--align-prefix",
        type=int,
        default=None,
        help="align on the first N poses only, all if unset",
    )
    add_common_args(parser)
    return parser


def parse_args():
    parser = utils.ArgumentParser()
    build_args(parser)
    args, unknown_args = parser.parse_known_args()
    return args, unknown_args


def main(args, unknown_args):
    """Run the ``ct-spline ate`` script"""
    args, _ = prepare_run(args, unknown_args)
    estimate = utils.read_trajectory(args.estimate)
    truth = utils.read_trajectory(args.truth)
    if len(estimate) != len(truth):
        raise ValidationError(
            f"{args.estimate} has {len(estimate)} poses, "
            f"{args.truth} has {len(truth)}"
        )
    times = np.array([t for t, _ in estimate])
    if not np.allclose(times, [t for t, _ in truth], rtol=0.0, atol=1e-9):
        raise ValidationError(
            f"timestamps of {args.estimate} and {args.truth} differ"
        )

    errors = trajectory_errors(
        [pose for _, pose in estimate],
        [pose for _, pose in truth],
        align_prefix=args.align_prefix,
    )
    report = {
        "ate": errors.ate,
        "max_translation": errors.max_translation,
        "max_rotation": errors.max_rotation,
        "n_poses": len(truth),
        "align_prefix": args.align_prefix,
    }
    utils.save_config(report, args.output / REPORT_FILE)
    logger.info(
        f"{utils.format_metric('ate', errors.ate)} over {len(truth)} poses"
    )
    print(repr(errors.ate))


if __name__ == "__main__":
    args, unknown_args = parse_args()
    main(args, unknown_args)
