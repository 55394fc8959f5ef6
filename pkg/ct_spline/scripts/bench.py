#!/usr/bin/env python
# usage:
# ct-spline bench --repeats 50 --n-observations 1 10 100

from argparse import ArgumentParser
import logging

from ct_spline import utils
from ct_spline.bench import (
    bench_error_chain, bench_pose_jacobian, MIN_REPEATS, reports_to_dataframe
)
from ct_spline.core.jacobians import FORMS
from ct_spline.exceptions import ValidationError
from ct_spline.scripts.misc import add_common_args, prepare_run

logger = logging.getLogger(__name__)

OUTPUT_FILE = "bench.csv"


def build_args(parser: ArgumentParser):
    """Constructs the command-line arguments for ``ct-spline bench``"""
    parser.add_argument(
        "--repeats",
        type=int,
        default=None,
        help=f"timed calls per measurement, at least {MIN_REPEATS}",
    )
    parser.add_argument(
        "--n-observations",
        type=int,
        nargs="+",
        default=None,
        help="observation counts of the error-chain workload",
    )
    parser.add_argument(
        "--forms",
        type=str,
        nargs="+",
        choices=FORMS,
        default=None,
        help="Jacobian forms to time, all if unset",
    )
    add_common_args(parser)
    return parser


def parse_args():
    parser = utils.ArgumentParser()
    build_args(parser)
    args, unknown_args = parser.parse_known_args()
    return args, unknown_args


def main(args, unknown_args):
    """Run the ``ct-spline bench`` script"""
    args, _ = prepare_run(
        args, unknown_args, {
            "repeats": MIN_REPEATS,
            "n_observations": [1, 10, 100],
            "forms": list(FORMS),
        }
    )
    if args.repeats < MIN_REPEATS:
        raise ValidationError(
            f"--repeats must be at least {MIN_REPEATS}, got {args.repeats}"
        )
    if min(args.n_observations) < 1:
        raise ValidationError(
            f"--n-observations must be positive, got {args.n_observations}"
        )

    reports = bench_pose_jacobian(
        args.forms, args.repeats, degree=args.degree, seed=args.seed
    )
    reports += bench_error_chain(
        args.n_observations,
        args.forms,
        args.repeats,
        degree=args.degree,
        seed=args.seed,
    )
    utils.write_table(
        args.output / OUTPUT_FILE, reports_to_dataframe(reports)
    )
    logger.info(f"{len(reports)} timings written to {args.output}")


if __name__ == "__main__":
    args, unknown_args = parse_args()
    main(args, unknown_args)
