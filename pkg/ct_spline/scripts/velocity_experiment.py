#!/usr/bin/env python
# usage:
# ct-spline velocity-experiment --theta-transl 0 0.25 0.5 --workers 4

from argparse import ArgumentParser
import logging

from ct_spline import utils
from ct_spline.scripts.misc import add_common_args, prepare_run
from ct_spline.synthetic import (
    CT, DT_COUPLED, DT_DECOUPLED, velocity_mse_experiment
)
from ct_spline.synthetic.velocity import DEFAULT_THETAS

logger = logging.getLogger(__name__)

OUTPUT_FILE = "velocity_mse.csv"


def build_args(parser: ArgumentParser):
    """
    Constructs the command-line arguments for
    ``ct-spline velocity-experiment``
    """
    parser.add_argument(
        "--theta-transl",
        type=float,
        nargs="+",
        default=None,
        help="per-frame turn angles around the circle, rad",
    )
    parser.add_argument(
        "--theta-rot",
        type=float,
        nargs="+",
        default=None,
        help="per-frame spin angles of the body, rad",
    )
    parser.add_argument("--radius", type=float, default=None)
    parser.add_argument("--frame-dt", type=float, default=None)
    parser.add_argument("--n-frames", type=int, default=None)
    parser.add_argument(
        "--samples-per-interval",
        type=int,
        default=None,
        help="evaluation instants per knot interval, 10 if unset",
    )
    parser.add_argument(
        "-j",
        "--workers",
        type=int,
        default=None,
        help="worker processes, 0 runs in-process",
    )
    utils.boolean_flag(
        parser, "progress", default=None, help="show a progress bar"
    )
    add_common_args(parser)
    return parser


def parse_args():
    parser = utils.ArgumentParser()
    build_args(parser)
    args, unknown_args = parser.parse_known_args()
    return args, unknown_args


def main(args, unknown_args):
    """Run the ``ct-spline velocity-experiment`` script"""
    args, _ = prepare_run(
        args, unknown_args, {
            "theta_transl": list(DEFAULT_THETAS),
            "theta_rot": list(DEFAULT_THETAS),
            "radius": 1.0,
            "frame_dt": 0.1,
            "n_frames": 30,
            "samples_per_interval": 10,
            "workers": 0,
            "progress": True,
        }
    )
    table = velocity_mse_experiment(
        theta_transl=args.theta_transl,
        theta_rot=args.theta_rot,
        radius=args.radius,
        frame_dt=args.frame_dt,
        n_frames=args.n_frames,
        degree=args.degree,
        samples_per_interval=args.samples_per_interval,
        workers=args.workers,
        progress=args.progress,
    )
    utils.write_table(args.output / OUTPUT_FILE, table)

    means = table.groupby("method")[["mse_v", "mse_w"]].mean()
    for method in [CT, DT_COUPLED, DT_DECOUPLED]:
        logger.info(
            f"{method}: mean "
            f"{utils.format_metric('mse_v', means.loc[method, 'mse_v'])}, "
            f"{utils.format_metric('mse_w', means.loc[method, 'mse_w'])}"
        )


if __name__ == "__main__":
    args, unknown_args = parse_args()
    main(args, unknown_args)
