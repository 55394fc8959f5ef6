from typing import Dict, Tuple  # isort:skip
from argparse import ArgumentParser, Namespace
import logging
from pathlib import Path
import sys

from ct_spline import utils

DEFAULTS = {"seed": 42, "degree": 4, "verbose": False}


def add_common_args(parser: ArgumentParser) -> ArgumentParser:
    """
    Flags shared by every ``ct-spline`` command. They default to ``None``
    so that a config's ``args`` section can fill them in.
    """
    parser.add_argument(
        "--config",
        "--configs",
        "-C",
        nargs="+",
        help="path to config/configs (YAML or JSON)",
        metavar="CONFIG_PATH",
        dest="configs",
        default=None,
    )
    parser.add_argument(
        "--seed", type=int, default=None, help="random seed, 42 if unset"
    )
    parser.add_argument(
        "--degree", type=int, default=None, help="spline order, 4 if unset"
    )
    parser.add_argument(
        "--output",
        type=str,
        default=None,
        help="output directory, $CT_SPLINE_OUTPUT_DIR or . if unset",
    )
    utils.boolean_flag(parser, "verbose", default=None, shorthand="v")
    return parser


def setup_logger(verbose: bool = False) -> logging.Logger:
    logger = logging.getLogger("ct_spline")
    logger.setLevel(logging.DEBUG if verbose else logging.INFO)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(
        logging.Formatter("[{asctime}] {levelname} {name}: {message}",
                          style="{")
    )
    logger.addHandler(handler)
    return logger


def prepare_run(
    args: Namespace,
    unknown_args,
    defaults: Dict = None,
) -> Tuple[Namespace, Dict]:
    """
    Merges configs and overrides into ``args``, fills what is still unset
    from ``defaults``, configures logging and seeds the global generators.

    Returns:
        tuple: arguments and config; ``args.output`` is an existing
        ``Path``
    """
    args, config = utils.parse_args_uargs(args, unknown_args)
    for key, value in {**DEFAULTS, **(defaults or {})}.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)

    setup_logger(args.verbose)
    utils.set_global_seed(args.seed)

    args.output = utils.output_dir(args.output)
    Path(args.output).mkdir(parents=True, exist_ok=True)
    return args, config


__all__ = ["add_common_args", "setup_logger", "prepare_run"]
