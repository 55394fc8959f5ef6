from typing import List  # isort:skip
from argparse import RawTextHelpFormatter
from collections import OrderedDict
import logging
import sys

from ct_spline.__version__ import __version__
from ct_spline.exceptions import NumericalError, ValidationError
from ct_spline.scripts import ate, bench, fit, interpolate, velocity_experiment
from ct_spline.utils import ArgumentParser

logger = logging.getLogger(__name__)

COMMANDS = OrderedDict(
    [
        ("fit", fit),
        ("interpolate", interpolate),
        ("velocity-experiment", velocity_experiment),
        ("bench", bench),
        ("ate", ate),
    ]
)

EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2


def build_parser() -> ArgumentParser:
    parser = ArgumentParser("ct-spline", formatter_class=RawTextHelpFormatter)
    parser.add_argument(
        "-V", "--version", action="version", version=f"%(prog)s {__version__}"
    )
    all_commands = ", \n".join(map(lambda x: f"    {x}", COMMANDS.keys()))

    subparsers = parser.add_subparsers(
        metavar="{command}",
        dest="command",
        help=f"available commands: \n{all_commands}",
    )
    subparsers.required = True

    for key, value in COMMANDS.items():
        value.build_args(subparsers.add_parser(key))

    return parser


def run(argv: List[str] = None) -> int:
    """
    Runs one command.

    Returns:
        int: 0 on success, 1 on invalid input, 2 on a numerical failure
    """
    parser = build_parser()

    args, uargs = parser.parse_known_args(argv)

    try:
        COMMANDS[args.command].main(args, uargs)
    except ValidationError as ex:
        logger.error(f"{args.command}: {ex}")
        return EXIT_VALIDATION
    except NumericalError as ex:
        logger.error(f"{args.command}: {type(ex).__name__}: {ex}")
        return EXIT_NUMERICAL
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
