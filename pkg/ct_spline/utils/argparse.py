from typing import Optional  # isort:skip
import argparse
import sys


def boolean_flag(
    parser: argparse.ArgumentParser,
    name: str,
    default: Optional[bool] = False,
    help: str = None,
    shorthand: str = None,
) -> None:
    """
    Adds the exclusive pair ``--<name>`` / ``--no-<name>`` writing one
    boolean destination, dashes in ``name`` become underscores.

    Args:
        parser (argparse.ArgumentParser): parser to extend inplace
        name (str): flag name without dashes
        default (bool, optional): value when neither switch is given,
            ``None`` leaves the decision to a config file
        help (str): help of the enabling switch
        shorthand (str): single-letter alias of ``--<name>``

    Examples:
        >>> parser = argparse.ArgumentParser()
        >>> boolean_flag(parser, "progress", default=True)
        >>> parser.parse_args(["--no-progress"]).progress
        False
    """
    dest = name.replace("-", "_")
    switches = [f"--{name}"]
    if shorthand is not None:
        switches.append(f"-{shorthand}")

    group = parser.add_mutually_exclusive_group()
    group.add_argument(*switches, dest=dest, action="store_true", help=help)
    group.add_argument(
        f"--no-{name}", dest=dest, action="store_false", help=f"no --{name}"
    )
    parser.set_defaults(**{dest: default})


class ArgumentParser(argparse.ArgumentParser):
    """
    Parser whose usage errors exit with code 1,
    code 2 is left for numerical failures.
    """

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


__all__ = ["ArgumentParser", "boolean_flag"]
