from typing import Any, Iterable, IO, Iterator, Tuple, Union  # isort:skip
from contextlib import contextmanager
from itertools import tee
import os
from pathlib import Path
import tempfile


def pairwise(iterable: Iterable[Any]) -> Iterator[Tuple[Any, Any]]:
    """
    Consecutive pairs ``(s0, s1), (s1, s2), ...``
    """
    first, second = tee(iterable)
    next(second, None)
    return zip(first, second)


def format_metric(name: str, value: float) -> str:
    """
    ``name=value`` with four decimals, scientific below ``1e-4``.
    """
    if abs(value) < 1e-4:
        return f"{name}={value:1.3e}"
    return f"{name}={value:.4f}"


def output_dir(path: Union[str, Path] = None) -> Path:
    """
    ``path`` if given, else ``$CT_SPLINE_OUTPUT_DIR``, else the current
    directory.
    """
    if path is None:
        path = os.environ.get("CT_SPLINE_OUTPUT_DIR", ".")
    return Path(path)


@contextmanager
def atomic_write(
    path: Union[str, Path],
    mode: str = "w",
    encoding: str = "utf-8",
) -> Iterator[IO]:
    """
    Opens a temporary file next to ``path`` and renames it over ``path``
    once the block finishes; on error the target is left untouched.

    Examples:
        >>> with atomic_write("poses.txt") as stream:
        >>>     stream.write("# timestamp tx ty tz qx qy qz qw\\n")
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(
        dir=str(path.parent), prefix=f".{path.name}.", suffix=".tmp"
    )
    kwargs = {} if "b" in mode else {"encoding": encoding, "newline": ""}
    try:
        with os.fdopen(fd, mode, **kwargs) as stream:
            yield stream
        os.replace(tmp_path, str(path))
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


__all__ = ["pairwise", "format_metric", "output_dir", "atomic_write"]
