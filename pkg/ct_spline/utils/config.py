"""
YAML and JSON config files.
"""
from typing import Any, Callable, Dict, IO, Tuple, Union  # isort:skip
from collections import OrderedDict
import json
from logging import getLogger
from pathlib import Path
import re

import yaml

from ct_spline.exceptions import FileFormatError, ValidationError
from ct_spline.utils.misc import atomic_write

logger = getLogger(__name__)


class OrderedLoader(yaml.SafeLoader):
    """
    ``SafeLoader`` keeping key order and reading ``1e-4``-style numbers,
    which YAML 1.1 resolves to strings, as floats.
    """


def _construct_ordered(loader: OrderedLoader, node) -> OrderedDict:
    loader.flatten_mapping(node)
    return OrderedDict(loader.construct_pairs(node))


OrderedLoader.add_constructor(
    yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _construct_ordered
)
OrderedLoader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(
        r"""^[-+]?(?:
            [0-9][0-9_]*\.[0-9_]*(?:[eE][-+]?[0-9]+)?
            |[0-9][0-9_]*[eE][-+]?[0-9]+
            |\.[0-9_]+(?:[eE][-+]?[0-9]+)?
            |\.(?:inf|Inf|INF)
        )$|^\.(?:nan|NaN|NAN)$""", re.X
    ),
    list("-+0123456789."),
)


def _load_ordered_yaml(stream: IO) -> Any:
    return yaml.load(stream, OrderedLoader)


def _read_json(stream: IO, ordered: bool) -> Any:
    content = stream.read()
    if not content.strip():
        return None
    hook = OrderedDict if ordered else None
    return json.loads(content, object_pairs_hook=hook)


def _read_yaml(stream: IO, ordered: bool) -> Any:
    return yaml.load(stream, OrderedLoader if ordered else yaml.SafeLoader)


def _write_json(config: Any, stream: IO, indent: int) -> None:
    json.dump(config, stream, indent=indent, ensure_ascii=False)


def _write_yaml(config: Any, stream: IO, indent: int) -> None:
    yaml.safe_dump(
        json.loads(json.dumps(config)),
        stream,
        indent=indent,
        default_flow_style=False,
        sort_keys=False,
    )


_FORMATS: Dict[str, Tuple[Callable, Callable]] = {
    ".json": (_read_json, _write_json),
    ".yml": (_read_yaml, _write_yaml),
    ".yaml": (_read_yaml, _write_yaml),
}


def _format_of(path: Path, data_format: str = None):
    suffix = path.suffix if data_format is None \
        else "." + data_format.lower().lstrip(".")
    if suffix not in _FORMATS:
        raise ValidationError(
            f"{path}: config format '{suffix}' is not one of "
            f"{sorted(_FORMATS)}"
        )
    return _FORMATS[suffix]


def load_config(
    path: Union[str, Path],
    ordered: bool = False,
    data_format: str = None,
    encoding: str = "utf-8",
) -> Any:
    """
    Reads a YAML or JSON config, an empty file gives an empty dict.

    Args:
        path: config file
        ordered (bool): mappings as ``OrderedDict``
        data_format (str): ``json``, ``yml`` or ``yaml``; the suffix of
            ``path`` if unset
        encoding (str): file encoding

    Raises:
        ValidationError: if ``path`` is missing or has another format
        FileFormatError: with the line of a syntax error

    Examples:
        >>> load_config("fit.yml", ordered=True)["solver"]
        OrderedDict([('huber_delta', 0.05)])
    """
    path = Path(path)
    if not path.is_file():
        raise ValidationError(f"config '{path}' doesn't exist")
    read, _ = _format_of(path, data_format)

    with path.open(encoding=encoding) as stream:
        try:
            config = read(stream, ordered)
        except json.JSONDecodeError as ex:
            raise FileFormatError(path, ex.lineno, ex.msg) from ex
        except yaml.MarkedYAMLError as ex:
            mark = ex.problem_mark
            raise FileFormatError(
                path, mark.line + 1 if mark else 0, str(ex.problem)
            ) from ex

    logger.debug(f"loaded config {path}")
    return config if config is not None else {}


def save_config(
    config: Any,
    path: Union[str, Path],
    data_format: str = None,
    encoding: str = "utf-8",
    indent: int = 2,
) -> None:
    """
    Writes ``config`` as YAML or JSON through a temporary file, so
    readers never see a partial file. Mappings of any kind are written
    as plain YAML maps.
    """
    path = Path(path)
    _, write = _format_of(path, data_format)
    with atomic_write(path, encoding=encoding) as stream:
        write(config, stream, indent)


__all__ = ["OrderedLoader", "load_config", "save_config"]
