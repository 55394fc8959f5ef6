import copy
from logging import getLogger

from ct_spline.exceptions import ValidationError
from ct_spline.utils.config import load_config
from ct_spline.utils.dict import merge_dicts

logger = getLogger(__name__)


def _parse_bool(value: str) -> bool:
    lowered = value.lower()
    if lowered in ("1", "true", "yes"):
        return True
    if lowered in ("0", "false", "no"):
        return False
    raise ValueError(f"not a boolean: {value!r}")


VALUE_TYPES = {
    "str": str,
    "int": int,
    "float": float,
    "bool": _parse_bool,
}


def _parse_value(arg: str, value: str):
    if ":" not in value:
        raise ValidationError(
            f"override {arg!r} must look like --key=value:type"
        )
    value_content, value_type = value.rsplit(":", 1)
    if value_type not in VALUE_TYPES:
        raise ValidationError(
            f"override {arg!r} has unknown type {value_type!r}, "
            f"expected one of {sorted(VALUE_TYPES)}"
        )
    if value_type == "str" and value_content.lower() == "none":
        return None
    try:
        return VALUE_TYPES[value_type](value_content)
    except ValueError as ex:
        raise ValidationError(f"override {arg!r}: {ex}") from ex


def parse_config_args(*, config, args, unknown_args):
    """
    Applies ``--section/key=value:type`` overrides to ``config`` and
    ``--key=value:type`` overrides to ``args``, then records every
    argument that is set in the config's ``args`` section.
    """
    for arg in unknown_args:
        if "=" not in arg:
            raise ValidationError(f"unrecognized argument {arg!r}")
        arg_name, value = arg.split("=", 1)
        arg_name = arg_name.lstrip("-").strip("/")
        arg_value = _parse_value(arg, value)

        if "/" in arg_name:
            arg_names = arg_name.split("/")
            config_ = config
            for arg_name in arg_names[:-1]:
                if arg_name not in config_:
                    config_[arg_name] = {}

                config_ = config_[arg_name]

            config_[arg_names[-1]] = arg_value
        else:
            setattr(args, arg_name, arg_value)

    if config.get("args", None) is None:
        config["args"] = dict()

    for key, value in args._get_kwargs():
        if value is not None:
            config["args"][key] = value

    return config, args


def parse_args_uargs(args, unknown_args):
    """
    Function for parsing configuration files

    Args:
        args: recognized arguments, ``args.configs`` lists config paths
        unknown_args: unrecognized arguments

    Returns:
        tuple: updated arguments, dict with config
    """
    args_ = copy.deepcopy(args)

    # load params
    config = {}
    for config_path in getattr(args_, "configs", None) or []:
        config_ = load_config(config_path, ordered=True)
        config = merge_dicts(config, config_)

    config, args_ = parse_config_args(
        config=config, args=args_, unknown_args=unknown_args
    )

    # flags left unset on the command line take the config value
    config_args = config.get("args", None)
    if config_args is not None:
        for key, value in config_args.items():
            arg_value = getattr(args_, key, None)
            if arg_value is None:
                arg_value = value
            setattr(args_, key, arg_value)

    return args_, config


__all__ = ["parse_config_args", "parse_args_uargs"]
