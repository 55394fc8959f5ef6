# flake8: noqa
import argparse
import io
import json

import numpy as np
import pytest

from ct_spline import utils
from ct_spline.exceptions import FileFormatError, ValidationError
from ct_spline.utils import config


def test_parse_config_args():
    configuration = {
        "solver": {
            "max_iterations": 20,
            "huber_delta": 0.05
        },
        "key": {
            "value": "key2"
        }
    }

    parser = argparse.ArgumentParser()
    parser.add_argument("--command")

    args, uargs = parser.parse_known_args(
        [
            "--command", "fit", "--path=obs.csv:str",
            "--solver/max_iterations=5:int", "--solver/robust=false:bool",
            "-C=like:str"
        ]
    )

    configuration, args = utils.parse_config_args(
        config=configuration, args=args, unknown_args=uargs
    )

    assert args.command == "fit"
    assert args.path == "obs.csv"
    assert configuration["solver"]["max_iterations"] == 5
    assert configuration["solver"]["robust"] is False
    assert configuration["solver"]["huber_delta"] == 0.05
    assert configuration["args"]["path"] == "obs.csv"
    assert configuration["args"]["C"] == "like"
    assert configuration["args"]["command"] == "fit"

    for key, value in args._get_kwargs():
        v = configuration["args"].get(key)
        assert v is not None
        assert v == value


def test_bad_overrides():
    for uargs in [["--solver/delta=0.1"], ["--delta=1:complex"], ["--x"],
                  ["--n=abc:int"]]:
        with pytest.raises(ValidationError):
            utils.parse_config_args(
                config={}, args=argparse.Namespace(), unknown_args=uargs
            )


def test_parse_numbers():
    configuration = {
        "max_iterations": 20,
        "window_size": 10,
        "huber_delta": 0.05,
        "step_tolerance": 1e-8,
        "cost_tolerance": 1e-10,
        "damping_init": 1e-4,
        "offset": -2.5e3,
        "shift": -7,
    }

    buffer = io.StringIO()
    json.dump(configuration, buffer)
    buffer.seek(0)
    yaml_config = config._load_ordered_yaml(buffer)

    for key, item in configuration.items():
        assert np.isclose(yaml_config[key], item)


def test_config_files(tmp_path):
    configuration = {"solver": {"huber_delta": 1e-4, "window_size": 10}}
    for name in ["config.yml", "config.json"]:
        path = tmp_path / name
        utils.save_config(configuration, path)
        loaded = utils.load_config(path, ordered=True)
        assert loaded["solver"]["huber_delta"] == pytest.approx(1e-4)
        assert loaded["solver"]["window_size"] == 10
    assert sorted(p.name for p in tmp_path.iterdir()) \
        == ["config.json", "config.yml"]

    empty = tmp_path / "empty.json"
    empty.write_text("")
    assert utils.load_config(empty) == {}


def test_config_errors(tmp_path):
    with pytest.raises(ValidationError):
        utils.load_config(tmp_path / "missing.yml")
    with pytest.raises(ValidationError):
        utils.save_config({}, tmp_path / "config.ini")

    broken = tmp_path / "broken.json"
    broken.write_text('{\n  "a": 1,\n  "b": \n}\n')
    with pytest.raises(FileFormatError) as info:
        utils.load_config(broken)
    assert ":4:" in str(info.value)

    broken = tmp_path / "broken.yml"
    broken.write_text("a: 1\nb: [1, 2\n")
    with pytest.raises(FileFormatError):
        utils.load_config(broken)


def test_parse_args_uargs(tmp_path):
    path = tmp_path / "fit.yml"
    utils.save_config(
        {
            "args": {"degree": 3, "seed": 7},
            "solver": {"max_iterations": 10}
        }, path
    )
    parser = argparse.ArgumentParser()
    parser.add_argument("--configs", nargs="+")
    parser.add_argument("--degree", type=int, default=None)
    parser.add_argument("--seed", type=int, default=None)

    args, uargs = parser.parse_known_args(
        ["--configs", str(path), "--seed", "1", "--solver/damping=0.5:float"]
    )
    args, configuration = utils.parse_args_uargs(args, uargs)
    # flags win over the config
    assert args.seed == 1
    assert args.degree == 3
    assert configuration["solver"] == {
        "max_iterations": 10,
        "damping": 0.5
    }


def test_yaml_scientific_floats():
    text = "a: 1e-4\nb: -2E+3\nc: .5\nd: 7\ne: 1.5e-3\nf: .inf\n"
    loaded = config._load_ordered_yaml(io.StringIO(text))
    assert loaded == {
        "a": 1e-4,
        "b": -2e3,
        "c": 0.5,
        "d": 7,
        "e": 1.5e-3,
        "f": float("inf")
    }
    assert isinstance(loaded["d"], int)
