import json

import numpy as np
import pandas as pd
import pytest

from ct_spline import utils
from ct_spline.core import lie
from ct_spline.solver import Observation
from ct_spline.synthetic import (
    circular_spline, CircularMotionSpec, make_scene, METHODS,
    random_trajectory
)
from .. import __main__ as main


def _write_scene(path, n_frames=12, noise_sigma=0.0):
    scene = make_scene(
        CircularMotionSpec(n_frames=n_frames), noise_sigma=noise_sigma, seed=0
    )
    utils.write_observations(path, scene.observations)
    return scene


def _read_records(path):
    return pd.read_csv(path, sep=r"\s+", comment="#", header=None).to_numpy()


def test_fit_spline_ba(tmp_path):
    scene = _write_scene(tmp_path / "obs.csv")
    out = tmp_path / "fit"
    code = main.run(
        ["fit", str(tmp_path / "obs.csv"), "--output", str(out)]
    )
    assert code == 0

    report = json.loads((out / "fit_report.json").read_text())
    assert report["mode"] == "spline-ba"
    assert report["n_frames"] == 12
    assert len(report["windows"]) == 12 - 3
    assert report["rms"] < 1e-6 and report["max_rms"] < 1e-6
    assert not (out / "object_points.csv").exists()

    poses = utils.read_trajectory(out / "trajectory.txt")
    # frames before the valid range and on its open end get no pose
    assert [t for t, _ in poses] \
        == [t for t, _ in scene.ground_truth_poses][3:-1]
    spline = utils.read_control_points(out / "control_points.txt")
    assert not spline.closed and spline.degree == 4
    assert len(spline) == 12


def test_fit_local_ba_writes_points(tmp_path):
    _write_scene(tmp_path / "obs.csv", n_frames=8)
    out = tmp_path / "fit"
    code = main.run(
        [
            "fit", str(tmp_path / "obs.csv"), "--mode", "local-ba",
            "--output", str(out)
        ]
    )
    assert code == 0
    points = pd.read_csv(out / "object_points.csv")
    assert list(points.columns) == ["point_id", "x", "y", "z"]
    assert len(points) == 12


def test_fit_then_interpolate_round_trip(tmp_path):
    scene = _write_scene(tmp_path / "obs.csv", noise_sigma=0.01)
    fit_dir, interp_dir = tmp_path / "fit", tmp_path / "interp"
    assert main.run(
        ["fit", str(tmp_path / "obs.csv"), "--output", str(fit_dir)]
    ) == 0
    times = [repr(t) for t, _ in scene.ground_truth_poses[3:-1]]
    assert main.run(
        [
            "interpolate", str(fit_dir / "control_points.txt"), "--at",
            *times, "--output", str(interp_dir)
        ]
    ) == 0

    fitted = _read_records(fit_dir / "trajectory.txt")
    table = pd.read_csv(interp_dir / "interpolated.csv")
    columns = ["timestamp", "tx", "ty", "tz", "qx", "qy", "qz", "qw"]
    assert np.array_equal(fitted, table[columns].to_numpy())


def test_config_and_flags(tmp_path):
    _write_scene(tmp_path / "obs.csv", n_frames=10)
    config = tmp_path / "fit.yml"
    utils.save_config(
        {
            "args": {"window_size": 6, "mode": "spline-ba"},
            "solver": {"max_iterations": 5}
        }, config
    )
    out = tmp_path / "fit"
    command = ["fit", str(tmp_path / "obs.csv"), "--config", str(config),
               "--output", str(out)]
    assert main.run(command) == 0
    report = json.loads((out / "fit_report.json").read_text())
    assert report["window_size"] == 6
    assert report["solver"]["max_iterations"] == 5

    assert main.run(command + ["--window-size", "8"]) == 0
    report = json.loads((out / "fit_report.json").read_text())
    assert report["window_size"] == 8

    assert main.run(command + ["--solver/huber_delta=-1:float"]) == 1
    assert main.run(command + ["--solver/unknown=1:int"]) == 1


def test_output_dir_from_environment(tmp_path, monkeypatch):
    _write_scene(tmp_path / "obs.csv", n_frames=6)
    monkeypatch.setenv("CT_SPLINE_OUTPUT_DIR", str(tmp_path / "env"))
    assert main.run(["fit", str(tmp_path / "obs.csv")]) == 0
    assert (tmp_path / "env" / "fit_report.json").exists()


def test_fit_errors(tmp_path, caplog):
    path = tmp_path / "obs.csv"
    scene = _write_scene(path, n_frames=6)
    lines = path.read_text().splitlines()
    lines[2] = ",".join(lines[2].split(",")[:-1] + ["2.0"])
    path.write_text("\n".join(lines) + "\n")
    assert main.run(["fit", str(path), "--output", str(tmp_path)]) == 1
    assert "obs.csv:3:" in caplog.text

    utils.write_observations(path, scene.observations[:3 * 12])
    assert main.run(["fit", str(path), "--output", str(tmp_path)]) == 1

    # two points per frame cannot fix an orientation
    camera = np.eye(4)
    collinear = [
        Observation(k, 0.1 * t, np.array([0.1 * k, 0.0, 1.0]), camera)
        for t in range(5) for k in range(2)
    ]
    utils.write_observations(path, collinear)
    assert main.run(["fit", str(path), "--output", str(tmp_path)]) == 2
    assert "DegenerateCloudError" in caplog.text


def test_interpolate_constant_twist(tmp_path):
    spec = CircularMotionSpec(theta_transl=0.0, theta_rot=0.4)
    utils.write_control_points(tmp_path / "spline.txt", circular_spline(spec))
    assert main.run(
        [
            "interpolate", str(tmp_path / "spline.txt"), "--rate", "50",
            "--output", str(tmp_path)
        ]
    ) == 0
    table = pd.read_csv(tmp_path / "interpolated.csv")
    velocity = table[["vx", "vy", "vz", "wx", "wy", "wz"]].to_numpy()
    assert np.allclose(velocity, [0.0, 0.0, 0.0, 4.0, 0.0, 0.0], atol=1e-9)
    acceleration = table[["avx", "avy", "avz", "awx", "awy", "awz"]]
    assert np.abs(acceleration.to_numpy()).max() < 1e-7


def test_interpolate_rate_and_range(tmp_path, caplog):
    traj = random_trajectory(14, rng=np.random.RandomState(0))
    path = tmp_path / "spline.txt"
    utils.write_control_points(path, traj)
    start, end = traj.valid_range()
    assert end - start == pytest.approx(1.0)

    assert main.run(
        ["interpolate", str(path), "--rate", "100", "--output", str(tmp_path)]
    ) == 0
    assert len(pd.read_csv(tmp_path / "interpolated.csv")) == 100

    assert main.run(
        ["interpolate", str(path), "--at", repr(end), "--output",
         str(tmp_path)]
    ) == 1
    assert repr(end) in caplog.text
    assert main.run(["interpolate", str(path), "--output", str(tmp_path)]) \
        == 1

    # a closed header does not extend the command's domain
    traj.closed = True
    utils.write_control_points(path, traj)
    assert utils.read_control_points(path).closed
    assert main.run(
        ["interpolate", str(path), "--at", repr(end), "--output",
         str(tmp_path)]
    ) == 1


def test_velocity_experiment(tmp_path):
    assert main.run(
        [
            "velocity-experiment", "--theta-transl", "0", "0.2",
            "--theta-rot", "0.1", "--n-frames", "8",
            "--samples-per-interval", "2", "--no-progress", "--output",
            str(tmp_path)
        ]
    ) == 0
    table = pd.read_csv(tmp_path / "velocity_mse.csv")
    assert list(table.columns) \
        == ["theta_transl", "theta_rot", "method", "mse_v", "mse_w"]
    assert len(table) == 2 * 1 * len(METHODS)


def test_bench(tmp_path):
    assert main.run(
        ["bench", "--n-observations", "2", "--output", str(tmp_path)]
    ) == 0
    table = pd.read_csv(tmp_path / "bench.csv")
    assert set(zip(table["method"], table["form"])) == {
        (method, form)
        for method in ["analytic", "numeric"]
        for form in ["vectorized", "lie"]
    }
    assert sorted(set(table["n_observations"])) == [0, 2]
    assert (table["mean_seconds"] > 0).all()
    assert main.run(["bench", "--repeats", "5", "--output", str(tmp_path)]) \
        == 1


def test_ate(tmp_path, capsys):
    rng = np.random.RandomState(0)
    poses = [(0.1 * k, lie.exp_se3(rng.randn(6))) for k in range(10)]
    utils.write_trajectory(tmp_path / "a.txt", poses)
    utils.write_trajectory(tmp_path / "b.txt", poses)
    assert main.run(
        [
            "ate", str(tmp_path / "a.txt"), str(tmp_path / "b.txt"),
            "--output", str(tmp_path)
        ]
    ) == 0
    assert float(capsys.readouterr().out) < 1e-12
    report = json.loads((tmp_path / "ate.json").read_text())
    assert report["ate"] < 1e-12 and report["n_poses"] == 10

    utils.write_trajectory(tmp_path / "b.txt", poses[:-1])
    assert main.run(
        ["ate", str(tmp_path / "a.txt"), str(tmp_path / "b.txt"),
         "--output", str(tmp_path)]
    ) == 1
