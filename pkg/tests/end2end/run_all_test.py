import json
import os

import pytest

from joint_friction_id import cli
from joint_friction_id import constant
from joint_friction_id.excitation import trajectory
from joint_friction_id.fitting.static_fit import FitResult

TINY_CONFIG = {
    "fixture": "ankle",
    "excitation": {"manifest": "manifest.json"},
    "fit": {"epochs": 200},
    "pinn": {
        "history_length": 5,
        "hidden1": 16,
        "hidden2": 8,
        "dropout_rate": 0.0,
        "learning_rate": 1e-3,
        "batch_size": 256,
        "epochs": 3,
    },
    "eval": {
        "tracking_duration": 0.6,
        "settle_time": 0.2,
        "kp_bounds": [100, 1000],
        "kp_points_per_decade": 1,
        "disturbance_amplitude": 3.0,
        "disturbance_start": 0.1,
        "moment_iterations": 2,
    },
}


@pytest.fixture
def config_path(tmp_path, monkeypatch):
    monkeypatch.delenv(constant.SEED_ENV_NAME, raising=False)
    monkeypatch.delenv(constant.FIXTURE_ENV_NAME, raising=False)
    specs = trajectory.sine_grid([0.7], [1.0, 2.0], 1.5)
    trajectory.save_manifest(specs, str(tmp_path / "manifest.json"))
    path = tmp_path / "config.json"
    path.write_text(json.dumps(TINY_CONFIG))
    return str(path)


def _read(path):
    with open(path, "rb") as f:
        return f.read()


@pytest.mark.slow
def test_run_all_writes_report(tmp_path, config_path):
    first = tmp_path / "first"
    assert cli.main(["run-all", "--config", config_path, "--seed", "7", "--out", str(first)]) == 0

    lines = (first / "report" / "tracking.csv").read_text().splitlines()
    assert lines[0].startswith("# config_hash=")
    assert lines[1] == ",".join(constant.REPORT_COLUMNS)
    assert [line.split(",")[0] for line in lines[2:]] == ["NONE", "CV", "SCV", "PINN"]
    assert (first / "report" / "report.md").exists()
    assert (first / "report" / "common_recovery.csv").exists()
    assert (first / "pinn" / "model.json").exists()
    scv = FitResult.load(str(first / "fit" / "scv.json"))
    assert scv.params.k_s >= scv.params.k_c

    # 同一 seed 重跑，数据集逐字节一致
    second = tmp_path / "second"
    assert cli.main(["preprocess", "--config", config_path, "--seed", "7", "--out", str(second)]) == 1
    assert cli.main(["simulate", "--config", config_path, "--seed", "7", "--out", str(second)]) == 0
    assert cli.main(["preprocess", "--config", config_path, "--seed", "7", "--out", str(second)]) == 0
    names = sorted(os.listdir(str(first / "dataset")))
    assert names == ["traj_000.csv", "traj_001.csv"]
    for name in names:
        assert _read(str(first / "dataset" / name)) == _read(str(second / "dataset" / name))


@pytest.mark.slow
def test_fit_only_scv(tmp_path, config_path):
    out = tmp_path / "run"
    for command in ("simulate", "preprocess"):
        assert cli.main([command, "--config", config_path, "--seed", "1", "--out", str(out)]) == 0
    assert cli.main(["fit", "--kind", "scv", "--config", config_path, "--seed", "1", "--out", str(out)]) == 0
    assert (out / "fit" / "scv.json").exists()
    assert not (out / "fit" / "cv.json").exists()
    assert (out / "fit" / "scv_loss.csv").exists()
