import json
import subprocess
import sys

import pandas as pd
import pytest

from aremos.cli import EXIT_IO, EXIT_OK, EXIT_VALIDATION, main, read_config_file
from aremos.errors import ValidationError

FAST = ["--ar-training-length", "40", "--emos-training-length", "10", "--max-ar-order", "3"]


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "data.csv"
    assert main(["synth", "--out", str(path), "--seed", "4", "--stations", "2", "--days", "120", "--members", "6"]) == EXIT_OK
    return path


def test_run_writes_report(tmp_path, dataset):
    out = tmp_path / "report"
    assert main(["run", "--data", str(dataset), "--seed", "1", "--out", str(out), *FAST]) == EXIT_OK
    summary = pd.read_csv(out / "summary.csv")
    assert summary["method"].tolist()[:3] == ["EMOS", "AR-EMOS", "SLP"]
    config = json.loads((out / "config.json").read_text())
    assert config["seed"] == 1 and config["ar_training_length"] == 40


def test_run_requires_seed(dataset, tmp_path):
    with pytest.raises(SystemExit):
        main(["run", "--data", str(dataset), "--out", str(tmp_path)])


def test_config_file_overrides_flags(tmp_path, dataset):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("slp-weight = 0.2\nslp_spread = 1.1\nmax_ar_order = 2\n")
    out = tmp_path / "report"
    assert main(["run", "--data", str(dataset), "--seed", "1", "--config", str(cfg), "--out", str(out), *FAST]) == EXIT_OK
    tests = json.loads((out / "tests.json").read_text())
    assert tests["slp"] == {"weight": 0.2, "spread": 1.1, "selected_by": "config"}
    assert json.loads((out / "config.json").read_text())["max_ar_order"] == 2


def test_config_file_unknown_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    with pytest.raises(ValidationError):
        read_config_file(cfg)


def test_gridtable_and_sweep(tmp_path, dataset):
    grid = tmp_path / "grid.csv"
    assert main(["gridtable", "--data", str(dataset), "--out", str(grid), *FAST]) == EXIT_OK
    assert len(pd.read_csv(grid)) == 99
    sweep = tmp_path / "sweep.csv"
    assert main(["sweep-t1", "--data", str(dataset), "--t1", "30,60", "--max-ar-order", "3", "--out", str(sweep)]) == EXIT_OK
    assert pd.read_csv(sweep)["t1"].tolist() == [30, 60]


def test_verify_command(tmp_path):
    path = tmp_path / "f.csv"
    path.write_text(
        "station_id,date,method,obs,mean,variance\n"
        + "".join(f"S,2020-01-{d:02d},A,{d % 3},1,1\nS,2020-01-{d:02d},B,{d % 3},0,2\n" for d in range(1, 11))
    )
    out = tmp_path / "v"
    assert main(["verify", "--forecasts", str(path), "--out", str(out)]) == EXIT_OK
    assert (out / "summary.csv").exists()


def test_exit_codes(tmp_path, capsys):
    assert main(["run", "--data", str(tmp_path / "missing.csv"), "--seed", "1", "--out", str(tmp_path)]) == EXIT_IO
    bad = tmp_path / "bad.csv"
    bad.write_text("station_id,date,obs,m1,m2\nA,2020-01-01,1,x,2\n")
    assert main(["run", "--data", str(bad), "--seed", "1", "--out", str(tmp_path)]) == EXIT_VALIDATION
    assert "line 2" in capsys.readouterr().err


def test_short_history_is_validation_error(tmp_path):
    path = tmp_path / "short.csv"
    assert main(["synth", "--out", str(path), "--seed", "1", "--stations", "1", "--days", "30", "--members", "3"]) == 0
    assert main(["run", "--data", str(path), "--seed", "1", "--out", str(tmp_path / "r")]) == EXIT_VALIDATION


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "aremos", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "sweep-t1" in res.stdout
