"""Command line front end: subcommand wiring, output files, exit codes."""

import subprocess
import sys

import pytest

from switchmux.cli import main

SMALL = "users = 2\nantennas = 4\npayload_symbols = 2\ntrials = 2\nseed = 7\n"


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(SMALL, encoding="utf-8")
    return path


def test_simulate_writes_csv(tmp_path, config_file, capsys):
    out = tmp_path / "rows.csv"
    rc = main(["simulate", "--config", str(config_file), "--out", str(out)])
    assert rc == 0
    assert "wrote 2 rows" in capsys.readouterr().out
    header = out.read_text(encoding="utf-8").splitlines()[0]
    assert header.startswith("trial_id,arch,")
    assert (tmp_path / "rows.csv.manifest.json").exists()


def test_sweep_expands_grid(tmp_path, config_file, capsys):
    cfg = tmp_path / "grid.cfg"
    cfg.write_text(SMALL + "sweep.snr_db = 10, 20\n", encoding="utf-8")
    out = tmp_path / "grid.csv"
    rc = main(["sweep", "--config", str(cfg), "--out", str(out)])
    assert rc == 0
    assert "wrote 4 rows (2 configs)" in capsys.readouterr().out
    assert len(out.read_text(encoding="utf-8").splitlines()) == 5


def test_seed_override_changes_rows(tmp_path, config_file):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    assert main(["simulate", "--config", str(config_file), "--out", str(a)]) == 0
    assert main(
        ["simulate", "--config", str(config_file), "--out", str(b), "--seed", "8"]
    ) == 0
    assert a.read_bytes() != b.read_bytes()


def test_missing_config_exits_1(tmp_path, capsys):
    rc = main(["simulate", "--config", str(tmp_path / "absent.cfg")])
    assert rc == 1
    assert "error:" in capsys.readouterr().err


def test_bad_config_exits_1(tmp_path, capsys):
    path = tmp_path / "bad.cfg"
    path.write_text(SMALL + "no_such_key = 1\n", encoding="utf-8")
    rc = main(["simulate", "--config", str(path)])
    assert rc == 1
    assert "no_such_key" in capsys.readouterr().err


def test_codes_table(capsys):
    assert main(["codes", "--slots", "4"]) == 0
    out = capsys.readouterr().out
    assert "code 1: 0100" in out
    assert "identity control word: 1248" in out
    assert "-270.0" in out


def test_power_table(capsys):
    assert main(["power"]) == 0
    out = capsys.readouterr().out
    lines = {line.split()[0]: line for line in out.splitlines()[1:]}
    assert lines["switched"].split()[-1] == "762.0"
    assert lines["dbf"].split()[-1] == "4064.0"
    assert lines["fdma"].split()[-1] == "754.0"


def test_validate_quick_passes(capsys):
    assert main(["validate", "--quick"]) == 0
    out = capsys.readouterr().out
    assert "checks passed" in out
    assert "FAIL" not in out


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "switchmux.cli", "codes", "--slots", "2"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "code 1: 01" in proc.stdout
