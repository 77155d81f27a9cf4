"""End-to-end checks of the command-line tool via subprocess."""

import json
import os
import subprocess
import sys

import pytest

CLI = os.environ.get("SPINPROP_CLI")
if CLI is None or not os.path.exists(CLI):
    pytest.skip("SPINPROP_CLI not set", allow_module_level=True)


def base_config(**overrides):
    cfg = {
        "hamiltonian": [
            {"coeff_re": 1.0, "m": 1, "n": 1},
            {"coeff_re": 0.9, "q": 1},
            {"coeff_re": 0.3, "m": 1, "r": 1},
            {"coeff_re": 0.3, "n": 1, "p": 1},
        ],
        "j": 1.0,
        "boundary": {
            "zp": {"re": 0.2, "im": 0.1},
            "sp": {"re": 0.3, "im": -0.1},
            "zpp": {"re": 0.3, "im": 0.0},
            "spp": {"re": 0.2, "im": 0.25},
        },
        "time": 1.0,
    }
    cfg.update(overrides)
    return cfg


def run_cli(args, config, tmp_path, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(config))
    return subprocess.run(
        [CLI, *args, "--config", str(path)], capture_output=True, text=True
    )


def test_propagate_csv(tmp_path):
    res = run_cli(["propagate"], base_config(), tmp_path)
    assert res.returncode == 0, res.stderr
    lines = res.stdout.strip().splitlines()
    header = lines[0].split(",")
    assert header[:4] == ["T", "re_K", "im_K", "re_S"]
    row = dict(zip(header, lines[1].split(",")))
    K = complex(float(row["re_K"]), float(row["im_K"]))
    assert abs(K) <= 1.0 + 1e-6
    assert float(row["residual"]) < 1e-8


def test_scan_is_deterministic(tmp_path):
    cfg = base_config(time={"t_min": 0.0, "t_max": 1.0, "steps": 6})
    a = run_cli(["scan"], cfg, tmp_path)
    b = run_cli(["scan"], cfg, tmp_path)
    assert a.returncode == 0, a.stderr
    assert a.stdout == b.stdout
    assert len(a.stdout.strip().splitlines()) == 7


def test_verify_small_error(tmp_path):
    res = run_cli(["verify", "--workers", "2"], base_config(), tmp_path)
    assert res.returncode == 0, res.stderr
    lines = res.stdout.strip().splitlines()
    header = lines[0].split(",")
    row = dict(zip(header, lines[1].split(",")))
    assert float(row["rel_err"]) < 0.05


def test_oracle_json_output(tmp_path):
    cfg = base_config(oracle={"N_list": [100, 200]}, output={"format": "json"})
    res = run_cli(["oracle"], cfg, tmp_path)
    assert res.returncode == 0, res.stderr
    rows = json.loads(res.stdout)
    assert [r["N"] for r in rows] == [100, 200]
    assert rows[1]["rel_dev"] < rows[0]["rel_dev"]


def test_out_file(tmp_path):
    out = tmp_path / "result.csv"
    cfg = base_config()
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    res = subprocess.run(
        [CLI, "propagate", "--config", str(path), "--out", str(out)],
        capture_output=True,
        text=True,
    )
    assert res.returncode == 0, res.stderr
    assert out.read_text().startswith("T,re_K,im_K")


def test_config_error_exit_code(tmp_path):
    res = run_cli(["propagate"], base_config(bogus=1), tmp_path)
    assert res.returncode == 64
    assert "unknown key" in res.stderr

    res = run_cli(["propagate"], base_config(j=0.7), tmp_path)
    assert res.returncode == 64

    res = subprocess.run(
        [CLI, "propagate", "--config", str(tmp_path / "missing.json")],
        capture_output=True,
        text=True,
    )
    assert res.returncode == 64


def test_scan_requires_grid(tmp_path):
    res = run_cli(["scan"], base_config(), tmp_path)
    assert res.returncode == 64

    res = run_cli(
        ["propagate"],
        base_config(time={"t_min": 0.0, "t_max": 1.0, "steps": 3}),
        tmp_path,
    )
    assert res.returncode == 64


def test_solver_error_exit_code(tmp_path):
    # strong squeezing diverges well before T
    cfg = base_config(
        hamiltonian=[
            {"coeff_re": 3.0, "m": 2},
            {"coeff_re": 3.0, "n": 2},
        ],
        time=20.0,
    )
    res = run_cli(["propagate"], cfg, tmp_path)
    assert res.returncode == 2
    assert res.stderr.strip()
