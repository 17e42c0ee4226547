import json
import os
import subprocess
import sys

import numpy as np
import pytest

from tentspace.cli import main
from tentspace.field import SampledFunction, SpatialGrid
from tentspace.io import read_tsf1, write_tsf1
from tentspace.space import RandomSource, complex_gaussian_array, ell


@pytest.fixture()
def function_file(tmp_path):
    grid = SpatialGrid(1, 64)
    gen = RandomSource(1).generator()
    coeff = np.zeros((64, 1), dtype=complex)
    coeff[1:9] = complex_gaussian_array(gen, (8, 1))
    f = SampledFunction(grid, ell(2, 1), np.fft.ifft(coeff, axis=0))
    path = tmp_path / "f.tsf1"
    write_tsf1(f, path)
    return path


def run_cli(*argv):
    return main(list(argv))


def test_resolve_command(tmp_path, function_file):
    cfg = {"n": 1, "N": 64, "K": 6, "input": {"file": str(function_file)},
           "space": {"q": 2.0, "dim": 1}}
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / "out"
    rc = run_cli("resolve", "--config", str(cfg_path), "--out", str(out))
    assert rc == 0
    field = read_tsf1(out / "field.tsf1")
    assert field.values.shape == (6, 64, 1)
    assert json.loads((out / "resolve.json").read_text())["K"] == 6


@pytest.mark.parametrize("cmd,key", [("afun", "alpha"), ("cfun", "q"),
                                     ("nfun", "alpha")])
def test_profile_commands(tmp_path, function_file, cmd, key):
    cfg = {
        "n": 1, "N": 64, "K": 6, "space": {"q": 2.0, "dim": 1},
        "field": {"resolve": {"file": str(function_file)}},
        "alpha": 1.0, "q": 1.0,
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / "out"
    rc = run_cli(cmd, "--config", str(cfg_path), "--out", str(out))
    assert rc == 0
    lines = (out / f"{cmd}.csv").read_text().strip().splitlines()
    assert len(lines) == 65
    summary = json.loads((out / f"{cmd}.json").read_text())
    assert summary["max"] >= 0


def test_bmo_command(tmp_path, function_file, capsys):
    cfg = {"n": 1, "N": 64, "input": {"file": str(function_file)},
           "space": {"q": 2.0, "dim": 1}}
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    rc = run_cli("bmo", "--config", str(cfg_path), "--out", str(tmp_path / "o"))
    assert rc == 0
    assert "bmo_norm" in capsys.readouterr().out


def test_whitney_command(tmp_path):
    cells = [False] * 64
    for i in range(20, 29):
        cells[i] = True
    cells_path = tmp_path / "cells.json"
    cells_path.write_text(json.dumps(cells))
    cfg = {"n": 1, "N": 64, "set": {"cells_file": str(cells_path)}}
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / "out"
    rc = run_cli("whitney", "--config", str(cfg_path), "--out", str(out))
    assert rc == 0
    payload = json.loads((out / "whitney.json").read_text())
    assert payload["check"]["ok"]
    assert payload["cube_count"] >= 1


def test_paraproduct_command(tmp_path):
    cfg = {
        "n": 1, "N": 64, "K": 8, "space": {"q": 1.0, "dim": 2},
        "f": {"corpus": {"family": "bmo_step", "count": 1}},
        "u": {"corpus": {"family": "lp_random", "count": 1}},
        "g": {"corpus": {"family": "bandlimited_random", "count": 1}},
        "p_list": [2.0],
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / "out"
    rc = run_cli("paraproduct", "--config", str(cfg_path), "--out", str(out))
    assert rc == 0
    summary = json.loads((out / "paraproduct.json").read_text())
    assert "pairing" in summary and "scale_norms" in summary


def test_suite_command_and_artifacts(tmp_path):
    cfg = {"N": 128, "K": 12, "cases": 4, "q_list": [1.0], "seed": 5}
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / "out"
    rc = run_cli("suite", "duality", "--config", str(cfg_path), "--out", str(out))
    assert rc == 0
    report = json.loads((out / "report.json").read_text())
    assert report["suite"] == "duality" and report["passed"]
    assert (out / "cases.csv").exists()


def test_suite_good_lambda_csv(tmp_path):
    cfg = {"N": 128, "K": 12, "cases": 3, "q_list": [1.0],
           "gamma_list": [1.0, 0.5], "beta": 3.0, "seed": 5}
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / "out"
    rc = run_cli("suite", "good_lambda", "--config", str(cfg_path), "--out", str(out))
    assert rc == 0
    rows = (out / "good_lambda.csv").read_text().strip().splitlines()
    assert rows[0] == "gamma,lambda,m_lhs,m_cq,m_beta,fitted_C"
    assert len(rows) > 1


def test_config_error_exit_code(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run_cli("suite", "duality", "--config", str(bad)) == 2
    missing = run_cli("afun", "--config", str(tmp_path / "nope.json"))
    assert missing == 2
    unknown_key = tmp_path / "uk.json"
    unknown_key.write_text(json.dumps({"bogus": 1}))
    assert run_cli("suite", "duality", "--config", str(unknown_key)) == 2


def test_threads_env_override(tmp_path, monkeypatch):
    cfg = {"N": 128, "K": 12, "cases": 2, "q_list": [1.0], "seed": 5}
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / "out"
    monkeypatch.setenv("TENTSPACE_THREADS", "2")
    rc = run_cli("suite", "duality", "--config", str(cfg_path), "--out", str(out))
    assert rc == 0
    report = json.loads((out / "report.json").read_text())
    assert report["config"]["threads"] == 2
    monkeypatch.setenv("TENTSPACE_THREADS", "zebra")
    assert run_cli("suite", "duality", "--config", str(cfg_path)) == 2


def test_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "tentspace.cli", "--help"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "tentspace" in proc.stdout


def test_custom_psi_from_tsf1(tmp_path):
    from tentspace.calderon import mexican_hat

    grid = SpatialGrid(1, 1024, 16.0)
    x = grid.coords()
    xw = np.where(x > grid.L / 2, x - grid.L, x)
    vals = mexican_hat(1).spatial(xw)[:, None].astype(complex)
    psi_path = tmp_path / "psi.tsf1"
    write_tsf1(SampledFunction(grid, ell(2, 1), vals), psi_path)

    fn_grid = SpatialGrid(1, 64)
    gen = RandomSource(4).generator()
    coeff = np.zeros((64, 1), dtype=complex)
    coeff[1:7] = complex_gaussian_array(gen, (6, 1))
    f = SampledFunction(fn_grid, ell(2, 1), np.fft.ifft(coeff, axis=0))
    f_path = tmp_path / "f.tsf1"
    write_tsf1(f, f_path)

    cfg = {"n": 1, "N": 64, "K": 6, "space": {"q": 2.0, "dim": 1},
           "psi": {"file": str(psi_path), "name": "mh_custom"},
           "input": {"file": str(f_path)}}
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / "out"
    rc = run_cli("resolve", "--config", str(cfg_path), "--out", str(out))
    assert rc == 0
    field = read_tsf1(out / "field.tsf1")
    assert float(np.abs(field.values).max()) > 0


def test_suite_accepts_p_inf(tmp_path):
    cfg = {"N": 128, "K": 12, "cases": 3, "seed": 5,
           "p_list": ["inf"], "q_list": [1.0], "alpha_list": [1.0]}
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / "out"
    rc = run_cli("suite", "AC", "--config", str(cfg_path), "--out", str(out))
    assert rc == 0
    report = json.loads((out / "report.json").read_text())
    assert any("p=inf" in k for k in report["bands"])


def test_paraproduct_with_bump_phi(tmp_path):
    cfg = {
        "n": 1, "N": 64, "K": 8, "space": {"q": 2.0, "dim": 1},
        "f": {"corpus": {"family": "bmo_log", "count": 1}},
        "u": {"corpus": {"family": "lp_random", "count": 1}},
        "phi": {"name": "gauss_bump"},
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / "out"
    assert run_cli("paraproduct", "--config", str(cfg_path), "--out", str(out)) == 0
    summary = json.loads((out / "paraproduct.json").read_text())
    assert summary["lp"]["2.0"] > 0
