import json
import subprocess
import sys

import numpy as np
import pytest

from qruler import cli
from qruler.fock import FockVector, MixedState


def run(tmp_path, *args):
    return cli.main([*args, "--out", str(tmp_path)])


def test_metrics_vacuum(tmp_path, capsys):
    assert run(tmp_path, "metrics", "--probe", "vacuum", "--tick", "vacuum") == cli.EXIT_OK
    m = json.loads((tmp_path / "metrics.json").read_text())
    assert m["tau_c"] == pytest.approx(1 / (2 * np.pi ** 3), rel=1e-8)
    assert m["parseval_gap"] < 1e-8
    assert "factor pi" in m["note"]


def test_gamma_csv_layout(tmp_path):
    assert run(tmp_path, "gamma", "--probe", "number:1", "--grid-points", "32") == 0
    lines = (tmp_path / "gamma.csv").read_text().splitlines()
    assert lines[0].startswith("# qruler") and "probe=number:1" in lines[0]
    assert lines[1] == "tau_x,tau_y,re_gamma,im_gamma"
    assert len(lines) == 2 + 32 * 32


def test_csv_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert run(d, "prob", "--probe", "squeezed:2", "--tick", "number:1", "--grid-points", "64") == 0
    assert (a / "prob.csv").read_bytes() == (b / "prob.csv").read_bytes()


def test_prob_columns_agree(tmp_path):
    assert run(tmp_path, "prob", "--probe", "number:2", "--tick", "vacuum", "--grid-points", "64") == 0
    data = np.loadtxt(tmp_path / "prob.csv", delimiter=",", skiprows=2)
    assert np.max(np.abs(data[:, 2] - data[:, 3])) < 1e-10


def test_usage_errors(tmp_path, capsys):
    assert run(tmp_path, "metrics", "--probe", "cat:3") == cli.EXIT_USAGE
    assert run(tmp_path, "metrics", "--grid-points", "15") == cli.EXIT_USAGE
    assert run(tmp_path, "verify", "--tolerance.nonsense", "1") == cli.EXIT_USAGE
    assert run(tmp_path, "bogus") == cli.EXIT_USAGE
    assert run(tmp_path, "metrics", "--probe", "mix:0.5*vacuum,0.2*number:1") == cli.EXIT_USAGE


def test_numeric_failure_exit(tmp_path, capsys):
    code = run(tmp_path, "prob", "--probe", "squeezed:0.1", "--tick", "squeezed:0.1",
               "--grid-extent", "3", "--grid-points", "64")
    assert code == cli.EXIT_NUMERIC
    assert "non-convergence" in capsys.readouterr().err


def test_verify_pass_and_forced_fail(tmp_path, capsys):
    assert run(tmp_path, "verify", "--suite", "povm") == cli.EXIT_OK
    report = json.loads((tmp_path / "verify_povm.json").read_text())
    assert report["passed"] and report["checks"]
    assert run(tmp_path, "verify", "--suite", "povm", "--tolerance.povm_trace=1e-300") == cli.EXIT_VERIFY
    report = json.loads((tmp_path / "verify_povm.json").read_text())
    assert report["failed"] == ["povm_trace_invariance"]


def test_yaml_config(tmp_path):
    cfg = tmp_path / "s.yaml"
    cfg.write_text("probe: squeezed:2\ntick: vacuum\ngrid: {extent: 6, points: 64}\n"
                   "outputs: [metrics, marginal]\n")
    assert cli.main(["run", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    assert (tmp_path / "metrics.json").exists() and (tmp_path / "marginal.csv").exists()
    m = json.loads((tmp_path / "metrics.json").read_text())
    assert m["tau_c"] == pytest.approx(np.sqrt(2) / 3 / np.pi ** 3, rel=1e-8)


def test_yaml_unknown_key(tmp_path):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("probe: vacuum\ncolour: blue\n")
    assert cli.main(["metrics", "--config", str(cfg)]) == cli.EXIT_USAGE
    cfg.write_text("grid: {extent: 6, size: 3}\n")
    assert cli.main(["metrics", "--config", str(cfg)]) == cli.EXIT_USAGE


def test_flags_override_config(tmp_path):
    cfg = tmp_path / "s.yaml"
    cfg.write_text("probe: number:3\n")
    assert cli.main(["metrics", "--config", str(cfg), "--probe", "vacuum", "--out", str(tmp_path)]) == 0
    m = json.loads((tmp_path / "metrics.json").read_text())
    assert m["tau_c"] == pytest.approx(1 / (2 * np.pi ** 3), rel=1e-8)


def test_parse_state_grammar():
    assert isinstance(cli.parse_state("vacuum"), FockVector)
    assert cli.parse_state("number:4").amplitudes[4] == 1
    m = cli.parse_state("mix:0.25*vacuum,0.75*number:1")
    assert isinstance(m, MixedState) and len(m.components) == 2
    for bad in ("number:x", "mix:vacuum", "squeezed:-1", "laser"):
        with pytest.raises((cli.ConfigError, Exception)):
            cli.parse_state(bad)


def test_mixed_metrics(tmp_path):
    assert run(tmp_path, "metrics", "--probe", "mix:0.5*vacuum,0.5*number:1", "--tick", "vacuum") == 0
    m = json.loads((tmp_path / "metrics.json").read_text())
    assert m["tau_c"] > 0


def test_figures(tmp_path):
    assert run(tmp_path, "figures", "--which", "2") == 0
    rows = np.loadtxt(tmp_path / "figure2.csv", delimiter=",", skiprows=2)
    assert np.all(np.diff(rows[:, 1]) < 0)


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "qruler", "metrics", "--grid-points", "32",
                           "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "tau_c" in proc.stdout
