"""Command-line front end: artifacts, config precedence, exit codes, and
byte determinism."""

import json

import numpy as np
import pytest
from click.testing import CliRunner

import circinv
from circinv.cli import main

runner = CliRunner()

FAST = ["--modes", "16", "--grid", "256"]


def _run(args):
    return runner.invoke(main, args)


def test_help_lists_commands_and_defaults():
    res = _run(["--help"])
    assert res.exit_code == 0
    for cmd in ("invariant", "oracle-compare", "derivative-check", "spectrum",
                "injectivity", "reconstruct", "stability", "invariance-suite"):
        assert cmd in res.output
    res = _run(["stability", "--help"])
    assert res.exit_code == 0
    assert "default 1.0" in res.output       # r default documented
    assert "flags override it" in res.output  # config precedence documented


def test_invariant_command(tmp_path):
    res = _run(["invariant", "--r", "1.0", "--out", str(tmp_path)] + FAST)
    assert res.exit_code == 0
    lens = 2 * np.pi / 3 - np.sqrt(3) / 2
    got_min = float(res.output.split("min=")[1].split()[0])
    assert got_min == pytest.approx(lens, abs=1e-12)
    csv = (tmp_path / "invariant.csv").read_text().strip().split("\n")
    assert csv[0] == "phi,I_r,m,p"
    assert len(csv) == 257
    meta = json.loads((tmp_path / "invariant.json").read_text())
    assert meta["r"] == 1.0


def test_spectrum_command(tmp_path):
    res = _run(["spectrum", "--r", "1.0", "--modes", "8", "--out",
                str(tmp_path)])
    assert res.exit_code == 0
    rows = (tmp_path / "spectrum.csv").read_text().strip().split("\n")
    assert rows[0] == "j,d_j"
    vals = {int(r.split(",")[0]): float(r.split(",")[1]) for r in rows[1:]}
    assert vals[1] == 0.0
    assert vals[2] == pytest.approx(-np.sqrt(3) / 2, abs=1e-14)
    meta = json.loads((tmp_path / "spectrum.json").read_text())
    assert meta["theta"] == pytest.approx(np.pi / 3, abs=1e-14)


def test_oracle_compare_command(tmp_path):
    curve_file = tmp_path / "curve.json"
    rng = np.random.default_rng(2)
    circinv.save_curve(circinv.sample_perturbed_circle(
        rng, 0.02, n_modes=16, grid_size=256), curve_file)
    res = _run(["oracle-compare", "--curve", str(curve_file), "--r", "1.0",
                "--out", str(tmp_path)])
    assert res.exit_code == 0
    meta = json.loads((tmp_path / "oracle_compare.json").read_text())
    assert meta["max_abs_diff"] <= 1e-6
    assert "max_abs_diff=" in res.output


def test_invariance_suite_command(tmp_path):
    res = _run(["invariance-suite", "--seed", "7", "--out", str(tmp_path)]
               + FAST)
    assert res.exit_code == 0
    assert "[pass]" in res.output
    rep = json.loads((tmp_path / "invariance.json").read_text())
    assert rep["max_dev"] <= 1e-9


def test_derivative_check_command(tmp_path):
    res = _run(["derivative-check", "--pairs", "2", "--out", str(tmp_path)]
               + FAST)
    assert res.exit_code == 0
    meta = json.loads((tmp_path / "derivative_check.json").read_text())
    assert meta["max_rel_err_1e-4"] < 1e-6
    assert meta["mean_slope"] == pytest.approx(2.0, abs=0.1)


def test_injectivity_command(tmp_path):
    res = _run(["injectivity", "--modes", "8", "--grid", "128", "--out",
                str(tmp_path)])
    assert res.exit_code == 0
    meta = json.loads((tmp_path / "injectivity.json").read_text())
    assert meta["constrained_margin"] >= 0.01
    assert meta["unconstrained_margin"] < 1e-8
    assert meta["sine_check"]["all_nonzero"]
    rows = (tmp_path / "operator.csv").read_text().strip().split("\n")
    assert len(rows) == 17


def test_reconstruct_command(tmp_path):
    res = _run(["reconstruct", "--seed", "3", "--out", str(tmp_path)] + FAST)
    assert res.exit_code == 0
    rep = json.loads((tmp_path / "reconstruct.json").read_text())
    assert rep["recovery_dev"] < 1e-5
    trace = json.loads((tmp_path / "reconstruct_trace.json").read_text())
    assert trace[-1]["residual"] == rep["final_residual"]
    assert (tmp_path / "reconstructed_curve.json").exists()


def test_stability_command_and_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ["stability", "--pairs", "3", "--seed", "11", "--out"]
    r1 = _run(args + [str(a)] + FAST)
    r2 = _run(args + [str(b)] + FAST)
    assert r1.exit_code == r2.exit_code == 0
    assert r1.output == r2.output
    for name in ("stability.json", "stability_pairs.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    # a different seed must actually change the artifacts
    c = tmp_path / "c"
    r3 = _run(["stability", "--pairs", "3", "--seed", "12", "--out", str(c)]
              + FAST)
    assert (a / "stability_pairs.csv").read_bytes() != \
        (c / "stability_pairs.csv").read_bytes()


def test_config_file_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"r": 0.8, "pairs": 3, "modes": 16,
                               "grid": 256, "seed": 11}))
    res = _run(["stability", "--config", str(cfg), "--seed", "12", "--out",
                str(tmp_path)])
    assert res.exit_code == 0
    meta = json.loads((tmp_path / "stability.json").read_text())
    assert meta["r"] == 0.8      # from config file
    assert meta["seed"] == 12    # flag overrides config
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"bogus": 1}))
    res = _run(["stability", "--config", str(bad)])
    assert res.exit_code == 2


def test_numerical_failure_emits_error_json(tmp_path):
    res = _run(["invariant", "--r", "2.5", "--out", str(tmp_path)] + FAST)
    assert res.exit_code == 1
    payload = json.loads(res.stderr)
    assert payload["error"] == "TopologyError"
    assert payload["operation"] == "invariant.invariant_analytic"
    res = _run(["invariant", "--r", "-1", "--out", str(tmp_path)] + FAST)
    assert res.exit_code == 1
    assert json.loads(res.stderr)["error"] == "ParameterError"


def test_usage_errors_exit_two():
    assert _run(["invariant", "--bogus"]).exit_code == 2
    assert _run(["no-such-command"]).exit_code == 2
    assert _run(["invariant", "--r", "abc"]).exit_code == 2
