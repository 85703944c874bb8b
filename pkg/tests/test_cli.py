import csv
import io
import json

import numpy as np
import pytest

from bec2model.cli import OUTPUT_DIR_ENV, UsageError, build_config, main


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_distribution_three_series(capsys):
    code, out, _ = _run(capsys, "distribution", "--n", "1000", "--theta", "1", "--m0", "1000", "--m0", "998",
                        "--m0", "996")
    assert code == 0
    rows = _rows(out)
    assert {r["series"] for r in rows} == {"m0=1000", "m0=998", "m0=996"}
    assert len(rows) == 3 * 1001
    total = sum(float(r["P0"]) for r in rows if r["series"] == "m0=1000")
    assert total == pytest.approx(1, abs=1e-10)


def test_zero_angle_gives_delta_peak(capsys):
    code, out, _ = _run(capsys, "distribution", "--n", "6", "--theta", "0", "--m0", "2")
    rows = _rows(out)
    assert [float(r["P0"]) for r in rows] == [0, 0, 0, 0, 1, 0, 0]


def test_perturb_coefficients_and_overlay(capsys):
    code, out, _ = _run(capsys, "perturb", "--n", "20", "--theta", "1", "--m0", "20", "--kind", "Lambda",
                        "--delta", "0.1")
    assert code == 0
    rows = _rows(out)
    assert [float(r["m"]) for r in rows] == [16, 18]
    code, out, _ = _run(capsys, "distribution", "--n", "200", "--theta", "1", "--m0", "200", "--kind", "Lambda",
                        "--delta", "0.1")
    rows = _rows(out)
    assert {"m", "P0", "P01"} <= set(rows[0])
    assert any(float(r["P0"]) != float(r["P01"]) for r in rows)


def test_output_is_deterministic(capsys):
    argv = ["entropy-surface", "--n", "12", "--n-theta", "7", "--kind", "mu", "--delta", "0.01",
            "--format", "json"]
    _, a, _ = _run(capsys, *argv)
    _, b, _ = _run(capsys, *argv)
    assert a == b
    doc = json.loads(a)
    assert set(doc) == {"config", "meta", "panels"}
    assert doc["config"]["kind"] == "mu"


def test_flags_override_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("n = 8\ntheta = 0.5\nm0 = 4, 2  # two series\nformat = json\n")
    c = build_config(["distribution", "--config", str(cfg), "--n", "6"])
    assert (c.n, c.theta, c.m0, c.format) == (6, 0.5, [4, 2], "json")
    c = build_config(["distribution", "--config", str(cfg)])
    assert c.n == 8
    assert build_config(["distribution"]).n == 10


def test_environment_output_directory(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path / "out"))
    code, out, _ = _run(capsys, "count")
    assert code == 0 and out == ""
    text = (tmp_path / "out" / "count.csv").read_text()
    assert text.splitlines()[0] == "n_body,n_model,general,missed"
    explicit = tmp_path / "x.json"
    _run(capsys, "count", "--format", "json", "--out", str(explicit))
    assert json.loads(explicit.read_text())["meta"]["rule"] == "couplings"


@pytest.mark.parametrize("argv, fragment", [
    (["distribution", "--n", "4", "--m0", "3"], "not an allowed label"),
    (["perturb", "--n", "4", "--m0", "4"], "needs --kind"),
    (["loss", "--n", "4"], "needs --alpha or --sigma"),
    (["loss", "--n", "6", "--alpha", "2=0.1", "--sigma", "0.1"], "not both"),
    (["entropy-surface", "--n", "4", "--n-theta", "0"], "grid sizes"),
])
def test_usage_errors_exit_two(capsys, argv, fragment):
    code, _, err = _run(capsys, *argv)
    assert code == 2 and fragment in err


def test_bad_config_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    code, _, err = _run(capsys, "count", "--config", str(cfg))
    assert code == 2 and "unknown config key" in err
    with pytest.raises(UsageError):
        build_config(["count", "--config", str(tmp_path / "missing.cfg")])


def test_dynamics_breakdown_flag(capsys):
    code, out, _ = _run(capsys, "dynamics", "--n", "50", "--theta", "1", "--kind", "omega", "--delta", "0.05",
                        "--t-steps", "401", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["meta"]["breakdown"] is True


def test_degenerate_levels_and_distribution(capsys):
    code, out, _ = _run(capsys, "degenerate", "--n", "1000", "--kind", "omega", "--delta", "1", "--n-theta", "5")
    rows = _rows(out)
    assert code == 0 and float(rows[0]["eps_plus"]) == 1000 and float(rows[0]["eps_minus"]) == 998
    code, out, _ = _run(capsys, "degenerate", "--n", "20", "--kind", "lambda", "--delta", "0.01", "--theta", "1")
    assert code == 0 and "P01" in out.splitlines()[0]


def test_loss_methods_agree(capsys):
    outs = []
    for method in ("closed-form", "analytic", "oracle"):
        _, out, _ = _run(capsys, "loss", "--n", "12", "--theta", "1", "--m0", "12", "--alpha", "2=-0.1",
                         "--alpha", "4=-0.001", "--method", method)
        outs.append(np.array([float(r["P01"]) for r in _rows(out)]))
    assert np.abs(outs[0] - outs[2]).max() < 1e-10 and np.abs(outs[1] - outs[2]).max() < 1e-10


def test_verify_passes(capsys):
    code, out, err = _run(capsys, "verify", "--max-n", "8")
    assert code == 0
    assert err.count("PASS") == len(_rows(out)) and "FAIL" not in err
