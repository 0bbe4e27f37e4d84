import csv
import io
import json
from pathlib import Path

import numpy as np
import pytest

from cevm.cli import main
from cevm.harness import CSV_COLUMNS, ConfigError, ExperimentConfig, run, verify_suite
from cevm.samplefile import read_samples

ROOT = Path(__file__).resolve().parents[1]
ACCEPTANCE = ROOT / "configs" / "acceptance"


def _cfg(**over):
    d = {
        "name": "small_beta_min",
        "model": {"name": "beta_min", "a": 1.0, "b": 1.0},
        "n": 400_000,
        "seed": 7,
        "t_grid": [100.0],
        "y_grid": [1.0, 2.0],
        "k_policy": {"rule": "fixed", "k": 300},
        "joint_grid": [[2.0, 1.0]],
        "expect_case": "IIa",
        "tolerances": {"index_abs": 0.1, "constant_rel": 0.15},
    }
    d.update(over)
    return d


def _write(tmp_path, d, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(d))
    return p


def _rows(csv_path):
    with open(csv_path, newline="") as fh:
        return list(csv.DictReader(fh))


# ---------------------------------------------------------------- config validation


@pytest.mark.parametrize("over,msg", [
    ({"n": 500}, "10 \\* max"),
    ({"seed": -1}, "64-bit"),
    ({"seed": 2 ** 64}, "64-bit"),
    ({"t_grid": []}, "t_grid"),
    ({"t_grid": [-1.0]}, "t_grid"),
    ({"tolerances": {"constant_rel": 0.1}}, "index"),
    ({"bogus": 1}, "unknown config fields"),
    ({"model": {"name": "nope"}}, "bad model spec"),
    ({"checks": ["index", "telepathy"]}, "checks"),
    ({"expect_case": "V"}, "expect_case"),
    ({"z_grid": [1.0]}, "not both"),
    ({"k_policy": {"rule": "fixed", "k": 10 ** 7}}, "k out of range"),
])
def test_config_errors(over, msg):
    with pytest.raises(ConfigError, match=msg):
        ExperimentConfig.from_json(_cfg(**over))


def test_report_rows_and_predicted_constant():
    rep = run(ExperimentConfig.from_json(_cfg()))
    rows = {(r.quantity, r.z): r for r in rep.rows}
    st = rows[("scaled_tail", 1.0)]
    assert st.predicted == pytest.approx(0.375, abs=1e-12)
    assert rows[("scaled_tail", 2.0)].predicted == pytest.approx(0.09375, abs=1e-12)
    assert rows[("case", None)].verdict == "pass"
    quantities = {r.quantity for r in rep.rows}
    assert {"case", "pivot", "hill_xi", "scaled_tail", "joint_measure"} <= quantities
    assert rep.passed and rep.exit_code == 0


def test_no_silent_skips():
    # Case II(b) has no closed-form product constant: rows appear as skipped
    d = _cfg(model={"name": "coupled_negative", "rho": -1.0, "gamma": -2.0, "variant": "IIb", "u": 1.0},
             expect_case="IIb", tolerances={"index_rel": 0.2})
    rep = run(ExperimentConfig.from_json(d))
    st = [r for r in rep.rows if r.quantity == "scaled_tail"]
    assert len(st) == 2 and all(r.verdict.startswith("skipped: ") for r in st)

    rep = run(ExperimentConfig.from_json(_cfg(checks=["index"])))
    st = [r for r in rep.rows if r.quantity == "scaled_tail"]
    assert len(st) == 2 and all(r.verdict == "skipped: disabled in config" for r in st)


def test_wrong_expected_case_fails():
    rep = run(ExperimentConfig.from_json(_cfg(expect_case="IIb")))
    assert not rep.passed


# ---------------------------------------------------------------- CLI exit codes


def test_verify_malformed_json_exits_2(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert main(["verify", "--config", str(p), "--out-dir", str(tmp_path / "o")]) == 2


def test_verify_empty_directory_exits_2(tmp_path):
    d = tmp_path / "empty"
    d.mkdir()
    assert main(["verify", "--config", str(d), "--out-dir", str(tmp_path / "o")]) == 2


def test_unreachable_tolerance_exits_1(tmp_path):
    p = _write(tmp_path, _cfg(tolerances={"index_abs": 0.0}))
    assert main(["verify", "--config", str(p), "--out-dir", str(tmp_path / "o")]) == 1


def test_verify_success_exits_0_and_writes_outputs(tmp_path):
    p = _write(tmp_path, _cfg())
    out = tmp_path / "o"
    assert main(["verify", "--config", str(p), "--out-dir", str(out)]) == 0
    assert (out / "small_beta_min.md").read_text().startswith("# Verification report")
    rows = _rows(out / "small_beta_min.csv")
    assert tuple(rows[0].keys()) == CSV_COLUMNS
    assert (out / "small_beta_min.series.csv").exists()


def test_bad_arguments_exit_2(tmp_path):
    assert main(["verify"]) == 2
    assert main(["frobnicate"]) == 2
    p = _write(tmp_path, _cfg())
    assert main(["verify", "--config", str(p), "--workers", "0"]) == 2


def test_suite_with_one_failing_config_exits_1(tmp_path):
    suite = tmp_path / "suite"
    suite.mkdir()
    _write(suite, _cfg(name="a_ok"), "a.json")
    _write(suite, _cfg(name="b_bad", tolerances={"index_abs": 0.0}), "b.json")
    out = tmp_path / "o"
    assert main(["verify", "--config", str(suite), "--out-dir", str(out)]) == 1
    summary = (out / "summary.md").read_text()
    assert summary.index("a_ok") < summary.index("b_bad")
    assert main(["report", "--out-dir", str(out)]) == 1


def test_suite_honors_per_config_seeds(tmp_path):
    suite = tmp_path / "suite"
    suite.mkdir()
    _write(suite, _cfg(name="s1", seed=1), "1.json")
    _write(suite, _cfg(name="s2", seed=2), "2.json")
    code, reports = verify_suite(suite, tmp_path / "o")
    assert code == 0
    assert [r.config.seed for r in reports] == [1, 2]
    assert reports[0].csv_text() != reports[1].csv_text()


def test_suite_rejects_duplicate_names(tmp_path):
    suite = tmp_path / "suite"
    suite.mkdir()
    _write(suite, _cfg(), "1.json")
    _write(suite, _cfg(), "2.json")
    assert main(["verify", "--config", str(suite), "--out-dir", str(tmp_path / "o")]) == 2


def test_seed_override(tmp_path):
    p = _write(tmp_path, _cfg())
    main(["verify", "--config", str(p), "--out-dir", str(tmp_path / "a")])
    main(["verify", "--config", str(p), "--out-dir", str(tmp_path / "b"), "--seed", "99"])
    assert (tmp_path / "a" / "small_beta_min.csv").read_bytes() != (tmp_path / "b" / "small_beta_min.csv").read_bytes()


# ---------------------------------------------------------------- determinism


def test_csv_is_byte_identical_across_runs_and_workers(tmp_path):
    # several sampling blocks so that the thread pool actually splits work
    p = _write(tmp_path, _cfg(n=3 * 2 ** 18 + 5))
    outs = []
    for tag, workers in (("a", "1"), ("b", "1"), ("c", "8")):
        out = tmp_path / tag
        assert main(["verify", "--config", str(p), "--out-dir", str(out), "--workers", workers]) == 0
        outs.append((out / "small_beta_min.csv").read_bytes() + (out / "small_beta_min.series.csv").read_bytes())
    assert outs[0] == outs[1] == outs[2]


# ---------------------------------------------------------------- other subcommands


def test_classify(tmp_path, capsys):
    p = _write(tmp_path, {"rho": -1.0, "gamma": -2.0, "beta_inf": 0.0, "b_inf": 0.0})
    assert main(["classify", "--config", str(p), "--out-dir", str(tmp_path)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["case"] == "IIb" and out["prediction"]["rv_index"] == pytest.approx(-1 / 3)
    assert json.loads((tmp_path / "classification.json").read_text()) == out


def test_classify_unsupported_and_invalid(tmp_path, capsys):
    p = _write(tmp_path, {"rho": 1.0, "gamma": 0.0})
    assert main(["classify", "--config", str(p)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["case"] == "Unsupported" and out["reason"] == "gamma-zero"
    p = _write(tmp_path, {"rho": 1.0, "gamma": -1.0})
    assert main(["classify", "--config", str(p)]) == 2


def test_classify_accepts_experiment_configs(capsys):
    assert main(["classify", "--config", str(ACCEPTANCE / "05_case4_beta1.json")]) == 0
    assert json.loads(capsys.readouterr().out)["case"] == "IV"


@pytest.mark.parametrize("fmt", ["bin", "csv"])
def test_simulate_matches_library_sampler(tmp_path, fmt):
    spec = {"name": "case4", "rho": -1.0, "gamma": 1.0, "beta_inf": 1.0}
    p = _write(tmp_path, spec)
    assert main(["simulate", "--config", str(p), "--n", "1000", "--seed", "5",
                 "--format", fmt, "--out-dir", str(tmp_path)]) == 0
    x, y = read_samples(tmp_path / f"samples.{fmt}")
    from cevm.model_zoo import model_from_json
    x0, y0 = model_from_json(spec).sample(5, 1000)
    assert np.array_equal(x, x0) and np.array_equal(y, y0)


def test_simulate_needs_n(tmp_path):
    p = _write(tmp_path, {"name": "case4", "rho": -1.0, "gamma": 1.0, "beta_inf": 1.0})
    assert main(["simulate", "--config", str(p), "--out-dir", str(tmp_path)]) == 2


def test_estimate_pipeline(tmp_path, capsys):
    spec = {"name": "mrv_power", "rho": 1.0, "gamma": 1.0, "w": 0.5}
    p = _write(tmp_path, spec)
    assert main(["simulate", "--config", str(p), "--n", "200000", "--seed", "3",
                 "--out-dir", str(tmp_path)]) == 0
    capsys.readouterr()
    samples = str(tmp_path / "samples.bin")
    assert main(["estimate", "--input", samples, "--config", str(p), "--quantity", "hill", "--k", "400"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert rows[0]["quantity"] == "hill_xi:pivot"
    assert abs(float(rows[0]["estimate"]) - 2.0) < 0.4

    assert main(["estimate", "--input", samples, "--config", str(p), "--quantity", "scaled-tail",
                 "--t", "100", "--z", "1", "4", "--out-dir", str(tmp_path / "e")]) == 0
    rows = _rows(tmp_path / "e" / "estimates.csv")
    assert [float(r["z"]) for r in rows] == [1.0, 4.0]
    assert abs(float(rows[0]["estimate"]) - 0.5) < 4 * float(rows[0]["se"])

    assert main(["estimate", "--input", samples, "--variable", "x", "--quantity", "regression"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert abs(float(rows[0]["estimate"]) - 1.0) < 0.2


def test_estimate_errors(tmp_path):
    bad = tmp_path / "x.bin"
    bad.write_bytes(b"nope")
    assert main(["estimate", "--input", str(bad), "--variable", "x"]) == 2
    good = tmp_path / "s.csv"
    good.write_text("x,y\n1,2\n3,4\n")
    assert main(["estimate", "--input", str(good), "--variable", "pivot"]) == 2
    assert main(["estimate", "--input", str(good), "--variable", "x", "--quantity", "scaled-tail"]) == 2


def test_report_without_results_exits_2(tmp_path):
    assert main(["report", "--out-dir", str(tmp_path)]) == 2


def test_report_aggregates(tmp_path, capsys):
    p = _write(tmp_path, _cfg())
    out = tmp_path / "o"
    main(["verify", "--config", str(p), "--out-dir", str(out)])
    assert main(["report", "--out-dir", str(out)]) == 0
    assert "small_beta_min" in capsys.readouterr().out
