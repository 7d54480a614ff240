import json
import subprocess
import sys

import numpy as np
import pytest

from epiq.cli import RunReport, emit, main
from epiq.inference import binomial_experiment


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# --- emit -------------------------------------------------------------------------


def test_emit_empty_report_json():
    text = emit(RunReport(scenario="born"), "json")
    doc = json.loads(text)
    assert doc["parameters"] == {}
    assert doc["results"] == {}
    assert doc["scenario"] == "born"
    assert list(doc) == sorted(doc)


def test_emit_single_result_csv_has_one_column():
    text = emit(RunReport(scenario="x", results={"value": 1.25}), "csv")
    lines = text.strip().split("\n")
    assert lines[0] == "value"
    assert lines[1] == "1.25"


def test_emit_csv_float_precision():
    text = emit(RunReport(scenario="x", results={"v": np.pi}), "csv")
    assert text.strip().split("\n")[1] == f"{np.pi:.12g}"


def test_emit_json_round_trip():
    report = RunReport(
        scenario="born",
        parameters={"pairs": 10},
        results={"a": 0.5, "b": 2},
        seed=3,
        elapsed_ms=17,
    )
    doc = json.loads(emit(report, "json"))
    back = RunReport(
        scenario=doc["scenario"],
        parameters=doc["parameters"],
        results=doc["results"],
        seed=doc["seed"],
        elapsed_ms=doc["elapsed_ms"],
    )
    assert back == report


# --- scenario runs -----------------------------------------------------------------


def test_born_scenario(capsys):
    code, out, _ = run_cli(capsys, "born", "--n", "50", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["results"]["max_abs_diff"] < 1e-12
    assert doc["results"]["p_120deg"] == pytest.approx(0.25, abs=1e-12)


def test_chsh_scenario_optimize(capsys):
    code, out, _ = run_cli(capsys, "chsh", "--optimize", "--grid", "36", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["results"]["value"] == pytest.approx(2.828427, abs=1e-5)
    assert doc["results"]["classical_max"] == 2.0


def test_mermin_scenario(capsys):
    code, out, _ = run_cli(
        capsys, "mermin", "--model", "quantum", "--n", "100000", "--seed", "42", "--json"
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["results"]["same_switch_freq"] == 1.0
    assert abs(doc["results"]["overall_freq"] - 0.5) < 0.01


def test_example17_scenario(capsys):
    code, out, _ = run_cli(capsys, "example17", "--n", "50000", "--seed", "7", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["results"]["group"] == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert 0.3 < doc["results"]["bayes"] < 0.5


def test_busch_scenario(capsys):
    code, out, _ = run_cli(capsys, "busch", "--dim", "3", "--n", "2", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["results"]["max_roundtrip_error"] < 1e-10


def test_birnbaum_scenario_default(capsys):
    code, out, _ = run_cli(capsys, "birnbaum", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["results"]["c"] == pytest.approx(5.0, rel=1e-10)
    assert doc["results"]["mixture_sufficient"] == 1.0


def test_birnbaum_scenario_with_input(capsys, tmp_path):
    e = binomial_experiment(4, (0.2, 0.8))
    doc = {
        "e1": json.loads(e.to_json()),
        "e2": json.loads(e.to_json()),
        "z1": 2,
        "z2": 2,
    }
    path = tmp_path / "pair.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run_cli(capsys, "birnbaum", "--input", str(path), "--json")
    assert code == 0
    assert json.loads(out)["results"]["c"] == pytest.approx(1.0)


def test_reml_scenario(capsys, tmp_path):
    path = tmp_path / "lm.json"
    path.write_text(json.dumps({"y": [1.0, 2.0, 3.0], "x": [[1.0], [1.0], [1.0]]}))
    code, out, _ = run_cli(capsys, "reml", "--input", str(path), "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["results"]["sigma2"] == pytest.approx(1.0, abs=1e-12)
    assert doc["results"]["basis_spread"] < 1e-10


def test_multinomial_scenario(capsys):
    code, out, _ = run_cli(capsys, "multinomial", "--theta", "0.0", "--n", "600", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["results"]["avar_rel_diff"] > 0.01


def test_entropy_scenario_with_input(capsys, tmp_path):
    path = tmp_path / "joint.json"
    path.write_text(json.dumps({"table": [[0.5, 0.0], [0.0, 0.5]]}))
    code, out, _ = run_cli(capsys, "entropy", "--input", str(path), "--json")
    assert code == 0
    assert json.loads(out)["results"]["correlation"] == pytest.approx(np.log(2.0), abs=1e-12)


def test_orbits_scenario_with_input(capsys, tmp_path):
    path = tmp_path / "action.json"
    path.write_text(json.dumps({"space": [0, 1, 2], "elements": [[0, 1, 2], [1, 0, 2]]}))
    code, out, _ = run_cli(capsys, "orbits", "--input", str(path), "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["results"]["n_orbits"] == 2
    assert doc["results"]["transitive"] == 0.0


def test_nelson_scenario_small(capsys, tmp_path):
    path = tmp_path / "paths.csv"
    code, out, _ = run_cli(
        capsys, "nelson", "--n", "5000", "--seed", "1", "--json", "--out-csv", str(path)
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["results"]["rel_err"] < 0.1
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "path_id,x_final"
    assert len(lines) == 5001


def test_theorem6_scenario(capsys):
    code, out, _ = run_cli(capsys, "theorem6", "--json")
    assert code == 0
    doc = json.loads(out)
    assert 1.7 <= doc["results"]["min_ratio"] <= doc["results"]["max_ratio"] <= 2.3


# --- report contract -----------------------------------------------------------------


def test_identical_invocations_identical_results(capsys):
    _, out1, _ = run_cli(capsys, "mermin", "--n", "20000", "--seed", "9", "--json")
    _, out2, _ = run_cli(capsys, "mermin", "--n", "20000", "--seed", "9", "--json")
    assert json.loads(out1)["results"] == json.loads(out2)["results"]


def test_out_flag_writes_file(capsys, tmp_path):
    path = tmp_path / "report.json"
    code, out, _ = run_cli(capsys, "theorem6", "--n", "1", "--json", "--out", str(path))
    assert code == 0
    assert out == ""
    doc = json.loads(path.read_text())
    assert doc["scenario"] == "theorem6"


def test_unknown_scenario_exits_2(capsys):
    assert main(["warp-drive"]) == 2


def test_scenario_runner_raises_unknown():
    from epiq.cli import scenario_runner
    from epiq.errors import UnknownScenario

    with pytest.raises(UnknownScenario):
        scenario_runner("warp-drive")


def test_bad_dim_flag_exits_2(capsys):
    code, _, err = run_cli(capsys, "busch", "--dim", "1")
    assert code == 2
    assert "dim" in err


def test_bad_flag_exits_2(capsys):
    assert main(["born", "--bogus"]) == 2


def test_bad_input_file_exits_2(capsys):
    code, _, err = run_cli(capsys, "orbits", "--input", "/nonexistent.json")
    assert code == 2
    assert "error:" in err


def test_invalid_action_input_exits_2(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"space": [0, 1], "elements": [[1, 0]]}))  # no identity
    code, _, err = run_cli(capsys, "orbits", "--input", str(path))
    assert code == 2
    assert "error:" in err


def test_check_passing_scenario_exits_0(capsys):
    code, _, err = run_cli(capsys, "birnbaum", "--check")
    assert code == 0
    assert "C6 [PASS]" in err


def test_check_failing_scenario_exits_3(capsys):
    # the contrast-sign target window is documented-red (see test_acceptance),
    # which makes it a stable probe of the exit-3 path
    code, _, err = run_cli(capsys, "example17", "--n", "100000", "--check")
    assert code == 3
    assert "C5 [FAIL]" in err


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "epiq", "entropy", "--json"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    doc = json.loads(proc.stdout)
    assert doc["results"]["c_correlated_binary"] == pytest.approx(np.log(2.0), abs=1e-12)
