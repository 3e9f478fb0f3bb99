"""CLI subcommands, config handling, exit codes, artifact files."""
import json
import os

import pytest

from treejacobi.cli import main, parse_coeffs, parse_z, ValidationError


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_coeffs_families():
    assert parse_coeffs("paper").family == "paper"
    c = parse_coeffs("constant:2:1")
    assert c.lam(5) == 2.0 and c.beta(0) == 1.0
    c = parse_coeffs("geometric:1:3")
    assert c.lam(2) == 9.0
    c = parse_coeffs("power:1:2")
    assert c.lam(2) == 9.0
    c = parse_coeffs("explicit:1,2,3:0,0,0")
    assert c.lam(2) == 3.0
    with pytest.raises(ValidationError):
        parse_coeffs("unknown:1")
    with pytest.raises(ValidationError):
        parse_coeffs("geometric:1")


def test_parse_z():
    assert parse_z("0,1", "float") == 1j
    exact = parse_z("1/2,-1/3", "exact")
    from fractions import Fraction
    assert exact.ar == Fraction(1, 2) and exact.ai == Fraction(-1, 3)
    with pytest.raises(ValidationError):
        parse_z("1", "float")


def test_polys_exact_alternation(capsys):
    code, out, err = run(["polys", "--coeffs", "paper", "--scale", "1",
                          "--z", "0,0", "--mode", "exact", "--n", "6"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n,Re p,Im p,Re q,Im q"
    ps = [float(line.split(",")[1]) for line in lines[1:]]
    assert ps == [1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0]


def test_polys_writes_file_atomically(tmp_path, capsys):
    out_file = tmp_path / "polys.csv"
    code, _, _ = run(["polys", "--n", "4", "--z", "0,1",
                      "--out", str(out_file)], capsys)
    assert code == 0
    assert out_file.exists()
    assert out_file.read_text().startswith("n,Re p")
    assert not [p for p in os.listdir(tmp_path) if p.startswith(".tmp")]


def test_classify_verdict_json(capsys):
    code, out, _ = run(["classify", "--coeffs", "paper", "--d", "2"], capsys)
    assert code == 0
    obj = json.loads(out)
    assert obj["verdict"] == "not_essentially_selfadjoint"


def test_classify_strict_inconclusive_exit_code(capsys):
    code, out, _ = run(["classify", "--coeffs", "paper", "--d", "2",
                        "--n-max", "5", "--strict"], capsys)
    assert code == 4
    assert json.loads(out)["verdict"] == "inconclusive"


def test_explicit_overrun_is_validation_error(capsys):
    code, _, err = run(["polys", "--coeffs", "explicit:1,2:0,0",
                        "--z", "0,1", "--n", "10"], capsys)
    assert code == 2
    assert "2" in err  # names the failing index range


def test_overflow_is_numeric_error_with_hint(capsys):
    code, _, err = run(["polys", "--coeffs", "geometric:1:1/4",
                        "--z", "0,1", "--n", "3000"], capsys)
    assert code == 3
    assert "exact" in err


def test_deficiency_artifact(tmp_path, capsys):
    out_file = tmp_path / "elem.json"
    code, _, _ = run(["deficiency", "--anchor", "1", "--depth", "12",
                      "--z", "0,1", "--out", str(out_file)], capsys)
    assert code == 0
    obj = json.loads(out_file.read_text())
    assert obj["residual"] <= 1e-10 * obj["max_abs"]
    assert obj["alpha_status"] == "converged"


def test_poisson_artifact(capsys):
    code, out, _ = run(["poisson", "--y", "1.2", "--z", "0,1"], capsys)
    assert code == 0
    obj = json.loads(out)
    assert len(obj["kernel"]["pieces"]) == 4  # depth-2 cells, d = 2
    assert obj["reproducing_residual_plain"] <= 1e-7
    assert obj["matching_convention"] in ("plain", "conjugated")


def test_lambda_artifact(capsys):
    code, out, _ = run(["lambda", "--n", "3", "--d", "2"], capsys)
    assert code == 0
    obj = json.loads(out)
    assert obj["count"] == 3
    assert obj["dimension"]["identity_holds"]
    for p in obj["eigenpairs"]:
        assert p["residual"] <= 1e-8


def test_oracle_artifact(capsys):
    code, out, _ = run(["oracle", "--n", "6"], capsys)
    assert code == 0
    obj = json.loads(out)
    assert obj["max_root_deviation"] < 1e-8
    assert obj["moments_agree"]
    assert obj["moments_matrix"][:3] == ["1", "1", "3"]


def test_paper_example_report(capsys):
    code, out, _ = run(["paper-example"], capsys)
    assert code == 0
    obj = json.loads(out)
    assert obj["overall_pass"]
    assert obj["checks"]["exact_alternation"]["pass"]
    assert obj["checks"]["scaled_series"]["verdict"] == "not_essentially_selfadjoint"
    assert obj["checks"]["classical_series"]["verdict"] == "essentially_selfadjoint"


def test_paper_example_small_budget_honest(capsys):
    code, out, _ = run(["paper-example", "--n-max", "5", "--strict"], capsys)
    assert code == 4
    obj = json.loads(out)
    assert obj["checks"]["scaled_series"]["verdict"] == "inconclusive"


def test_config_file_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[run]\ncoeffs = constant:1\nd = 2\nn-max = 400\n")
    code, out, _ = run(["classify", "--config", str(cfg)], capsys)
    assert code == 0
    assert json.loads(out)["verdict"] == "essentially_selfadjoint"
    # flag wins over the config value
    code, out, _ = run(["classify", "--config", str(cfg),
                        "--coeffs", "paper"], capsys)
    assert json.loads(out)["verdict"] == "not_essentially_selfadjoint"


def test_config_unknown_key_rejected(tmp_path, capsys):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[run]\nnonsense = 1\n")
    code, _, err = run(["classify", "--config", str(cfg)], capsys)
    assert code == 2
    assert "nonsense" in err


def test_missing_config_rejected(capsys):
    code, _, err = run(["classify", "--config", "/nonexistent.ini"], capsys)
    assert code == 2
