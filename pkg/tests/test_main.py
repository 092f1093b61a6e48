# tests/test_main.py

import json

import pytest

from autocat.main import main
from autocat.schemas.run_config import OUTPUT_DIR_ENV


@pytest.fixture(autouse=True)
def _no_env_override(monkeypatch):
    monkeypatch.delenv(OUTPUT_DIR_ENV, raising=False)


def test_classify(capsys):
    assert main(["classify", "--m", "0.5", "--n", "0.25"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["tag"] == "C1"
    assert "case1-fold-bound" in out["results"]


def test_classify_rejects_large_m(capsys):
    assert main(["classify", "--m", "1.5", "--n", "1"]) == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "ParameterError"


def test_thresholds_table(capsys):
    assert main(["thresholds", "--m", "1", "--n", "1.5", "--cells", "64"]) == 0
    out = capsys.readouterr().out
    assert "threshold_caseVI" in out
    assert "n/a (regime)" in out


def test_solve_from_config(tmp_path, capsys):
    out_dir = tmp_path / "out"
    config = tmp_path / "run.ini"
    config.write_text(
        "[problem]\nm = 0.5\nn = 0.75\nlambda = 0\n"
        "[domain]\ncells = 32\n"
        f"[output]\ndirectory = {out_dir}\n"
    )
    assert main(["solve", "--config", str(config)]) == 0
    assert (out_dir / "solution.csv").is_file()
    report = json.loads((out_dir / "solution.json").read_text())
    assert report["converged"]
    assert report["diagnostics"]["reread_residual"] <= 1e-9
    assert json.loads(capsys.readouterr().out)["solution_file"] == "solution.csv"


def test_solve_rejects_unknown_key(tmp_path, capsys):
    config = tmp_path / "run.ini"
    config.write_text("[problem]\nm = 0.5\nn = 0.75\nmu = 2\n")
    assert main(["solve", "--config", str(config)]) == 2
    assert json.loads(capsys.readouterr().err)["error"] == "ConfigError"


def test_verify_single_scenario(tmp_path, capsys):
    assert main(["verify", "--scenario", "case2-equal-exponent-verdict", "--output-dir", str(tmp_path)]) == 0
    assert "| case2-equal-exponent-verdict | passed |" in capsys.readouterr().out
    assert (tmp_path / "case2-equal-exponent-verdict.md").is_file()
    assert (tmp_path / "case2-equal-exponent-verdict" / "report.json").is_file()


def test_verify_unknown_scenario(tmp_path, capsys):
    assert main(["verify", "--scenario", "nope", "--output-dir", str(tmp_path)]) == 3
    assert json.loads(capsys.readouterr().err)["error"] == "ScenarioError"


def test_diagram_list(capsys):
    assert main(["diagram", "--list"]) == 0
    assert "C4-critical" in json.loads(capsys.readouterr().out)


def test_diagram_without_figure(capsys):
    assert main(["diagram"]) == 2


def test_diagram_unknown_preset(tmp_path, capsys):
    assert main(["diagram", "--figure", "C9", "--output-dir", str(tmp_path)]) == 2
    assert json.loads(capsys.readouterr().err)["error"] == "ParameterError"


def test_branch_sweep_from_config(tmp_path, capsys):
    out_dir = tmp_path / "out"
    config = tmp_path / "branch.ini"
    config.write_text(
        "[problem]\nm = 0.5\nn = 0.75\nlambdas = -1.0, 0.0, 0.5, 0.9\n"
        "[domain]\ncells = 64\n"
        f"[output]\ndirectory = {out_dir}\n"
    )
    assert main(["branch", "--config", str(config)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["points"] == 4
    assert out["termination"] == "sweep_complete"
    assert (out_dir / "branch.csv").is_file()
    assert (out_dir / "branch_folds.json").is_file()


def test_shoot_fixed_height(tmp_path, capsys):
    out_dir = tmp_path / "out"
    config = tmp_path / "shoot.json"
    config.write_text(
        json.dumps(
            {
                "problem": {"m": 0.5, "n": 0.25, "lambda": 0.3},
                "shoot": {"a": 0.5},
                "output": {"directory": str(out_dir)},
            }
        )
    )
    assert main(["shoot", "--config", str(config)]) == 0
    assert (out_dir / "profile.csv").is_file()
    assert json.loads(capsys.readouterr().out)["files"]
