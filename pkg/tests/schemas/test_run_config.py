# tests/schemas/test_run_config.py

import json

import pytest

from autocat.errors import ConfigError
from autocat.schemas.run_config import OUTPUT_DIR_ENV, load_run_config, parse_run_config

INI = """
[problem]
m = 0.5
n = 0.75
lambda = -0.25
lambdas = -1.0, 0.0, 0.5

[domain]
size = 2.0
cells = 32

[solver]
method = newton
tol = 1e-9

[continuation]
direction = -1
lam_min = -3

[output]
directory = out
formats = csv
"""


@pytest.fixture(autouse=True)
def _no_env_override(monkeypatch):
    monkeypatch.delenv(OUTPUT_DIR_ENV, raising=False)


def test_parse_ini():
    cfg = parse_run_config(INI)
    assert cfg.problem.lam == -0.25
    assert cfg.problem.lambdas == [-1.0, 0.0, 0.5]
    assert cfg.problem.params().n == 0.75
    assert cfg.domain.cells == 32
    assert cfg.domain.domain(1).length == 2.0
    assert cfg.solver.method == "newton"
    assert cfg.solver.solver_config().tol == 1e-9
    assert cfg.continuation.direction == -1
    assert cfg.continuation.lam_min == -3.0
    assert cfg.output.directory == "out"
    assert cfg.output.formats == ["csv"]


def test_parse_json_with_defaults():
    cfg = parse_run_config(json.dumps({"problem": {"m": 1, "n": 1, "lambda": 0.5}}), "json")
    assert cfg.problem.lam == 0.5
    assert cfg.domain.kind == "interval"
    assert cfg.solver.method == "monotone_iteration"
    assert cfg.output.formats == ["csv", "json"]


def test_load_picks_format_from_suffix(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"problem": {"m": 0.5, "n": 0.25}}))
    assert load_run_config(str(path)).problem.n == 0.25
    ini = tmp_path / "run.ini"
    ini.write_text(INI)
    assert load_run_config(str(ini)).domain.size == 2.0


@pytest.mark.parametrize(
    "text",
    [
        "[problem]\nm = 0.5\nn = 0.75\nmu = 1\n",
        "[problem]\nm = 0.5\nn = 0.75\n[plots]\nx = 1\n",
        "[problem]\nm = 1.5\nn = 0.75\n",
        "[problem]\nm = 0.5\nn = 0.75\n[solver]\nmethod = euler_lagrange\n",
        "[domain]\ncells = 32\n",
        "not an ini file",
    ],
)
def test_bad_configs(text):
    with pytest.raises(ConfigError):
        parse_run_config(text)


def test_interval_needs_one_dimension():
    cfg = parse_run_config("[problem]\nm = 0.5\nn = 0.75\ndim = 2\n")
    with pytest.raises(ConfigError):
        cfg.domain.domain(cfg.problem.dim)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_run_config(str(tmp_path / "missing.ini"))


def test_output_directory_from_environment(monkeypatch, tmp_path):
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path))
    assert parse_run_config(INI).output.directory == str(tmp_path)
