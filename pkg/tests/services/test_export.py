# tests/services/test_export.py

import json

import numpy as np
import pandas as pd
import pytest

from autocat.engine.grid import read_grid_function
from autocat.programs.models_branch import Branch, BranchPoint, FoldRecord
from autocat.programs.models_verify import VerifyReport
from autocat.services.export import (
    BRANCH_COLUMNS,
    summary_frame,
    summary_markdown,
    write_branch,
    write_summary,
)


def _branch(mesh):
    branch = Branch(termination="right_bound")
    for k, lam in enumerate((0.0, 0.1)):
        u = (1.0 - lam) * np.sin(np.pi * mesh.nodes)
        branch.points.append(BranchPoint(lam=lam, sup_norm=float(u.max()), l2_norm=0.5, energy=-0.1, solution_id=k))
        branch.solutions.append(u)
    branch.folds.append(FoldRecord(lam_star=0.1, index=1, index_before=0, index_after=1))
    return branch


def test_write_branch(tmp_path, unit_mesh):
    branch = _branch(unit_mesh)
    csv_path, json_path = write_branch(branch, unit_mesh, str(tmp_path))
    df = pd.read_csv(csv_path)
    assert list(df.columns) == BRANCH_COLUMNS
    assert df["lambda"].tolist() == [0.0, 0.1]
    first = read_grid_function(str(tmp_path / df["solution_file"][0]), unit_mesh)
    np.testing.assert_array_equal(first, branch.solutions[0])

    sidecar = json.loads(open(json_path).read())
    assert sidecar["termination"] == "right_bound"
    assert sidecar["folds"][0]["lam_star"] == pytest.approx(0.1)


def test_write_branch_without_solutions(tmp_path, unit_mesh):
    write_branch(_branch(unit_mesh), unit_mesh, str(tmp_path), stem="plain", with_solutions=False)
    assert not (tmp_path / "plain_solutions").exists()
    assert (tmp_path / "plain.csv").is_file()


def test_summary_markdown(tmp_path):
    reports = [
        VerifyReport(scenario_id="a", status="passed", citation="x", runtime_seconds=0.25),
        VerifyReport(scenario_id="b", status="failed", citation="y", detail="p | q"),
    ]
    text = summary_markdown(summary_frame(reports))
    lines = text.splitlines()
    assert lines[0].startswith("| scenario | status")
    assert "| a | passed | x | 0.250 |" in lines[2]
    assert "p / q" in lines[3]
    csv_path, md_path = write_summary(reports, str(tmp_path))
    assert pd.read_csv(csv_path)["status"].tolist() == ["passed", "failed"]
