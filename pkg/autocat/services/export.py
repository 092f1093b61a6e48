# autocat/services/export.py
"""
Files written by the CLI and the scenario replays.

CSV through pandas with 17 significant digits, JSON through pydantic dumps.
"""

import json
import os
from typing import Iterable, List, Optional

import pandas as pd
from pydantic import BaseModel

from ..engine.grid import write_grid_function
from ..programs.models_branch import Branch
from ..programs.models_grid import Mesh
from ..programs.models_solve import ShootResult, SolveReport
from ..programs.models_verify import VerifyReport

FLOAT_FORMAT = "%.17g"

BRANCH_COLUMNS = [
    "lambda",
    "sup_norm",
    "l2_norm",
    "energy",
    "stability_indicator",
    "truncated_flag",
    "solution_file",
]


def _ensure_dir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path


def write_json(path: str, payload) -> str:
    """Write a pydantic model (or a list of them, or plain data) as indented JSON."""
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    if isinstance(payload, BaseModel):
        data = payload.model_dump(mode="json")
    elif isinstance(payload, list):
        data = [x.model_dump(mode="json") if isinstance(x, BaseModel) else x for x in payload]
    else:
        data = payload
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")
    return path


def write_frame(path: str, df: pd.DataFrame) -> str:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


# --------------------------------------------------
# Solves
# --------------------------------------------------


def write_solve_report(report: SolveReport, mesh: Mesh, directory: str, stem: str = "solution") -> List[str]:
    """<stem>.csv (grid function) and <stem>.json (report with `solution_file`)."""
    _ensure_dir(directory)
    csv_name = f"{stem}.csv"
    write_grid_function(os.path.join(directory, csv_name), mesh, report.solution)
    report.solution_file = csv_name
    json_path = write_json(os.path.join(directory, f"{stem}.json"), report)
    return [os.path.join(directory, csv_name), json_path]


# --------------------------------------------------
# Branches
# --------------------------------------------------


def branch_frame(branch: Branch, solution_files: Optional[List[Optional[str]]] = None) -> pd.DataFrame:
    rows = []
    for k, pt in enumerate(branch.points):
        rows.append(
            {
                "lambda": pt.lam,
                "sup_norm": pt.sup_norm,
                "l2_norm": pt.l2_norm,
                "energy": pt.energy,
                "stability_indicator": pt.stability_indicator,
                "truncated_flag": int(pt.truncated),
                "solution_file": solution_files[k] if solution_files else "",
            }
        )
    return pd.DataFrame(rows, columns=BRANCH_COLUMNS)


def write_branch(
    branch: Branch,
    mesh: Mesh,
    directory: str,
    stem: str = "branch",
    with_solutions: bool = True,
) -> List[str]:
    """
    <stem>.csv with one row per point, <stem>_folds.json with folds, gaps and
    the termination reason, and optionally one CSV per stored solution.
    """
    _ensure_dir(directory)
    files: List[Optional[str]] = []
    written = []
    if with_solutions:
        sol_dir = f"{stem}_solutions"
        for pt in branch.points:
            name = os.path.join(sol_dir, f"point_{pt.solution_id:04d}.csv")
            write_grid_function(os.path.join(directory, name), mesh, branch.solutions[pt.solution_id])
            files.append(name)
    csv_path = write_frame(
        os.path.join(directory, f"{stem}.csv"), branch_frame(branch, files if with_solutions else None)
    )
    sidecar = {
        "termination": branch.termination,
        "folds": [f.model_dump(mode="json") for f in branch.folds],
        "gaps": [g.model_dump(mode="json") for g in branch.gaps],
    }
    json_path = write_json(os.path.join(directory, f"{stem}_folds.json"), sidecar)
    written.extend([csv_path, json_path])
    return written


# --------------------------------------------------
# Shooting profiles
# --------------------------------------------------


def profile_frame(shot: ShootResult) -> pd.DataFrame:
    return pd.DataFrame(shot.profile, columns=["r", "u", "du_dr"])


def write_profile(shot: ShootResult, directory: str, stem: str = "profile") -> List[str]:
    _ensure_dir(directory)
    csv_path = write_frame(os.path.join(directory, f"{stem}.csv"), profile_frame(shot))
    json_path = write_json(os.path.join(directory, f"{stem}.json"), shot)
    return [csv_path, json_path]


# --------------------------------------------------
# Verification summaries
# --------------------------------------------------


def summary_frame(reports: Iterable[VerifyReport]) -> pd.DataFrame:
    rows = [
        {
            "scenario": r.scenario_id,
            "status": r.status,
            "citation": r.citation,
            "runtime_seconds": r.runtime_seconds,
            "detail": r.detail or "",
        }
        for r in reports
    ]
    return pd.DataFrame(rows, columns=["scenario", "status", "citation", "runtime_seconds", "detail"])


def summary_markdown(df: pd.DataFrame) -> str:
    header = "| " + " | ".join(df.columns) + " |"
    rule = "|" + "|".join("---" for _ in df.columns) + "|"
    lines = [header, rule]
    for _, row in df.iterrows():
        cells = []
        for col in df.columns:
            value = row[col]
            cells.append(f"{value:.3f}" if isinstance(value, float) else str(value).replace("|", "/"))
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def write_summary(reports: List[VerifyReport], directory: str, stem: str = "summary") -> List[str]:
    _ensure_dir(directory)
    df = summary_frame(reports)
    csv_path = write_frame(os.path.join(directory, f"{stem}.csv"), df)
    md_path = os.path.join(directory, f"{stem}.md")
    with open(md_path, "w", encoding="utf-8") as fh:
        fh.write(summary_markdown(df))
    return [csv_path, md_path]
