# autocat/services/diagram.py
"""
Bifurcation-diagram presets: one continuation run per case, written as the
branch CSV, the fold JSON and a gnuplot script plotting sup-norm against λ.
"""

import logging
import os
from typing import Dict, List, Optional, Tuple

from ..engine.eigen import principal_eigenpair
from ..engine.grid import build_mesh
from ..errors import ParameterError
from ..programs.models_branch import Branch, ContinuationConfig, DiagramPreset
from ..programs.models_grid import Domain
from ..programs.models_problem import ProblemParams
from .continuation import continue_branch
from .export import write_branch
from .solve import find_solution, is_nontrivial

logger = logging.getLogger(__name__)

TWO_PI = 6.283185307179586

PRESETS: Dict[str, DiagramPreset] = {
    p.name: p
    for p in (
        DiagramPreset(
            name="C1", m=0.5, n=0.25, length=10.0, cells=128, lam0=0.0,
            continuation=ContinuationConfig(ds=0.02, ds_max=0.1, lam_min=-0.5, lam_max=1.0, collapse_threshold=1e-6),
            description="n < m: upper branch folds back below the fold bound",
        ),
        DiagramPreset(
            name="C2-equal", m=0.5, n=0.5, lam0=0.0,
            continuation=ContinuationConfig(lam_min=-1.0, lam_max=2.0, collapse_threshold=1e-6),
            description="n = m: monotone branch ending on u = 0 at lambda = 1",
        ),
        DiagramPreset(
            name="C2", m=0.5, n=0.75, lam0=-2.0,
            continuation=ContinuationConfig(lam_min=-3.0, lam_max=5.0),
            description="m < n <= 1: one decreasing branch for all lambda",
        ),
        DiagramPreset(
            name="C3", m=0.5, n=1.25, lam0=0.0,
            continuation=ContinuationConfig(direction=-1, lam_min=-5.0, lam_max=1.0),
            description="1 < n < m + 1: branch towards negative lambda",
        ),
        DiagramPreset(
            name="C4-critical", m=0.5, n=1.5, lam0=0.0,
            continuation=ContinuationConfig(direction=-1, lam_min=-40.0, lam_max=1.0, max_steps=200),
            description="n = m + 1: branch blows up before the nonexistence bound",
        ),
        DiagramPreset(
            name="C4", m=0.5, n=2.0, lam0=0.0,
            continuation=ContinuationConfig(direction=-1, lam_min=-10.0, lam_max=1.0),
            description="n > m + 1",
        ),
        DiagramPreset(
            name="C5", m=1.0, n=1.0, length=TWO_PI, lam0=0.0,
            continuation=ContinuationConfig(ds=0.02, ds_max=0.1, lam_min=-1.0, lam_max=2.0, collapse_threshold=1e-6),
            description="logistic: branch meets u = 0 at lambda = 1 - lambda1",
        ),
        DiagramPreset(
            name="C6", m=1.0, n=1.5, length=TWO_PI, lam0=0.0,
            continuation=ContinuationConfig(lam_min=-1.0, lam_max=5.0),
            description="m = 1 < n < 2 with lambda1 < 1",
        ),
    )
}


def get_preset(name: str) -> DiagramPreset:
    """Look a preset up by name, ignoring case (`c4-critical` works)."""
    by_lower = {key.lower(): preset for key, preset in PRESETS.items()}
    preset = by_lower.get(name.lower())
    if preset is None:
        raise ParameterError(f"unknown diagram {name!r}; known: {', '.join(PRESETS)}")
    return preset


def gnuplot_script(preset: DiagramPreset, branch: Branch, csv_name: str) -> str:
    lines = [
        f"# {preset.name}: m={preset.m:g}, n={preset.n:g} on (0, {preset.length:.17g})",
        'set datafile separator ","',
        f'set title "{preset.description}"',
        'set xlabel "lambda"',
        'set ylabel "sup |u|"',
        "set key off",
    ]
    for k, fold in enumerate(branch.folds, start=1):
        lines.append(f"set arrow {k} from {fold.lam_star:.17g}, graph 0 to {fold.lam_star:.17g}, graph 1 nohead dt 2")
    lines.append(f'plot "{csv_name}" skip 1 using 1:2 with linespoints pt 7 ps 0.5')
    return "\n".join(lines) + "\n"


def run_diagram(name: str, directory: str) -> Tuple[Branch, List[str], bool]:
    """
    Trace the preset branch and write <name>.csv, <name>_folds.json,
    <name>_solutions/ and <name>.gp. The flag is False when no start solution
    was found or the branch has fewer than two points.
    """
    preset = get_preset(name)
    mesh = build_mesh(Domain.interval(0.0, preset.length), preset.cells)
    p = ProblemParams(m=preset.m, n=preset.n, lam=preset.lam0)
    start = find_solution(p, mesh, eig=principal_eigenpair(mesh))
    if not is_nontrivial(start):
        logger.warning("diagram %s: no start solution at lambda=%.6g", preset.name, preset.lam0)
        return Branch(), [], False

    branch = continue_branch(p, mesh, start.solution, preset.continuation)
    stem = preset.name.lower()
    files = write_branch(branch, mesh, directory, stem)
    gp_path = os.path.join(directory, f"{stem}.gp")
    with open(gp_path, "w", encoding="utf-8") as fh:
        fh.write(gnuplot_script(preset, branch, f"{stem}.csv"))
    files.append(gp_path)
    ok = len(branch.points) >= 2
    logger.info(
        "diagram %s: %d points, %d folds, termination=%s",
        preset.name, len(branch.points), len(branch.folds), branch.termination,
    )
    return branch, files, ok


def preset_names() -> List[str]:
    return list(PRESETS)


def describe(name: Optional[str] = None) -> Dict[str, str]:
    presets = [get_preset(name)] if name else list(PRESETS.values())
    return {p.name: p.description for p in presets}
