# autocat/services/solve.py
"""
Method dispatch shared by the CLI, the diagram presets and the scenario
replays.
"""

import logging
from typing import List, Optional

import numpy as np

from ..engine.eigen import principal_eigenpair
from ..engine.grid import sup_norm
from ..engine.nonlinearity import apriori_bound
from ..engine.thresholds import abc_rescale
from ..programs.models_grid import EigenPair, Mesh
from ..programs.models_problem import ProblemParams
from ..programs.models_solve import SolveMethod, SolveReport, SolverConfig
from .descent import global_minimize, seed_bump
from .mountain_pass import mountain_pass
from .newton import newton_solve
from .sub_super import solve_by_sub_super

logger = logging.getLogger(__name__)

NONTRIVIAL = 1e-6


def is_nontrivial(report: SolveReport, threshold: float = NONTRIVIAL) -> bool:
    return bool(report.converged and report.sup_norm > threshold)


def solve_with_method(
    p: ProblemParams,
    mesh: Mesh,
    method: SolveMethod,
    cfg: Optional[SolverConfig] = None,
    eig: Optional[EigenPair] = None,
) -> SolveReport:
    """
    One solve from the method's natural start:
      - newton: the a-priori bound times a positive bump
      - monotone_iteration: c·φ1 and the constant supersolution
      - global_minimize: 0 (seeded internally)
      - mountain_pass: the pass between 0 and the global minimizer
    """
    cfg = cfg or SolverConfig()
    if method == "newton":
        start = (apriori_bound(p) or 1.0) * seed_bump(mesh)
        return newton_solve(p, mesh, start, cfg)
    if method == "monotone_iteration":
        return solve_by_sub_super(p, mesh, eig or principal_eigenpair(mesh), cfg)
    if method == "global_minimize":
        return global_minimize(p, mesh, np.zeros(mesh.size), cfg)
    if method == "mountain_pass":
        low = global_minimize(p, mesh, np.zeros(mesh.size), cfg)
        return mountain_pass(p, mesh, low.solution, cfg)
    raise ValueError(f"method {method!r} does not solve the reaction problem")


def find_solution(
    p: ProblemParams,
    mesh: Mesh,
    cfg: Optional[SolverConfig] = None,
    eig: Optional[EigenPair] = None,
    methods: Optional[List[SolveMethod]] = None,
) -> SolveReport:
    """
    First nontrivial converged solution among the methods tried in order
    (monotone iteration, global minimization, Newton). The last report is
    returned when none succeeds.
    """
    cfg = cfg or SolverConfig()
    order = methods or ["monotone_iteration", "global_minimize", "newton"]
    report = None
    for method in order:
        report = solve_with_method(p, mesh, method, cfg, eig)
        if is_nontrivial(report):
            return report
        logger.debug("find_solution: %s gave no nontrivial solution at lambda=%.6g", method, p.lam)
    return report


def rescaled_check(p: ProblemParams, mesh: Mesh, u: np.ndarray):
    """
    For n = m + 1, λ < -1: v = s·u with s = (-λ-1)^(1/m) must solve
    -Δv = μ v^m + v^(m+1). Returns (rescaling, v, sup-norm residual of v).
    """
    scaled = abc_rescale(p)
    v = scaled.amplitude_scale * np.asarray(u, dtype=float)
    vp = np.maximum(v, 0.0)
    lhs = (mesh.stiffness @ v) / mesh.weights
    res = sup_norm(lhs - scaled.mu * vp**p.m - vp ** (p.m + 1.0))
    return scaled, v, res
