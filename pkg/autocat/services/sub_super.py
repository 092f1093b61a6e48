# autocat/services/sub_super.py
"""
Sub/supersolution construction and the monotone iteration

    (-Δ_h + K) u_{k+1} = f(u_k) + K u_k

started from c·φ1 (increasing) and from a constant M (decreasing).
"""

import logging
from typing import Optional

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from ..engine.grid import check_grid_function, residual, sup_norm
from ..engine.nonlinearity import (
    apriori_bound,
    existence_hypothesis,
    reaction_slopes,
    reaction_values,
)
from ..errors import ParameterError, SolverError
from ..programs.models_grid import EigenPair, Mesh
from ..programs.models_problem import ProblemParams
from ..programs.models_solve import SolveReport, SolverConfig, SubsolutionResult
from .newton import build_report

logger = logging.getLogger(__name__)

SUPERSOLUTION_MARGIN = 1.1
MAX_HALVINGS = 60
MONOTONE_SLACK = 1e-12
SHIFT_GRID = 2000
SHIFT_CAP = 1e12


# --------------------------------------------------
# Supersolution
# --------------------------------------------------


def build_supersolution(p: ProblemParams) -> float:
    """
    Constant supersolution: 10% above the larger of the a-priori bound and the
    last positive-to-negative crossing of M ↦ M^m - M^(m+1) - λM^n.
    """
    hypothesis = existence_hypothesis(p)
    if hypothesis is None:
        raise ParameterError(
            f"no constant supersolution for m={p.m}, n={p.n}, lambda={p.lam}"
        )

    def phi(M: np.ndarray) -> np.ndarray:
        return reaction_values(p, M)

    hi = 1.0
    while phi(np.asarray(hi)) > 0:
        hi *= 2.0
        if hi > 1e12:
            raise ParameterError("supersolution root not bracketed")

    grid = np.geomspace(1e-12, hi, 4000)
    positive = np.nonzero(phi(grid) > 0)[0]
    if positive.size == 0:
        root = 0.0
    else:
        lo_i = int(positive[-1])
        lo, up = float(grid[lo_i]), float(grid[min(lo_i + 1, grid.size - 1)])
        for _ in range(200):
            mid = 0.5 * (lo + up)
            if phi(np.asarray(mid)) > 0:
                lo = mid
            else:
                up = mid
            if up - lo <= 1e-15 * up:
                break
        root = up

    bound = apriori_bound(p) or 0.0
    M = SUPERSOLUTION_MARGIN * max(root, bound)
    logger.debug("supersolution (%s): root=%.6g bound=%.6g M=%.6g", hypothesis, root, bound, M)
    return M


# --------------------------------------------------
# Subsolution
# --------------------------------------------------


def _subsolution_holds(p: ProblemParams, eig: EigenPair, c: float) -> bool:
    v = c * eig.phi1
    return bool(np.all(eig.lambda1 * v <= reaction_values(p, v)))


def build_subsolution(
    p: ProblemParams, eig: EigenPair, c: float = 0.5, search: bool = True
) -> SubsolutionResult:
    """
    c·φ1 with a validity flag for λ1 c φ1 <= f(c φ1) at every node. With
    `search`, c is halved up to 60 times until the inequality holds.
    """
    if not c > 0:
        raise ParameterError("c must be positive")
    halvings = 0
    valid = _subsolution_holds(p, eig, c)
    while search and not valid and halvings < MAX_HALVINGS:
        c *= 0.5
        halvings += 1
        valid = _subsolution_holds(p, eig, c)
    if not valid:
        logger.info("no subsolution c*phi1 for %s after %d halvings", p, halvings)
    return SubsolutionResult(values=c * eig.phi1, c=c, valid=valid, halvings=halvings)


# --------------------------------------------------
# Monotone iteration
# --------------------------------------------------


def monotone_shift(p: ProblemParams, s_lo: float, s_hi: float) -> Optional[float]:
    """
    Smallest K (plus 5%) making f(s) + K s nondecreasing on [s_lo, s_hi], or
    None when the required K exceeds SHIFT_CAP.
    """
    s = np.geomspace(s_lo, s_hi, SHIFT_GRID) if s_hi > s_lo else np.array([s_lo])
    need = float(np.max(-reaction_slopes(p, s)))
    if not np.isfinite(need) or need > SHIFT_CAP:
        return None
    return max(0.0, 1.05 * need) + 1e-8


def _iterate(
    p: ProblemParams,
    mesh: Mesh,
    start: np.ndarray,
    lu,
    shift: float,
    direction: int,
    cfg: SolverConfig,
):
    u = start.copy()
    res = sup_norm(residual(p, mesh, u))
    it = 0
    while res > cfg.tol and it < cfg.max_iter:
        it += 1
        rhs = mesh.weights * (reaction_values(p, np.maximum(u, 0.0)) + shift * u)
        nxt = lu.solve(rhs)
        if np.any(direction * (nxt - u) < -MONOTONE_SLACK * (1.0 + np.abs(u))):
            worst = float(np.max(-direction * (nxt - u)))
            return u, False, it, res, [f"non-monotone step at iteration {it} (by {worst:.3e}); shift K={shift:.6g} too small"]
        u = nxt
        res = sup_norm(residual(p, mesh, u))
    notes = [] if res <= cfg.tol else [f"iteration cap {cfg.max_iter} reached"]
    return u, res <= cfg.tol, it, res, notes


def monotone_iteration(
    p: ProblemParams,
    mesh: Mesh,
    sub: np.ndarray,
    sup: np.ndarray,
    cfg: Optional[SolverConfig] = None,
) -> SolveReport:
    """
    Monotone iteration from below (reported) and from above (diagnostic
    `bracket_gap` = sup-distance between the two limits).
    """
    cfg = cfg or SolverConfig()
    sub = check_grid_function(mesh, sub)
    sup = check_grid_function(mesh, sup)
    if np.any(sub > sup):
        raise SolverError("subsolution exceeds supersolution")

    positive = sub[sub > 0]
    s_lo = max(float(positive.min()) if positive.size else cfg.eps_reg, cfg.eps_reg)
    s_hi = max(float(sup.max()), s_lo)
    shift = monotone_shift(p, s_lo, s_hi)
    if shift is None:
        return build_report(
            p, mesh, sub, "monotone_iteration", False, 0, sup_norm(residual(p, mesh, sub)), cfg,
            [f"no finite one-sided Lipschitz shift on [{s_lo:.3e}, {s_hi:.3e}]"],
        )

    A = (mesh.stiffness + shift * sparse.diags(mesh.weights)).tocsc()
    lu = splu(A)

    lower, ok_lo, it_lo, res_lo, notes_lo = _iterate(p, mesh, sub, lu, shift, +1, cfg)
    upper, ok_hi, it_hi, res_hi, notes_hi = _iterate(p, mesh, sup, lu, shift, -1, cfg)

    notes = list(notes_lo) + [f"from above: {msg}" for msg in notes_hi]
    report = build_report(p, mesh, lower, "monotone_iteration", ok_lo, it_lo, res_lo, cfg, notes)
    report.diagnostics["shift"] = shift
    report.diagnostics["upper_iterations"] = float(it_hi)
    report.diagnostics["upper_residual"] = res_hi
    report.diagnostics["bracket_gap"] = sup_norm(upper - lower)
    logger.info(
        "monotone lambda=%.6g converged=%s iterations=%d gap=%.3e",
        p.lam, ok_lo, it_lo, report.diagnostics["bracket_gap"],
    )
    return report


def solve_by_sub_super(
    p: ProblemParams, mesh: Mesh, eig: EigenPair, cfg: Optional[SolverConfig] = None
) -> SolveReport:
    """Build both barriers and run the monotone iteration; failure is reported, not raised."""
    cfg = cfg or SolverConfig()
    zero = np.zeros(mesh.size)
    try:
        M = build_supersolution(p)
    except ParameterError as exc:
        return build_report(p, mesh, zero, "monotone_iteration", False, 0, 0.0, cfg, [str(exc)])
    sub = build_subsolution(p, eig, c=min(0.5, M))
    if not sub.valid:
        return build_report(
            p, mesh, zero, "monotone_iteration", False, 0, 0.0, cfg,
            ["no valid subsolution c*phi1"],
        )
    return monotone_iteration(p, mesh, sub.values, np.full(mesh.size, M), cfg)
