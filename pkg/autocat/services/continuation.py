# autocat/services/continuation.py
"""
Solution branches in λ.

Pseudo-arclength continuation works on z = (u, λ) with the inner product
<z1, z2> = Σ w_i u1_i u2_i + λ1 λ2, a secant predictor and a bordered Newton
corrector. `sweep_lambda` is the natural-parameter alternative for branches
that are graphs over λ.
"""

import logging
from typing import List, Literal, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from ..engine.eigen import principal_eigenpair, smallest_eigenvalue
from ..engine.grid import (
    check_grid_function,
    energy,
    l2_norm,
    positive_part,
    residual,
    sup_norm,
)
from ..engine.nonlinearity import apriori_bound, reaction_slopes
from ..errors import ParameterError
from ..programs.models_branch import (
    Branch,
    BranchPoint,
    ContinuationConfig,
    FoldRecord,
    GapRecord,
    StabilityResult,
)
from ..programs.models_grid import Mesh
from ..programs.models_problem import ProblemParams
from ..programs.models_solve import SolveReport, SolverConfig
from .descent import global_minimize
from .newton import newton_solve
from .sub_super import solve_by_sub_super

logger = logging.getLogger(__name__)

STABILITY_DELTA = 1e-8
FAST_CORRECTOR = 3
STEP_GROWTH = 1.5
# retry of a rejected step: Jacobian slopes floored here, corrector budget doubled
RECOVERY_EPS = 1e-6
# fresh-tangent restarts from one point before giving up
MAX_RESTARTS = 3
APRIORI_SLACK = 1e-8

SweepStrategy = Literal["warm", "warm_then_monotone", "warm_then_minimize"]


# --------------------------------------------------
# Point bookkeeping
# --------------------------------------------------


def stability_indicator(
    p: ProblemParams, mesh: Mesh, u: np.ndarray, delta: float = STABILITY_DELTA
) -> StabilityResult:
    """
    Smallest eigenvalue of -Δ_h - f'(u), with f' := 0 on nodes where u <= delta
    (flagged `truncated`). Positive means linearly stable.
    """
    u = check_grid_function(mesh, u)
    support = u > delta
    potential = np.zeros(mesh.size)
    if np.any(support):
        potential[support] = -reaction_slopes(p, u[support])
    truncated = bool(np.any(~support))
    if truncated and np.any(support):
        logger.warning("stability record truncated on %d nodes with u <= %g", int(np.sum(~support)), delta)
    return StabilityResult(value=smallest_eigenvalue(mesh, potential), truncated=truncated)


def _within_bound(p: ProblemParams, sup: float) -> Optional[bool]:
    bound = apriori_bound(p)
    if bound is None:
        return None
    return sup <= bound + APRIORI_SLACK


def _record(branch: Branch, p: ProblemParams, mesh: Mesh, u: np.ndarray, arclength: float) -> BranchPoint:
    stab = stability_indicator(p, mesh, u)
    sup = sup_norm(u)
    point = BranchPoint(
        lam=p.lam,
        sup_norm=sup,
        l2_norm=l2_norm(mesh, u),
        energy=energy(p, mesh, u),
        stability_indicator=stab.value,
        truncated=stab.truncated,
        residual_norm=sup_norm(residual(p, mesh, u)),
        arclength=arclength,
        within_apriori_bound=_within_bound(p, sup),
        solution_id=len(branch.solutions),
    )
    branch.points.append(point)
    branch.solutions.append(np.array(u, dtype=float, copy=True))
    return point


# --------------------------------------------------
# Pseudo-arclength
# --------------------------------------------------


def _operator(mesh: Mesh) -> sparse.csr_matrix:
    return sparse.csr_matrix(sparse.diags(1.0 / mesh.weights) @ mesh.stiffness)


def _lambda_derivative(p: ProblemParams, u: np.ndarray) -> np.ndarray:
    """∂R/∂λ of R = -Δ_h u - f(u^+); f contains -λ s^n."""
    return positive_part(u) ** p.n


def _jacobian(A: sparse.csr_matrix, p: ProblemParams, u: np.ndarray, eps_reg: float) -> sparse.csr_matrix:
    d = np.zeros_like(u)
    pos = u > 0
    if np.any(pos):
        d[pos] = reaction_slopes(p, np.maximum(u[pos], eps_reg))
    return sparse.csr_matrix(A - sparse.diags(d))


def _metric_norm(mesh: Mesh, du: np.ndarray, dlam: float) -> float:
    return float(np.sqrt(np.dot(mesh.weights, du * du) + dlam * dlam))


def _initial_tangent(
    A, p: ProblemParams, mesh: Mesh, u: np.ndarray, cfg: ContinuationConfig
) -> Tuple[np.ndarray, float]:
    J = _jacobian(A, p, u, cfg.eps_reg).tocsc()
    try:
        v = splu(J).solve(-_lambda_derivative(p, u))
        if not np.all(np.isfinite(v)):
            raise RuntimeError("non-finite tangent")
    except RuntimeError:
        logger.warning("singular Jacobian at the start point; tangent taken along λ")
        v = np.zeros_like(u)
    norm = _metric_norm(mesh, v, 1.0)
    return cfg.direction * v / norm, cfg.direction * 1.0 / norm


def _refresh_tangent(
    A,
    p: ProblemParams,
    mesh: Mesh,
    u: np.ndarray,
    tangent: Tuple[np.ndarray, float],
    cfg: ContinuationConfig,
) -> Tuple[np.ndarray, float]:
    """
    Kernel direction of [J, R_λ] from the bordered system with the old tangent
    as last row, oriented along the old tangent. Keeps the old one when singular.
    """
    tu, tlam = tangent
    J = _jacobian(A, p, u, max(cfg.eps_reg, RECOVERY_EPS))
    col = sparse.csr_matrix(_lambda_derivative(p, u)[:, None])
    row = sparse.csr_matrix((mesh.weights * tu)[None, :])
    M = sparse.bmat([[J, col], [row, sparse.csr_matrix([[tlam]])]], format="csc")
    rhs = np.zeros(u.size + 1)
    rhs[-1] = 1.0
    try:
        z = splu(M).solve(rhs)
    except RuntimeError:
        return tangent
    if not np.all(np.isfinite(z)):
        return tangent
    norm = _metric_norm(mesh, z[:-1], float(z[-1]))
    if norm == 0:
        return tangent
    v, vlam = z[:-1] / norm, float(z[-1]) / norm
    if np.dot(mesh.weights * tu, v) + tlam * vlam < 0:
        v, vlam = -v, -vlam
    return v, vlam


def _correct(
    A,
    p0: ProblemParams,
    mesh: Mesh,
    z_prev: Tuple[np.ndarray, float],
    tangent: Tuple[np.ndarray, float],
    ds: float,
    cfg: ContinuationConfig,
    eps_reg: Optional[float] = None,
    max_iter: Optional[int] = None,
) -> Tuple[Optional[np.ndarray], float, int]:
    """Bordered Newton from the predictor; returns (u, λ, iterations) or (None, nan, it)."""
    eps_reg = cfg.eps_reg if eps_reg is None else eps_reg
    max_iter = max_iter or cfg.max_corrector_iter
    u_prev, lam_prev = z_prev
    tu, tlam = tangent
    u = u_prev + ds * tu
    lam = lam_prev + ds * tlam
    row = sparse.csr_matrix((mesh.weights * tu)[None, :])

    for it in range(1, max_iter + 1):
        p = p0.with_lambda(lam)
        R = residual(p, mesh, u)
        N = float(np.dot(mesh.weights * tu, u - u_prev) + tlam * (lam - lam_prev) - ds)
        if not (np.all(np.isfinite(R)) and np.isfinite(N)):
            return None, float("nan"), it
        if sup_norm(R) <= cfg.tol and abs(N) <= cfg.tol:
            return u, lam, it - 1
        J = _jacobian(A, p, u, eps_reg)
        col = sparse.csr_matrix(_lambda_derivative(p, u)[:, None])
        M = sparse.bmat([[J, col], [row, sparse.csr_matrix([[tlam]])]], format="csc")
        try:
            step = splu(M).solve(-np.concatenate([R, [N]]))
        except RuntimeError:
            return None, float("nan"), it
        u = u + step[:-1]
        lam = lam + float(step[-1])

    p = p0.with_lambda(lam)
    if sup_norm(residual(p, mesh, u)) <= cfg.tol:
        return u, lam, max_iter
    return None, float("nan"), max_iter


def continue_branch(
    p0: ProblemParams, mesh: Mesh, u0: np.ndarray, cfg: Optional[ContinuationConfig] = None
) -> Branch:
    """
    Trace the branch through (λ0, u0) in direction cfg.direction until a λ
    bound, trivial collapse, step failure or the step cap.
    """
    cfg = cfg or ContinuationConfig()
    u = check_grid_function(mesh, u0).copy()
    res0 = sup_norm(residual(p0, mesh, u))
    if res0 > cfg.tol:
        raise ParameterError(f"start point is not a solution: residual {res0:.3e} > {cfg.tol:g}")

    A = _operator(mesh)
    collapse = cfg.collapse_threshold or 10.0 * cfg.eps_reg
    branch = Branch()
    arclength = 0.0
    _record(branch, p0, mesh, u, arclength)

    lam = p0.lam
    tangent = _initial_tangent(A, p0, mesh, u, cfg)
    ds = min(cfg.ds, cfg.ds_max)
    small_run = 1 if sup_norm(u) < collapse else 0
    restarts = 0
    rejected = False

    for step in range(cfg.max_steps):
        new_u, new_lam, iters = _correct(A, p0, mesh, (u, lam), tangent, ds, cfg)
        if new_u is None:
            new_u, new_lam, iters = _correct(
                A, p0, mesh, (u, lam), tangent, ds, cfg,
                eps_reg=max(cfg.eps_reg, RECOVERY_EPS), max_iter=2 * cfg.max_corrector_iter,
            )
        if new_u is None:
            ds *= 0.5
            rejected = True
            logger.debug("corrector failed at step %d, ds -> %.3e", step, ds)
            if ds < cfg.ds_min:
                if restarts >= MAX_RESTARTS:
                    logger.warning("continuation step fell below ds_min=%g at lambda=%.6g", cfg.ds_min, lam)
                    branch.termination = "step_failure"
                    break
                restarts += 1
                tangent = _refresh_tangent(A, p0.with_lambda(lam), mesh, u, tangent, cfg)
                ds = min(cfg.ds, cfg.ds_max) * 0.5**restarts
                logger.info("restart %d at lambda=%.6g with a fresh tangent, ds=%.3e", restarts, lam, ds)
            continue

        if new_lam < cfg.lam_min:
            branch.termination = "left_bound"
            break
        if new_lam > cfg.lam_max:
            branch.termination = "right_bound"
            break

        du, dlam = new_u - u, new_lam - lam
        dist = _metric_norm(mesh, du, dlam)
        if dist > 0:
            tangent = (du / dist, dlam / dist)
        arclength += dist
        u, lam = new_u, new_lam
        _record(branch, p0.with_lambda(lam), mesh, u, arclength)

        small_run = small_run + 1 if sup_norm(u) < collapse else 0
        if small_run >= cfg.collapse_count:
            branch.termination = "trivial_collapse"
            break
        restarts = 0
        # a cut step regrows after any accepted correction
        if iters <= FAST_CORRECTOR or rejected:
            ds = min(ds * STEP_GROWTH, cfg.ds_max)
        rejected = False
    else:
        branch.termination = "step_limit"

    branch.folds = detect_fold(branch)
    logger.info(
        "branch from lambda=%.6g: %d points, %d folds, termination=%s",
        p0.lam, len(branch.points), len(branch.folds), branch.termination,
    )
    return branch


# --------------------------------------------------
# Folds and the trivial branch
# --------------------------------------------------


def detect_fold(branch: Branch) -> List[FoldRecord]:
    """
    Turning points in λ: a sign change of Δλ at point i, refined by the vertex
    of the quadratic through (arclength, λ) at points i-1, i, i+1.
    """
    pts = branch.points
    if len(pts) < 3:
        return []
    lam = np.array([pt.lam for pt in pts])
    s = np.array([pt.arclength for pt in pts])
    dlam = np.diff(lam)
    folds = []
    for i in range(1, len(pts) - 1):
        if dlam[i - 1] * dlam[i] >= 0:
            continue
        window = slice(i - 1, i + 2)
        a, b, c = np.polyfit(s[window] - s[i], lam[window], 2)
        lam_star = float(lam[i])
        if a != 0:
            vertex = -b / (2.0 * a)
            if s[i - 1] - s[i] <= vertex <= s[i + 1] - s[i]:
                lam_star = float(c - b * b / (4.0 * a))
        folds.append(FoldRecord(lam_star=lam_star, index=i, index_before=i - 1, index_after=i + 1))
    return folds


def estimate_trivial_bifurcation(branch: Branch, threshold: float = 0.0) -> Optional[float]:
    """
    λ where the branch meets u = 0: quadratic extrapolation of λ as a function of
    sup_norm through the three smallest nontrivial points (linear with two).
    """
    pts = [pt for pt in branch.points if pt.sup_norm > threshold]
    if len(pts) < 2:
        return None
    pts = sorted(pts, key=lambda pt: pt.sup_norm)[:3]
    x = np.array([pt.sup_norm for pt in pts])
    y = np.array([pt.lam for pt in pts])
    coeffs = np.polyfit(x, y, len(pts) - 1)
    return float(coeffs[-1])


# --------------------------------------------------
# Natural-parameter sweep
# --------------------------------------------------


def _fresh_solve(
    p: ProblemParams, mesh: Mesh, strategy: SweepStrategy, cfg: SolverConfig, eig_cache: dict
) -> SolveReport:
    if strategy == "warm_then_monotone":
        if "eig" not in eig_cache:
            eig_cache["eig"] = principal_eigenpair(mesh)
        return solve_by_sub_super(p, mesh, eig_cache["eig"], cfg)
    return global_minimize(p, mesh, np.zeros(mesh.size), cfg)


def sweep_lambda(
    p_template: ProblemParams,
    mesh: Mesh,
    lambdas: Sequence[float],
    strategy: SweepStrategy = "warm",
    cfg: Optional[SolverConfig] = None,
    u0: Optional[np.ndarray] = None,
) -> Branch:
    """
    Solve at each λ in order, warm-starting Newton from the previous solution.
    Failures and trivial limits become gap records.
    """
    cfg = cfg or SolverConfig()
    lams = [float(x) for x in lambdas]
    diffs = np.diff(lams)
    if diffs.size and not (np.all(diffs >= 0) or np.all(diffs <= 0)):
        raise ParameterError("lambdas must be ordered")

    branch = Branch()
    collapse = 10.0 * cfg.eps_reg
    warm = None if u0 is None else check_grid_function(mesh, u0)
    eig_cache: dict = {}

    for lam in lams:
        p = p_template.with_lambda(lam)
        report = None
        if warm is not None:
            report = newton_solve(p, mesh, warm, cfg)
        needs_fresh = report is None or not report.converged or report.sup_norm <= collapse
        if needs_fresh and (warm is None or strategy != "warm"):
            fresh = _fresh_solve(p, mesh, strategy, cfg, eig_cache)
            if report is None or (fresh.converged and fresh.sup_norm > collapse):
                report = fresh

        if report.converged and report.sup_norm > collapse:
            _record(branch, p, mesh, report.solution, 0.0)
            warm = report.solution
            continue

        reason = "trivial solution only" if report.converged else "; ".join(report.notes) or "not converged"
        branch.gaps.append(GapRecord(lam=lam, reason=f"{report.method}: {reason}"))
        logger.info("sweep gap at lambda=%.6g (%s)", lam, reason)

    branch.termination = "sweep_complete"
    branch.folds = detect_fold(branch)
    return branch
