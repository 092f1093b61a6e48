# autocat/services/newton.py

import logging
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from ..engine.grid import check_grid_function, energy, positive_part, sup_norm
from ..engine.nonlinearity import reaction_slopes, reaction_values
from ..programs.models_grid import Mesh
from ..programs.models_problem import ProblemParams
from ..programs.models_solve import SolveMethod, SolveReport, SolverConfig

logger = logging.getLogger(__name__)

Values = Callable[[np.ndarray], np.ndarray]

# line search: halve down to this fraction of the initial damping
MIN_STEP = 1.0 / 1024
# divergence: residual grew by this factor over the last DIVERGENCE_WINDOW steps
DIVERGENCE_FACTOR = 10.0
DIVERGENCE_WINDOW = 5
# Tikhonov shift (relative to the largest diagonal entry) after a singular factorization
SINGULAR_SHIFT = 1e-8


def _nodal_residual(mesh: Mesh, u: np.ndarray, value: Values) -> np.ndarray:
    return (mesh.stiffness @ u) / mesh.weights - value(positive_part(u))


def _jacobian(mesh: Mesh, u: np.ndarray, slope: Values, eps_reg: float) -> sparse.csc_matrix:
    """-Δ_h - diag(f'(u)) with f' taken at max(u, eps_reg) on positive nodes, 0 elsewhere."""
    d = np.zeros_like(u)
    pos = u > 0
    if np.any(pos):
        d[pos] = slope(np.maximum(u[pos], eps_reg))
    A = sparse.diags(1.0 / mesh.weights) @ mesh.stiffness
    return (A - sparse.diags(d)).tocsc()


def _solve_linear(J: sparse.csc_matrix, rhs: np.ndarray) -> Optional[np.ndarray]:
    """Sparse LU, retried once with a small diagonal shift when singular."""
    try:
        step = splu(J).solve(rhs)
        if np.all(np.isfinite(step)):
            return step
    except RuntimeError:
        pass
    shift = SINGULAR_SHIFT * max(1.0, float(np.max(np.abs(J.diagonal()))))
    logger.debug("singular Newton matrix, retrying with shift %.3e", shift)
    try:
        step = splu((J + shift * sparse.identity(J.shape[0], format="csc")).tocsc()).solve(rhs)
    except RuntimeError:
        return None
    return step if np.all(np.isfinite(step)) else None


def snap_small(mesh: Mesh, u: np.ndarray, value: Values, eps_reg: float) -> np.ndarray:
    """
    Zero out nodal values with |u| < eps_reg unless doing so raises the residual.
    """
    snapped = np.where(np.abs(u) < eps_reg, 0.0, u)
    if np.array_equal(snapped, u):
        return u
    before = sup_norm(_nodal_residual(mesh, u, value))
    after = sup_norm(_nodal_residual(mesh, snapped, value))
    return snapped if after <= before else u


def semismooth_newton(
    mesh: Mesh,
    u0: np.ndarray,
    value: Values,
    slope: Values,
    cfg: SolverConfig,
) -> Tuple[np.ndarray, bool, int, float, List[str]]:
    """
    Damped Newton for -Δ_h u = g(u^+) with a generic reaction g.

    Returns (u, converged, iterations, residual_norm, notes).
    """
    u = check_grid_function(mesh, u0).copy()
    r = _nodal_residual(mesh, u, value)
    res = sup_norm(r)
    history = [res]
    notes: List[str] = []

    it = 0
    while res > cfg.tol and it < cfg.max_iter:
        it += 1
        J = _jacobian(mesh, u, slope, cfg.eps_reg)
        step = _solve_linear(J, -r)
        if step is None:
            notes.append(f"singular linearization at iteration {it}")
            break

        alpha = cfg.damping
        while True:
            trial = u + alpha * step
            r_trial = _nodal_residual(mesh, trial, value)
            res_trial = sup_norm(r_trial)
            if res_trial < (1.0 - 1e-4 * alpha) * res or alpha <= MIN_STEP * cfg.damping:
                break
            alpha *= 0.5

        u, r, res = trial, r_trial, res_trial
        history.append(res)
        logger.debug("newton %d: residual=%.3e step=%.3g", it, res, alpha)

        if not np.isfinite(res):
            notes.append("non-finite residual")
            break
        if len(history) > DIVERGENCE_WINDOW and res > DIVERGENCE_FACTOR * history[-1 - DIVERGENCE_WINDOW]:
            notes.append(f"divergence: residual grew {DIVERGENCE_FACTOR:g}x over {DIVERGENCE_WINDOW} steps")
            break

    converged = bool(np.isfinite(res) and res <= cfg.tol)
    if converged:
        u = snap_small(mesh, u, value, cfg.eps_reg)
        res = sup_norm(_nodal_residual(mesh, u, value))
        converged = res <= cfg.tol
    elif it >= cfg.max_iter and not notes:
        notes.append(f"iteration cap {cfg.max_iter} reached")
    return u, converged, it, res, notes


def build_report(
    p: ProblemParams,
    mesh: Mesh,
    u: np.ndarray,
    method: SolveMethod,
    converged: bool,
    iterations: int,
    residual_norm: float,
    cfg: SolverConfig,
    notes: Optional[List[str]] = None,
) -> SolveReport:
    sup = sup_norm(u)
    return SolveReport(
        method=method,
        converged=converged,
        iterations=iterations,
        residual_norm=residual_norm,
        solution=u,
        lam=p.lam,
        energy_value=energy(p, mesh, u) if np.all(np.isfinite(u)) else float("nan"),
        sup_norm=sup,
        trivial=bool(converged and sup <= 10.0 * cfg.eps_reg),
        notes=notes or [],
    )


def newton_solve(
    p: ProblemParams, mesh: Mesh, u0: np.ndarray, cfg: Optional[SolverConfig] = None
) -> SolveReport:
    """Damped semismooth Newton on -Δ_h u - f(u^+) = 0."""
    cfg = cfg or SolverConfig()

    def value(s: np.ndarray) -> np.ndarray:
        return reaction_values(p, s)

    def slope(s: np.ndarray) -> np.ndarray:
        return reaction_slopes(p, s)

    u, converged, it, res, notes = semismooth_newton(mesh, u0, value, slope, cfg)
    report = build_report(p, mesh, u, "newton", converged, it, res, cfg, notes)
    logger.info(
        "newton lambda=%.6g converged=%s iterations=%d residual=%.3e sup=%.6g",
        p.lam, converged, it, res, report.sup_norm,
    )
    return report
