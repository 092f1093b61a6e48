# autocat/services/descent.py
"""
Global energy minimization.

Sobolev-preconditioned steepest descent d = -K^-1 ∇E with an Armijo line
search on E, finished by a Newton polish once the residual is small. A zero
start is replaced by the best negative-energy multiple of a positive bump.
"""

import logging
from typing import List, Optional

import numpy as np
from scipy.sparse.linalg import splu

from ..engine.grid import (
    check_grid_function,
    energy,
    energy_gradient,
    fiber,
    residual,
    sup_norm,
)
from ..engine.nonlinearity import apriori_bound, coercive_regime, reaction_slopes, reaction_values
from ..programs.models_grid import Mesh
from ..programs.models_problem import ProblemParams
from ..programs.models_solve import SolveReport, SolverConfig
from .newton import build_report, semismooth_newton, snap_small

logger = logging.getLogger(__name__)

ARMIJO = 1e-4
MIN_STEP = 2.0**-30
POLISH_RESIDUAL = 1e-4
SEED_SCALES = np.geomspace(1e-6, 1.0, 121)


def seed_bump(mesh: Mesh) -> np.ndarray:
    """Positive bump vanishing at the boundary, unit sup-norm."""
    x = mesh.nodes
    if mesh.domain.kind == "interval":
        bump = np.sin(np.pi * (x - mesh.domain.a) / mesh.domain.length)
    else:
        bump = np.cos(0.5 * np.pi * x / mesh.domain.radius)
    return bump / np.max(bump)


def negative_energy_seed(p: ProblemParams, mesh: Mesh) -> Optional[np.ndarray]:
    """
    t·v with v = seed_bump and t minimizing the fiber E(t v) over a log scan up
    to the a-priori bound; None when no scanned t gives E(t v) < 0.
    """
    v = seed_bump(mesh)
    top = apriori_bound(p) or 1.0
    scales = top * SEED_SCALES
    values = np.array([fiber(p, mesh, v, float(t)) for t in scales])
    i = int(np.argmin(values))
    if not values[i] < 0:
        return None
    return scales[i] * v


def global_minimize(
    p: ProblemParams, mesh: Mesh, u0: np.ndarray, cfg: Optional[SolverConfig] = None
) -> SolveReport:
    """Minimize E_λ from u0; a zero start is seeded with a negative-energy bump."""
    cfg = cfg or SolverConfig()
    u = check_grid_function(mesh, u0).copy()
    notes: List[str] = []

    def value(s: np.ndarray) -> np.ndarray:
        return reaction_values(p, s)

    def slope(s: np.ndarray) -> np.ndarray:
        return reaction_slopes(p, s)

    if not coercive_regime(p):
        msg = f"energy is not known to be bounded below for m={p.m}, n={p.n}, lambda={p.lam}"
        logger.warning(msg)
        notes.append(msg)

    if not np.any(u > 0):
        seed = negative_energy_seed(p, mesh)
        if seed is None:
            notes.append("no negative-energy multiple of the seed bump; staying at 0")
        else:
            u = seed

    lu = splu(mesh.stiffness.tocsc())
    E = energy(p, mesh, u)
    g = energy_gradient(p, mesh, u)
    res = sup_norm(g / mesh.weights)
    it = 0
    polish_tried = False
    converged = res <= cfg.tol
    while not converged and it < cfg.max_iter:
        if res <= POLISH_RESIDUAL and not polish_tried:
            polish_tried = True
            polished, ok, newton_it, newton_res, newton_notes = semismooth_newton(
                mesh, u, value, slope, cfg
            )
            E_polished = energy(p, mesh, polished) if ok else np.inf
            if ok and E_polished <= E + 1e-10 * (1.0 + abs(E)):
                u, res, E = polished, newton_res, E_polished
                it += newton_it
                converged = True
                break
            notes.append("newton polish rejected; continuing descent")
            notes.extend(newton_notes)

        it += 1
        d = -lu.solve(g)
        descent_slope = float(g @ d)
        alpha = 1.0
        while True:
            trial = u + alpha * d
            E_trial = energy(p, mesh, trial)
            if E_trial <= E + ARMIJO * alpha * descent_slope or alpha <= MIN_STEP:
                break
            alpha *= 0.5
        if alpha <= MIN_STEP and E_trial > E:
            notes.append(f"line search stalled at iteration {it}")
            break
        u, E = trial, E_trial
        g = energy_gradient(p, mesh, u)
        res = sup_norm(g / mesh.weights)
        converged = res <= cfg.tol
        logger.debug("descent %d: energy=%.12g residual=%.3e step=%.3g", it, E, res, alpha)

    if converged:
        u = snap_small(mesh, u, value, cfg.eps_reg)
        res = sup_norm(residual(p, mesh, u))
        E = energy(p, mesh, u)
    elif it >= cfg.max_iter:
        notes.append(f"iteration cap {cfg.max_iter} reached")
    report = build_report(p, mesh, u, "global_minimize", converged, it, res, cfg, notes)
    logger.info(
        "global_minimize lambda=%.6g converged=%s iterations=%d energy=%.6g sup=%.6g",
        p.lam, converged, it, report.energy_value, report.sup_norm,
    )
    return report
