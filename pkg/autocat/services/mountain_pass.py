# autocat/services/mountain_pass.py
"""
Discrete mountain-pass search.

A path of P states joins u_start (default 0) to u_end. The initial path is the
straight segment with one state placed on its highest point. Every iteration
  - moves interior states along the Sobolev gradient -K^-1 ∇E with its
    component along the path tangent removed,
  - moves the highest state uphill along the tangent and downhill across it
    (climbing image),
  - re-spaces the states on either side of the highest one uniformly in the
    K-norm arclength.
Once the highest state is close to critical it is polished by Newton.
"""

import logging
from typing import List, Optional, Tuple

import numpy as np
from scipy.sparse.linalg import splu

from ..engine.grid import check_grid_function, energy, energy_gradient, sup_norm
from ..engine.nonlinearity import palais_smale_regime, reaction_slopes, reaction_values
from ..errors import SolverError
from ..programs.models_grid import Mesh
from ..programs.models_problem import ProblemParams
from ..programs.models_solve import SolveReport, SolverConfig
from .newton import build_report, semismooth_newton

logger = logging.getLogger(__name__)

PATH_NODES = 41
PATH_STEP = 0.1
PATH_MAX_STEPS = 4000
POLISH_RESIDUAL = 1e-3
COLLAPSE_MARGIN = 1e-12
# energy samples along the straight segment: log-spaced from 1e-6 plus uniform
BARRIER_SCAN = 400
# a state moves at most this fraction of the K-distance to its nearest neighbour per step
MAX_MOVE = 0.5


def _k_norm(mesh: Mesh, v: np.ndarray) -> float:
    return float(np.sqrt(max(v @ (mesh.stiffness @ v), 0.0)))


def _respace(mesh: Mesh, path: np.ndarray, anchor: Optional[int] = None) -> np.ndarray:
    """
    Redistribute path states uniformly in K-norm arclength, endpoints fixed.
    With an anchor, the two pieces on either side of it are respaced separately.
    """
    if anchor is not None and 0 < anchor < len(path) - 1:
        left = _respace(mesh, path[: anchor + 1])
        right = _respace(mesh, path[anchor:])
        return np.concatenate([left, right[1:]])
    seg = np.array([_k_norm(mesh, path[j + 1] - path[j]) for j in range(len(path) - 1)])
    s = np.concatenate([[0.0], np.cumsum(seg)])
    if s[-1] <= 0:
        return path
    target = np.linspace(0.0, s[-1], len(path))
    out = np.empty_like(path)
    out[0], out[-1] = path[0], path[-1]
    for j in range(1, len(path) - 1):
        k = int(np.searchsorted(s, target[j], side="right")) - 1
        k = min(max(k, 0), len(path) - 2)
        width = s[k + 1] - s[k]
        t = 0.0 if width <= 0 else (target[j] - s[k]) / width
        out[j] = (1.0 - t) * path[k] + t * path[k + 1]
    return out


def _initial_path(
    p: ProblemParams, mesh: Mesh, u_start: np.ndarray, u_end: np.ndarray, nodes: int
) -> Tuple[np.ndarray, float]:
    """
    Straight path with one state on the highest sampled point t_top of the
    segment; the states on each side are spread evenly in t. Returns (path, t_top).
    """
    ts = np.union1d(np.geomspace(1e-6, 1.0, BARRIER_SCAN), np.linspace(0.0, 1.0, BARRIER_SCAN + 1))
    ts = ts[(ts > 0.0) & (ts < 1.0)]
    heights = np.array([energy(p, mesh, (1.0 - t) * u_start + t * u_end) for t in ts])
    t_top = float(ts[int(np.argmax(heights))])
    j_top = int(np.clip(round(t_top * (nodes - 1)), 1, nodes - 2))
    t = np.concatenate([np.linspace(0.0, t_top, j_top + 1)[:-1], np.linspace(t_top, 1.0, nodes - j_top)])
    t = t[:, None]
    return (1.0 - t) * u_start[None, :] + t * u_end[None, :], t_top


def _finish(report: SolveReport, ps_regime: bool, t_top: float) -> SolveReport:
    report.diagnostics["palais_smale_regime"] = float(ps_regime)
    report.diagnostics["initial_barrier_t"] = t_top
    return report


def _polish(
    p: ProblemParams, mesh: Mesh, u: np.ndarray, floor: float, cfg: SolverConfig
) -> Optional[tuple]:
    """Newton from the highest state; kept only if it stays above the endpoint level."""
    polished, ok, it, res, _ = semismooth_newton(
        mesh,
        u,
        lambda s: reaction_values(p, s),
        lambda s: reaction_slopes(p, s),
        cfg,
    )
    if not ok or sup_norm(polished) <= 10.0 * cfg.eps_reg:
        return None
    if energy(p, mesh, polished) <= floor:
        return None
    return polished, it, res


def mountain_pass(
    p: ProblemParams,
    mesh: Mesh,
    u_end: np.ndarray,
    cfg: Optional[SolverConfig] = None,
    u_start: Optional[np.ndarray] = None,
    nodes: int = PATH_NODES,
    step: float = PATH_STEP,
    max_steps: int = PATH_MAX_STEPS,
) -> SolveReport:
    """
    Mountain-pass critical point between u_start (default 0) and u_end.

    Raises SolverError for a degenerate path: equal endpoints, or a zero start
    with E(u_end) >= 0. Path collapse and the step cap are reported.
    """
    cfg = cfg or SolverConfig()
    u_end = check_grid_function(mesh, u_end)
    u_start = np.zeros(mesh.size) if u_start is None else check_grid_function(mesh, u_start)
    if nodes < 3:
        raise SolverError("a path needs at least 3 states")
    if sup_norm(u_end - u_start) <= 10.0 * cfg.eps_reg:
        raise SolverError("mountain-pass endpoints coincide")
    E_start, E_end = energy(p, mesh, u_start), energy(p, mesh, u_end)
    if sup_norm(u_start) == 0.0 and not E_end < 0:
        raise SolverError(f"endpoint energy {E_end:.6g} is not below E(0) = 0")
    floor = max(E_start, E_end)

    lu = splu(mesh.stiffness.tocsc())
    path, t_top = _initial_path(p, mesh, u_start, u_end, nodes)
    notes: List[str] = []
    ps_regime = palais_smale_regime(p)
    if not ps_regime:
        notes.append("outside the Palais-Smale regime: min-max levels need not be attained")
        logger.warning("mountain pass at lambda=%.6g outside the Palais-Smale regime", p.lam)
    polish_tried_at = np.inf

    top_res = np.inf
    it = 0
    while it < max_steps:
        it += 1
        energies = np.array([energy(p, mesh, u) for u in path])
        j_max = 1 + int(np.argmax(energies[1:-1]))
        E_max = float(energies[j_max])
        if E_max <= floor + COLLAPSE_MARGIN * (1.0 + abs(floor)):
            notes.append(f"path collapse at step {it}: no barrier above the endpoints")
            top = path[j_max]
            report = build_report(p, mesh, top, "mountain_pass", False, it, top_res, cfg, notes)
            return _finish(report, ps_regime, t_top)

        grads = [energy_gradient(p, mesh, path[j]) for j in range(nodes)]
        top_res = sup_norm(grads[j_max] / mesh.weights)
        logger.debug("mountain pass %d: max energy=%.12g at state %d residual=%.3e", it, E_max, j_max, top_res)

        if top_res <= max(POLISH_RESIDUAL, cfg.tol) and top_res < 0.5 * polish_tried_at:
            polish_tried_at = top_res
            polished = _polish(p, mesh, path[j_max], floor, cfg)
            if polished is not None:
                u, newton_it, res = polished
                report = build_report(p, mesh, u, "mountain_pass", True, it + newton_it, res, cfg, notes)
                report.diagnostics["path_max_energy"] = E_max
                report.diagnostics["path_steps"] = float(it)
                logger.info(
                    "mountain_pass lambda=%.6g converged after %d path steps energy=%.6g sup=%.6g",
                    p.lam, it, report.energy_value, report.sup_norm,
                )
                return _finish(report, ps_regime, t_top)

        new_path = path.copy()
        for j in range(1, nodes - 1):
            tau = path[j + 1] - path[j - 1]
            norm = _k_norm(mesh, tau)
            if norm <= 0:
                continue
            tau = tau / norm
            sob = lu.solve(grads[j])
            along = float(grads[j] @ tau)
            if j == j_max:
                direction = -(sob - 2.0 * along * tau)
            else:
                direction = -(sob - along * tau)
            move = step * direction
            gap = min(_k_norm(mesh, path[j] - path[j - 1]), _k_norm(mesh, path[j + 1] - path[j]))
            limit = MAX_MOVE * gap
            size = _k_norm(mesh, move)
            if size > limit > 0:
                move *= limit / size
            new_path[j] = path[j] + move
        path = _respace(mesh, new_path, anchor=j_max)

    notes.append(f"path step cap {max_steps} reached (residual {top_res:.3e})")
    energies = np.array([energy(p, mesh, u) for u in path])
    top = path[1 + int(np.argmax(energies[1:-1]))]
    logger.info("mountain_pass lambda=%.6g did not converge: %s", p.lam, notes[-1])
    report = build_report(p, mesh, top, "mountain_pass", False, it, top_res, cfg, notes)
    return _finish(report, ps_regime, t_top)
