# autocat/services/functional_constants.py
"""
Functional constants A = (1/q) sup{∫|v|^q : ∫|∇v|^2 = 1}.

Two independent routes:
  - Euler-Lagrange: Newton on -Δw = w^(q-1), w > 0 (solved in a rescaled
    form), then A = (1/q) ∫w^q / (∫|∇w|^2)^(q/2);
  - ascent: nonlinear power iteration v <- K^-1 W v^(q-1) on the quotient.
q = 2 reduces to 1/(2 λ1).
"""

import logging
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from scipy.sparse.linalg import splu

from ..engine.eigen import principal_eigenpair
from ..engine.grid import build_mesh, dirichlet_norm_squared, integrate
from ..errors import ParameterError, SolverError
from ..programs.models_grid import Domain, Mesh
from ..programs.models_solve import FunctionalConstant, SolverConfig
from .newton import semismooth_newton

logger = logging.getLogger(__name__)

ASCENT_MAX_ITER = 20000
ASCENT_TOL = 1e-14
UNIT_BALL_CELLS = 256
# relative residual at which a stalled Euler-Lagrange Newton is accepted
EL_STALL_TOL = 1e-7


def quotient(mesh: Mesh, v: np.ndarray, q: float) -> float:
    """(1/q) ∫|v|^q / (∫|∇v|^2)^(q/2)."""
    return integrate(mesh, np.abs(v) ** q) / dirichlet_norm_squared(mesh, v) ** (q / 2.0) / q


def euler_lagrange_value(mesh: Mesh, q: float, phi: np.ndarray, cfg: SolverConfig) -> Tuple[Optional[float], int, list]:
    """
    Newton on -Δz = c z^(q-1) from z = φ/max φ, with c = ∫|∇φ|^2 / ∫φ^q so that
    z stays O(1); w = c^(1/(q-2)) z solves the unscaled equation and the
    quotient is scale invariant. The residual is measured relative to c.
    """
    z0 = phi / np.max(phi)
    c = dirichlet_norm_squared(mesh, z0) / integrate(mesh, z0**q)
    scaled = cfg.model_copy(update={"tol": cfg.tol * c})
    z, ok, it, res, notes = semismooth_newton(
        mesh,
        z0,
        lambda s: c * s ** (q - 1.0),
        lambda s: c * (q - 1.0) * s ** (q - 2.0),
        scaled,
    )
    notes = list(notes)
    if not ok and np.isfinite(res) and res <= EL_STALL_TOL * c:
        notes.append(f"Newton stalled at relative residual {res / c:.3e}; accepted")
        ok = True
    if not ok or not np.all(z > 0):
        notes.append(f"Euler-Lagrange solve failed (relative residual {res / c:.3e})")
        return None, it, notes
    return quotient(mesh, z, q), it, notes


def ascent_value(mesh: Mesh, q: float, phi: np.ndarray, max_iter: int = ASCENT_MAX_ITER) -> float:
    lu = splu(mesh.stiffness.tocsc())
    v = phi.copy()
    value = quotient(mesh, v, q)
    for _ in range(max_iter):
        v = lu.solve(mesh.weights * np.abs(v) ** (q - 1.0))
        v /= np.max(np.abs(v))
        new = quotient(mesh, v, q)
        if abs(new - value) <= ASCENT_TOL * abs(new):
            return new
        value = new
    logger.warning("ascent for q=%.6g stopped at the iteration cap", q)
    return value


def functional_constant(
    mesh: Mesh, q: float, cfg: Optional[SolverConfig] = None, cross_check: bool = True
) -> FunctionalConstant:
    if not q > 1:
        raise ParameterError(f"exponent q must exceed 1, got {q}")
    if mesh.dim > 2 and not q < 2.0 * mesh.dim / (mesh.dim - 2):
        raise ParameterError(f"q={q} is not subcritical in dimension {mesh.dim}")
    cfg = cfg or SolverConfig(tol=1e-9, max_iter=200)
    eig = principal_eigenpair(mesh)

    if abs(q - 2.0) <= 1e-12:
        value = 1.0 / (2.0 * eig.lambda1)
        return FunctionalConstant(
            q=q, value=value, ascent_value=value, relative_gap=0.0, converged=True,
            iterations=eig.iterations,
        )

    value, it, notes = euler_lagrange_value(mesh, q, eig.phi1, cfg)
    ascent = ascent_value(mesh, q, eig.phi1) if cross_check or value is None else None
    gap = None
    if value is not None and ascent is not None:
        gap = abs(value - ascent) / abs(value)
    result = FunctionalConstant(
        q=q,
        value=value if value is not None else (ascent or float("nan")),
        ascent_value=ascent,
        relative_gap=gap,
        converged=value is not None,
        iterations=it,
        notes=notes,
    )
    logger.info("A(q=%.6g) = %.12g (ascent %s, gap %s)", q, result.value, ascent, gap)
    return result


def compute_Ap(mesh: Mesh, q: float, cfg: Optional[SolverConfig] = None) -> float:
    """Euler-Lagrange value of A for exponent q; SolverError when the solve fails."""
    result = functional_constant(mesh, q, cfg, cross_check=False)
    if not result.converged:
        raise SolverError("; ".join(result.notes) or f"functional constant q={q} did not converge")
    return result.value


@lru_cache(maxsize=64)
def unit_ball_constant(q: float, dim: int, cells: int = UNIT_BALL_CELLS) -> float:
    """A for exponent q on the unit ball of R^dim (the interval (-1, 1) when dim = 1)."""
    domain = Domain.interval(-1.0, 1.0) if dim == 1 else Domain.radial_ball(dim, 1.0)
    return compute_Ap(build_mesh(domain, cells), q)
