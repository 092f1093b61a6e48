# autocat/engine/eigen.py

import logging
from typing import Optional

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal
from scipy.sparse.linalg import splu

from ..errors import SolverError
from ..programs.models_grid import EigenPair, Mesh

logger = logging.getLogger(__name__)

EIGEN_MAX_ITER = 500


def principal_eigenpair(mesh: Mesh, tol: float = 1e-8, max_iter: int = EIGEN_MAX_ITER) -> EigenPair:
    """
    Inverse power iteration for K φ = λ W φ.

    φ1 is scaled to unit sup-norm and made positive; λ1 is the Rayleigh
    quotient. Raises SolverError when ||W^-1 K φ - λ φ||_∞ stays above tol.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    K = mesh.stiffness
    w = mesh.weights
    lu = splu(K.tocsc())

    phi = np.ones(mesh.size)
    lam = 0.0
    res = np.inf
    for it in range(1, max_iter + 1):
        phi = lu.solve(w * phi)
        phi /= phi[np.argmax(np.abs(phi))]
        Kphi = K @ phi
        lam = float(phi @ Kphi) / float(phi @ (w * phi))
        res = float(np.max(np.abs(Kphi / w - lam * phi)))
        logger.debug("inverse iteration %d: lambda=%.17g residual=%.3e", it, lam, res)
        if res <= tol:
            break
    else:
        raise SolverError(f"principal eigenpair did not converge: residual {res:.3e} after {max_iter} steps")

    if np.any(phi <= 0):
        raise SolverError("principal eigenfunction is not positive on the mesh")
    return EigenPair(lambda1=lam, phi1=phi, iterations=it, residual=res)


def smallest_eigenvalue(mesh: Mesh, potential: np.ndarray) -> Optional[float]:
    """
    Smallest eigenvalue of -Δ_h + diag(potential).

    K is tridiagonal on every mesh layout, so the symmetrized operator
    W^-1/2 K W^-1/2 + diag(potential) goes straight to LAPACK.
    """
    K = mesh.stiffness
    w = mesh.weights
    d = K.diagonal() / w + potential
    e = K.diagonal(1) / np.sqrt(w[:-1] * w[1:])
    try:
        values = eigh_tridiagonal(d, e, eigvals_only=True, select="i", select_range=(0, 0))
    except (LinAlgError, ValueError) as exc:
        logger.warning("tridiagonal eigen-solve failed: %s", exc)
        return None
    if not np.isfinite(values[0]):
        return None
    return float(values[0])
