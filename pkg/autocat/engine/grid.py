# autocat/engine/grid.py
"""
Finite-difference discretization of the Dirichlet problem.

Interval meshes use the interior vertices a + i h (i = 1..cells-1). Radial
meshes use cell centers r_i = (i - 1/2) h (i = 1..cells); the cell volumes are
the quadrature weights, the flux through r = 0 vanishes by symmetry and the
outer value is reflected (ghost = -u) so that u = 0 at r = R.

Both layouts are written as a discrete energy

    E_h(u) = 1/2 u^T K u - sum_i w_i F(u_i^+),

with K assembled edge by edge, so that -Δ_h = W^-1 K is the exact gradient
of the quadratic part.
"""

import logging
import os
from typing import Optional, Tuple

import numpy as np
import pandas as pd
from scipy import sparse

from ..errors import ParameterError
from ..programs.models_grid import Domain, Mesh, unit_ball_volume
from ..programs.models_problem import ProblemParams
from .nonlinearity import primitive_values, reaction_values

logger = logging.getLogger(__name__)

GridFunction = np.ndarray

MIN_CELLS = 4


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=float)
    arr.setflags(write=False)
    return arr


# --------------------------------------------------
# Mesh construction
# --------------------------------------------------


def _interval_mesh(domain: Domain, cells: int) -> Mesh:
    h = domain.length / cells
    nodes = domain.a + h * np.arange(1, cells)
    size = cells - 1
    weights = np.full(size, h)
    # every one of the `cells` edges contributes (Δu)^2 / h
    main = np.full(size, 2.0 / h)
    off = np.full(size - 1, -1.0 / h)
    stiffness = sparse.csr_matrix(sparse.diags([off, main, off], [-1, 0, 1]))
    return Mesh(
        domain=domain,
        cells=cells,
        h=h,
        nodes=_readonly(nodes),
        weights=_readonly(weights),
        stiffness=stiffness,
    )


def _radial_mesh(domain: Domain, cells: int) -> Mesh:
    N = domain.dim
    R = domain.radius
    h = R / cells
    surface = N * unit_ball_volume(N)  # |S^(N-1)|, equals 2 for N = 1
    nodes = h * (np.arange(1, cells + 1) - 0.5)
    edges = h * np.arange(cells + 1)  # cell faces 0, h, ..., R
    weights = surface * (edges[1:] ** N - edges[:-1] ** N) / N

    # interior faces k = 1..cells-1 couple nodes k-1 and k
    face = surface * edges[1:-1] ** (N - 1) / h
    main = np.zeros(cells)
    main[:-1] += face
    main[1:] += face
    # outer half edge of length h/2 with slope -2u/h
    main[-1] += 2.0 * surface * R ** (N - 1) / h
    stiffness = sparse.csr_matrix(sparse.diags([-face, main, -face], [-1, 0, 1]))
    return Mesh(
        domain=domain,
        cells=cells,
        h=h,
        nodes=_readonly(nodes),
        weights=_readonly(weights),
        stiffness=stiffness,
    )


def build_mesh(domain: Domain, cells: int) -> Mesh:
    """Uniform mesh with `cells` cells; radial meshes stagger the first node at h/2."""
    if int(cells) != cells or cells < MIN_CELLS:
        raise ParameterError(f"need an integer number of cells >= {MIN_CELLS}, got {cells}")
    cells = int(cells)
    if domain.kind == "interval":
        return _interval_mesh(domain, cells)
    return _radial_mesh(domain, cells)


# --------------------------------------------------
# Grid functions
# --------------------------------------------------


def check_grid_function(mesh: Mesh, u: np.ndarray) -> np.ndarray:
    arr = np.asarray(u, dtype=float)
    if arr.shape != (mesh.size,):
        raise ParameterError(f"grid function has shape {arr.shape}, mesh needs ({mesh.size},)")
    return arr


def positive_part(u: np.ndarray) -> np.ndarray:
    return np.maximum(u, 0.0)


def negative_part(u: np.ndarray) -> np.ndarray:
    """u^- = max(-u, 0), so that u = u^+ - u^-."""
    return np.maximum(-u, 0.0)


def sup_norm(u: np.ndarray) -> float:
    return float(np.max(np.abs(u))) if u.size else 0.0


def l2_norm(mesh: Mesh, u: np.ndarray) -> float:
    return float(np.sqrt(np.dot(mesh.weights, u * u)))


def integrate(mesh: Mesh, values: np.ndarray) -> float:
    return float(np.dot(mesh.weights, values))


def dirichlet_norm_squared(mesh: Mesh, u: np.ndarray) -> float:
    """Discrete ∫|∇u|^2."""
    return float(u @ (mesh.stiffness @ u))


def grid_function_frame(mesh: Mesh, u: np.ndarray) -> pd.DataFrame:
    u = check_grid_function(mesh, u)
    return pd.DataFrame({mesh.coordinate_name: mesh.nodes, "u": u})


def write_grid_function(path: str, mesh: Mesh, u: np.ndarray) -> str:
    """CSV with columns (x or r, u), coordinates ascending."""
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    grid_function_frame(mesh, u).to_csv(path, index=False, float_format="%.17g")
    return path


def read_grid_function(path: str, mesh: Mesh) -> np.ndarray:
    df = pd.read_csv(path)
    coord = mesh.coordinate_name
    if coord not in df.columns or "u" not in df.columns:
        raise ParameterError(f"{path}: expected columns ({coord}, u), got {list(df.columns)}")
    coords = df[coord].to_numpy(dtype=float)
    if coords.shape != mesh.nodes.shape or not np.allclose(coords, mesh.nodes, rtol=0, atol=1e-12 * mesh.domain.length):
        raise ParameterError(f"{path}: nodes do not match the mesh")
    return check_grid_function(mesh, df["u"].to_numpy(dtype=float))


# --------------------------------------------------
# Operators
# --------------------------------------------------


def laplacian_apply(
    mesh: Mesh, u: np.ndarray, boundary: Optional[Tuple[float, float]] = None
) -> np.ndarray:
    """
    Apply the positive Dirichlet operator -Δ_h.

    `boundary` sets nonzero end values (g_a, g_b) on interval meshes; the
    default is the homogeneous problem.
    """
    u = check_grid_function(mesh, u)
    out = (mesh.stiffness @ u) / mesh.weights
    if boundary is not None:
        if mesh.domain.kind != "interval":
            raise ParameterError("boundary values are only supported on interval meshes")
        out = out.copy()
        out[0] -= boundary[0] / mesh.h**2
        out[-1] -= boundary[1] / mesh.h**2
    return out


def residual(p: ProblemParams, mesh: Mesh, u: np.ndarray) -> np.ndarray:
    """Nodal residual -Δ_h u - f(u^+)."""
    u = check_grid_function(mesh, u)
    return (mesh.stiffness @ u) / mesh.weights - reaction_values(p, positive_part(u))


def residual_norm(p: ProblemParams, mesh: Mesh, u: np.ndarray) -> float:
    return sup_norm(residual(p, mesh, u))


def energy(p: ProblemParams, mesh: Mesh, u: np.ndarray) -> float:
    """E_λ(u) = 1/2 ∫|∇u|^2 - ∫F(u^+)."""
    u = check_grid_function(mesh, u)
    return 0.5 * dirichlet_norm_squared(mesh, u) - integrate(
        mesh, primitive_values(p, positive_part(u))
    )


def energy_gradient(p: ProblemParams, mesh: Mesh, u: np.ndarray) -> np.ndarray:
    """Exact gradient of `energy`: K u - W f(u^+)."""
    u = check_grid_function(mesh, u)
    return mesh.stiffness @ u - mesh.weights * reaction_values(p, positive_part(u))


def _fiber_integrals(p: ProblemParams, mesh: Mesh, v: np.ndarray) -> Tuple[float, float, float, float]:
    v = check_grid_function(mesh, v)
    if not np.any(v != 0):
        raise ParameterError("fibers need v != 0")
    vp = positive_part(v)
    return (
        dirichlet_norm_squared(mesh, v),
        integrate(mesh, vp ** (p.m + 1.0)),
        integrate(mesh, vp ** (p.m + 2.0)),
        integrate(mesh, vp ** (p.n + 1.0)),
    )


def fiber(p: ProblemParams, mesh: Mesh, v: np.ndarray, t: float) -> float:
    """φ_v(t) = E_λ(t v)."""
    if not t > 0:
        raise ParameterError("fiber needs t > 0")
    grad2, a, b, c = _fiber_integrals(p, mesh, v)
    m, n = p.m, p.n
    return (
        0.5 * t * t * grad2
        - t ** (m + 1.0) / (m + 1.0) * a
        + t ** (m + 2.0) / (m + 2.0) * b
        + p.lam * t ** (n + 1.0) / (n + 1.0) * c
    )


def fiber_derivative(p: ProblemParams, mesh: Mesh, v: np.ndarray, t: float) -> float:
    """d/dt φ_v(t)."""
    if not t > 0:
        raise ParameterError("fiber needs t > 0")
    grad2, a, b, c = _fiber_integrals(p, mesh, v)
    return t * grad2 - t**p.m * a + t ** (p.m + 1.0) * b + p.lam * t**p.n * c
