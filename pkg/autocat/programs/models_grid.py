# autocat/programs/models_grid.py

import math
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import sparse
from scipy.special import gamma


def unit_ball_volume(dim: int) -> float:
    """|B_1| in R^N: 2, pi, 4pi/3, ..."""
    return math.pi ** (dim / 2.0) / gamma(dim / 2.0 + 1.0)


class Domain(BaseModel):
    """
    Either an interval (a, b) or a ball of radius R in R^N treated radially.
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal["interval", "radial_ball"] = "interval"
    a: float = 0.0
    b: float = 1.0
    dim: int = Field(1, ge=1)
    radius: float = Field(1.0, gt=0)

    @model_validator(mode="after")
    def _check(self) -> "Domain":
        if self.kind == "interval" and not self.b > self.a:
            raise ValueError(f"interval needs b > a, got ({self.a}, {self.b})")
        return self

    @classmethod
    def interval(cls, a: float, b: float) -> "Domain":
        return cls(kind="interval", a=a, b=b, dim=1)

    @classmethod
    def radial_ball(cls, dim: int, radius: float) -> "Domain":
        return cls(kind="radial_ball", dim=dim, radius=radius)

    @property
    def length(self) -> float:
        """Interval length, or the radius for a ball."""
        if self.kind == "interval":
            return self.b - self.a
        return self.radius

    @property
    def measure(self) -> float:
        if self.kind == "interval":
            return self.b - self.a
        return unit_ball_volume(self.dim) * self.radius ** self.dim


class Mesh(BaseModel):
    """
    Uniform finite-difference grid on a Domain.

    `weights` are nodal quadrature weights, `stiffness` is the symmetric matrix K
    with u^T K u = ∫|∇u|^2 (discrete), so that -Δ_h = diag(weights)^-1 K.
    Arrays are read-only.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    domain: Domain
    cells: int
    h: float
    nodes: np.ndarray
    weights: np.ndarray
    stiffness: sparse.csr_matrix

    @property
    def size(self) -> int:
        return int(self.nodes.shape[0])

    @property
    def dim(self) -> int:
        return self.domain.dim

    @property
    def coordinate_name(self) -> str:
        return "x" if self.domain.kind == "interval" else "r"

    def operator(self) -> sparse.csr_matrix:
        """-Δ_h as a sparse matrix acting on nodal values."""
        return sparse.diags(1.0 / self.weights).dot(self.stiffness).tocsr()


class EigenPair(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    lambda1: float = Field(..., gt=0)
    phi1: np.ndarray
    iterations: int = 0
    residual: float = 0.0
