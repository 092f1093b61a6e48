# autocat/programs/models_solve.py

from typing import Dict, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

SolveMethod = Literal[
    "newton",
    "monotone_iteration",
    "global_minimize",
    "mountain_pass",
    "euler_lagrange",
]


class SolverConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    tol: float = Field(1e-10, gt=0, lt=1)
    max_iter: int = Field(500, gt=0)
    eps_reg: float = Field(1e-12, gt=0)
    damping: float = Field(1.0, gt=0, le=1)


class SolveReport(BaseModel):
    """
    Outcome of a single solve.

    `solution` is kept out of JSON dumps; exporters write it to its own CSV and
    store the file name in `solution_file`.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    method: SolveMethod
    converged: bool
    iterations: int
    residual_norm: float
    solution: np.ndarray = Field(exclude=True)
    lam: float
    energy_value: float
    sup_norm: float
    trivial: bool = False
    notes: List[str] = Field(default_factory=list)
    diagnostics: Dict[str, float] = Field(default_factory=dict)
    solution_file: Optional[str] = None


class SubsolutionResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    values: np.ndarray = Field(exclude=True)
    c: float
    valid: bool
    halvings: int


class ShootConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    rtol: float = Field(1e-11, gt=0)
    atol: float = Field(1e-13, gt=0)
    r_max: float = Field(200.0, gt=0)
    r_start: float = Field(1e-8, gt=0)
    blowup: float = Field(1e6, gt=0)
    samples: int = Field(401, ge=3)
    slope_tol: float = Field(1e-8, gt=0)
    max_bisections: int = Field(200, gt=0)


class ShootResult(BaseModel):
    """
    Radial orbit from u(0) = a, u'(0) = 0.

    `first_zero` is None when the orbit turns back (or blows up) before reaching 0.
    `profile` columns are r, u, du_dr.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    initial_height: float = Field(..., gt=0)
    first_zero: Optional[float] = None
    slope_at_zero: float = 0.0
    profile: np.ndarray = Field(exclude=True)
    stop_reason: Literal["zero", "turning_point", "blowup", "r_max"] = "zero"
    flat: bool = False
    notes: List[str] = Field(default_factory=list)

    @property
    def discriminant(self) -> float:
        """Shooting discriminant: u'(R) when R exists, +1 otherwise (energy deficit)."""
        if self.first_zero is None:
            return 1.0
        return self.slope_at_zero


class NonexistenceProbe(BaseModel):
    """Numerical surrogate for nonexistence: no method found a nontrivial solution."""

    attempts: int
    methods: List[str]
    nontrivial_found: bool
    largest_sup_norm: float
    notes: List[str] = Field(default_factory=list)


class FunctionalConstant(BaseModel):
    """
    A = (1/q) sup{∫|v|^q : ∫|∇v|^2 = 1} on a mesh, from the Euler-Lagrange
    solve with the ascent value as a cross-check.
    """

    q: float = Field(..., gt=1)
    value: float
    ascent_value: Optional[float] = None
    relative_gap: Optional[float] = None
    converged: bool
    iterations: int = 0
    notes: List[str] = Field(default_factory=list)
