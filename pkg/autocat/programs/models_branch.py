# autocat/programs/models_branch.py

from typing import List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

Termination = Literal[
    "left_bound",
    "right_bound",
    "step_failure",
    "trivial_collapse",
    "step_limit",
    "sweep_complete",
]


class ContinuationConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    ds: float = Field(0.05, gt=0)
    ds_min: float = Field(1e-8, gt=0)
    ds_max: float = Field(0.5, gt=0)
    max_steps: int = Field(400, gt=0)
    lam_min: float = -10.0
    lam_max: float = 10.0
    direction: Literal[1, -1] = 1
    tol: float = Field(1e-9, gt=0, lt=1)
    max_corrector_iter: int = Field(15, gt=0)
    eps_reg: float = Field(1e-12, gt=0)
    collapse_threshold: Optional[float] = Field(None, gt=0)
    collapse_count: int = Field(3, gt=0)


class StabilityResult(BaseModel):
    value: Optional[float] = None
    truncated: bool = False


class BranchPoint(BaseModel):
    lam: float
    sup_norm: float = Field(..., ge=0)
    l2_norm: float = Field(..., ge=0)
    energy: float
    stability_indicator: Optional[float] = None
    truncated: bool = False
    residual_norm: float = 0.0
    arclength: float = 0.0
    within_apriori_bound: Optional[bool] = None
    solution_id: int


class FoldRecord(BaseModel):
    lam_star: float
    index: int  # branch point where Δλ changes sign
    index_before: int
    index_after: int


class GapRecord(BaseModel):
    lam: float
    reason: str


class Branch(BaseModel):
    """
    Ordered samples of a solution curve. `solutions[k]` belongs to the point whose
    `solution_id` is k.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    points: List[BranchPoint] = Field(default_factory=list)
    folds: List[FoldRecord] = Field(default_factory=list)
    gaps: List[GapRecord] = Field(default_factory=list)
    termination: Optional[Termination] = None
    solutions: List[np.ndarray] = Field(default_factory=list, exclude=True)

    def lambdas(self) -> np.ndarray:
        return np.array([pt.lam for pt in self.points], dtype=float)

    def sup_norms(self) -> np.ndarray:
        return np.array([pt.sup_norm for pt in self.points], dtype=float)


class DiagramPreset(BaseModel):
    """Fixed parameter set behind one bifurcation diagram."""

    model_config = ConfigDict(frozen=True)

    name: str
    m: float = Field(..., gt=0, le=1)
    n: float = Field(..., gt=0)
    length: float = Field(1.0, gt=0)
    cells: int = Field(64, ge=4)
    lam0: float = 0.0
    continuation: ContinuationConfig = Field(default_factory=ContinuationConfig)
    description: str = ""
