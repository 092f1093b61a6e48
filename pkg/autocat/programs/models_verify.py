# autocat/programs/models_verify.py

from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field

from .models_problem import CaseCode, CaseIIIWindow, ProblemParams, VerdictKind

Positivity = Literal["strictly_positive", "boundary_flat", "interior_dead_core", "zero"]


class MeshSpec(BaseModel):
    kind: Literal["interval", "radial_ball"] = "interval"
    size: float = Field(1.0, gt=0)  # interval length or ball radius
    cells: int = Field(128, ge=4)


class Expectation(BaseModel):
    """
    Structured claim checked by a scenario.

    `claim` picks the check; the remaining fields are its arguments.
    """

    claim: Literal[
        "existence",
        "nonexistence",
        "energy_sign",
        "bound",
        "monotone_branch",
        "fold_bound",
        "threshold",
        "stability",
        "window",
        "flat_profile",
        "verdict",
        "agreement",
        "bifurcation",
        "rescaling",
    ]
    verdict: Optional[VerdictKind] = None
    sign: Optional[Literal[-1, 1]] = None
    value: Optional[float] = None
    tolerance: float = 1e-8
    quantity: Optional[str] = None  # threshold name for "threshold" claims


class Scenario(BaseModel):
    id: str
    case_tag: CaseCode
    params: ProblemParams
    mesh: MeshSpec = Field(default_factory=MeshSpec)
    lambdas: List[float] = Field(default_factory=list)
    expectation: Expectation
    citation: str


class VerifyReport(BaseModel):
    scenario_id: str
    status: Literal["passed", "failed", "error"]
    citation: str = ""
    measured: Dict[str, float] = Field(default_factory=dict)
    tolerances: Dict[str, float] = Field(default_factory=dict)
    runtime_seconds: float = 0.0
    evidence: List[str] = Field(default_factory=list)
    detail: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.status == "passed"


class ThreeSolutionReport(BaseModel):
    """Window diagnostic for 1 < n < m + 1 and the solves attempted inside it."""

    length: float
    size_bound: float
    constants: Dict[str, float]
    constant_gaps: Dict[str, float] = Field(default_factory=dict)
    window: CaseIIIWindow
    lam: Optional[float] = None
    attempts: Dict[str, bool] = Field(default_factory=dict)
    energies: Dict[str, float] = Field(default_factory=dict)
    distances: Dict[str, float] = Field(default_factory=dict)
    distinct: int = 0
    notes: List[str] = Field(default_factory=list)
