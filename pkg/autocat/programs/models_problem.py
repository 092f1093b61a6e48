# autocat/programs/models_problem.py

import math
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class ProblemParams(BaseModel):
    """
    Exponents, reaction parameter and dimension of

        -Δu = (1 - u) u^m - λ u^n   in Ω,   u = 0 on ∂Ω.

    `lam` also accepts the key "lambda" on input.
    """

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    m: float = Field(..., gt=0, le=1)
    n: float = Field(..., gt=0)
    lam: float = Field(0.0, alias="lambda")
    dim: int = Field(1, ge=1)

    @model_validator(mode="after")
    def _finite(self) -> "ProblemParams":
        if not all(math.isfinite(x) for x in (self.m, self.n, self.lam)):
            raise ValueError("m, n and lambda must be finite")
        return self

    @property
    def critical_exponent(self) -> float:
        """2* = 2N/(N-2), +inf when N <= 2."""
        if self.dim <= 2:
            return math.inf
        return 2.0 * self.dim / (self.dim - 2)

    def with_lambda(self, lam: float) -> "ProblemParams":
        return self.model_copy(update={"lam": float(lam)})


class CaseCode(str, Enum):
    C1 = "C1"  # 0 < n < m < 1
    C2 = "C2"  # 0 < m <= n <= 1, m < 1
    C3 = "C3"  # 0 < m < 1 < n < m + 1
    C4 = "C4"  # 0 < m < 1, m + 1 <= n
    C5 = "C5"  # 0 < n <= m = 1
    C6 = "C6"  # m = 1 < n <= 2
    C7 = "C7"  # m = 1, 2 < n


class CaseTag(BaseModel):
    model_config = ConfigDict(frozen=True)

    tag: CaseCode
    subcase: Optional[str] = None  # "n=m", "n=m+1" or "n=2"

    def __str__(self) -> str:
        if self.subcase:
            return f"{self.tag.value} ({self.subcase})"
        return self.tag.value


class VerdictKind(str, Enum):
    NONE = "none"
    AT_LEAST_ONE = "at_least_one"
    UNIQUE_POSITIVE = "unique_positive"
    AT_LEAST_TWO = "at_least_two"
    AT_LEAST_THREE = "at_least_three"
    INFINITELY_MANY = "infinitely_many"
    UNKNOWN = "unknown"


class ExistenceVerdict(BaseModel):
    kind: VerdictKind
    citations: List[str] = Field(default_factory=list)
    positive: bool = False
    notes: List[str] = Field(default_factory=list)


class UniquenessCertificate(BaseModel):
    holds: bool
    provenance: str  # "analytic" or "numerical"
    condition: Optional[str] = None


class OpenInterval(BaseModel):
    """Open interval (lower, upper); empty when upper <= lower."""

    lower: float
    upper: float

    @property
    def empty(self) -> bool:
        return not self.upper > self.lower

    def __contains__(self, x: float) -> bool:
        return self.lower < x < self.upper


class CaseIIIWindow(BaseModel):
    lambda_under: float
    lambda_over: float
    s_under: float
    s_hat_over: float
    ordered: bool  # lambda_under < lambda_over
    heights_ordered: bool  # s_under < s_hat_over


class RescaledProblem(BaseModel):
    """-Δv = mu v^m + v^(m+1) with v = amplitude_scale * u."""

    mu: float
    amplitude_scale: float
