# autocat/engine/nonlinearity.py
"""
Scalar mathematics of the reaction term

    f(s) = s^m - s^(m+1) - λ s^n,   F(s) = ∫_0^s f.

Array arguments are accepted everywhere a scalar is; results keep the shape.
"""

import logging
import math
from typing import Optional, Union

import numpy as np
from scipy.optimize import brentq

from ..errors import ParameterError
from ..programs.models_problem import (
    CaseCode,
    CaseTag,
    ProblemParams,
    UniquenessCertificate,
)

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# exponent comparisons (n == m, n == m + 1, m == 1) use this absolute slack
EXPONENT_TOL = 1e-12

# dense grid used when no analytic case decides the Brezis-Oswald sign
CERTIFICATE_GRID = 4000
CERTIFICATE_MARGIN = 1e-12


def same(a: float, b: float) -> bool:
    return abs(a - b) <= EXPONENT_TOL


# --------------------------------------------------
# Evaluation
# --------------------------------------------------


def _nonnegative(s: ArrayLike, name: str) -> np.ndarray:
    arr = np.asarray(s, dtype=float)
    if np.any(arr < 0) or np.any(~np.isfinite(arr)):
        raise ParameterError(f"{name} needs finite s >= 0")
    return arr


def _out(value: np.ndarray, s: ArrayLike) -> ArrayLike:
    return float(value) if np.ndim(s) == 0 else value


def reaction_values(p: ProblemParams, s: np.ndarray) -> np.ndarray:
    """f on nonnegative values without validation (internal hot path)."""
    return s**p.m - s ** (p.m + 1.0) - p.lam * s**p.n


def reaction_slopes(p: ProblemParams, s: np.ndarray) -> np.ndarray:
    """f' on strictly positive values without validation."""
    return p.m * s ** (p.m - 1.0) - (p.m + 1.0) * s**p.m - p.lam * p.n * s ** (p.n - 1.0)


def primitive_values(p: ProblemParams, s: np.ndarray) -> np.ndarray:
    return (
        s ** (p.m + 1.0) / (p.m + 1.0)
        - s ** (p.m + 2.0) / (p.m + 2.0)
        - p.lam * s ** (p.n + 1.0) / (p.n + 1.0)
    )


def reaction(p: ProblemParams, s: ArrayLike) -> ArrayLike:
    """f(s) = s^m - s^(m+1) - λ s^n for s >= 0; exactly 0 at s = 0."""
    arr = _nonnegative(s, "reaction")
    return _out(reaction_values(p, arr), s)


def reaction_derivative(p: ProblemParams, s: ArrayLike) -> ArrayLike:
    """f'(s) for s > 0; may diverge as s -> 0+ when m < 1 or n < 1."""
    arr = np.asarray(s, dtype=float)
    if np.any(arr <= 0) or np.any(~np.isfinite(arr)):
        raise ParameterError("reaction_derivative needs finite s > 0")
    return _out(reaction_slopes(p, arr), s)


def primitive(p: ProblemParams, s: ArrayLike) -> ArrayLike:
    """F(s) = s^(m+1)/(m+1) - s^(m+2)/(m+2) - λ s^(n+1)/(n+1)."""
    arr = _nonnegative(s, "primitive")
    return _out(primitive_values(p, arr), s)


# names used throughout the documentation of the model
f_eval = reaction
f_prime = reaction_derivative
F_primitive = primitive


# --------------------------------------------------
# Classification
# --------------------------------------------------


def classify(m: float, n: float) -> CaseTag:
    """
    Map admissible exponents to the case taxonomy.

      - C1: 0 < n < m < 1
      - C2: 0 < m <= n <= 1, m < 1        (subcase n=m)
      - C3: 0 < m < 1 < n < m + 1
      - C4: 0 < m < 1, m + 1 <= n         (subcase n=m+1)
      - C5: 0 < n <= m = 1                (subcase n=m, the logistic case)
      - C6: m = 1 < n <= 2                (subcase n=2)
      - C7: m = 1, 2 < n
    """
    if not (0 < m <= 1) or not n > 0 or not (math.isfinite(m) and math.isfinite(n)):
        raise ParameterError(f"exponents need 0 < m <= 1 and n > 0, got m={m}, n={n}")

    if same(m, 1.0):
        if n < 1.0 or same(n, 1.0):
            return CaseTag(tag=CaseCode.C5, subcase="n=m" if same(n, 1.0) else None)
        if n < 2.0 or same(n, 2.0):
            return CaseTag(tag=CaseCode.C6, subcase="n=2" if same(n, 2.0) else None)
        return CaseTag(tag=CaseCode.C7)

    if same(n, m):
        return CaseTag(tag=CaseCode.C2, subcase="n=m")
    if n < m:
        return CaseTag(tag=CaseCode.C1)
    if n < 1.0 or same(n, 1.0):
        return CaseTag(tag=CaseCode.C2)
    if same(n, m + 1.0):
        return CaseTag(tag=CaseCode.C4, subcase="n=m+1")
    if n < m + 1.0:
        return CaseTag(tag=CaseCode.C3)
    return CaseTag(tag=CaseCode.C4)


# --------------------------------------------------
# Regime predicates
# --------------------------------------------------


def positivity_guaranteed(p: ProblemParams) -> bool:
    """
    Strong maximum principle regimes: every nontrivial nonnegative solution is
    positive in Ω with negative normal derivative on ∂Ω.
    """
    return p.lam <= 0 or p.n >= 1.0 or p.n > p.m


def palais_smale_regime(p: ProblemParams) -> bool:
    crit = p.critical_exponent
    if not (p.m < crit - 2.0 and p.n < crit - 1.0):
        return False
    return (p.lam >= 0 and p.m < 1.0 and p.n <= p.m + 1.0) or p.m < p.n - 1.0


def coercive_regime(p: ProblemParams) -> bool:
    """Energy bounded below on nonnegative states."""
    if p.n < p.m + 1.0 and not same(p.n, p.m + 1.0):
        return True
    if same(p.n, p.m + 1.0):
        return p.lam > -1.0
    return p.lam >= 0


def existence_hypothesis(p: ProblemParams) -> Optional[str]:
    """
    Hypothesis under which large constants are supersolutions, or None.
    """
    if same(p.n, p.m + 1.0):
        return "n=m+1, lambda>-1" if p.lam > -1.0 else None
    if p.lam >= 0:
        return "lambda>=0"
    if p.n < p.m + 1.0:
        return "lambda<0, n<m+1"
    return None


# --------------------------------------------------
# A-priori bound
# --------------------------------------------------


def _largest_root_above_one(p: ProblemParams) -> float:
    def phi(M: float) -> float:
        return float(reaction_values(p, np.asarray(M)))

    lo, hi = 1.0, 2.0
    while phi(hi) > 0:
        lo, hi = hi, 2.0 * hi
        if hi > 1e12:
            raise ParameterError("a-priori bound root not bracketed")
    return brentq(phi, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)


def apriori_bound(p: ProblemParams) -> Optional[float]:
    """
    Sup-norm ceiling M(λ) for every solution, or None when no bound is known.

      - λ >= 0: 1, or min{1, λ^(1/(m-n))} when λ > 0 and n > m
      - λ < 0 with n < m + 1, or -1 < λ < 0 with n = m + 1: the root above 1 of
        M^m - M^(m+1) - λ M^n
    """
    if p.lam >= 0:
        if p.lam > 0 and p.n > p.m and not same(p.n, p.m):
            return min(1.0, p.lam ** (1.0 / (p.m - p.n)))
        return 1.0
    if same(p.n, p.m + 1.0):
        if p.lam > -1.0:
            return _largest_root_above_one(p)
        return None
    if p.n < p.m + 1.0:
        return _largest_root_above_one(p)
    return None


# --------------------------------------------------
# Uniqueness (Brezis-Oswald sign of f(s) - s f'(s))
# --------------------------------------------------


def brezis_oswald_terms(p: ProblemParams, s: np.ndarray) -> np.ndarray:
    """(1-m)s^m + m s^(m+1) + λ(n-1)s^n, i.e. f(s) - s f'(s)."""
    return (1.0 - p.m) * s**p.m + p.m * s ** (p.m + 1.0) + p.lam * (p.n - 1.0) * s**p.n


def local_uniqueness_certificate(p: ProblemParams) -> bool:
    """
    Explicit sufficient condition for uniqueness when λ < 0 and 1 < n < m + 1.

    At s* = (|λ|(n-1)(n-m)/m)^(1/(1+m-n)), where |λ|(n-1)s^(n-m) - m s is
    maximal, checks 1 - m > |λ|(n-1)(s*)^(n-m) - m s*.
    """
    if not (p.lam < 0 and 1.0 < p.n < p.m + 1.0) or same(p.n, p.m + 1.0):
        return False
    a = -p.lam
    s_star = (a * (p.n - 1.0) * (p.n - p.m) / p.m) ** (1.0 / (1.0 + p.m - p.n))
    return 1.0 - p.m > a * (p.n - 1.0) * s_star ** (p.n - p.m) - p.m * s_star


def certify_uniqueness(p: ProblemParams, s_max: float) -> UniquenessCertificate:
    """
    Decide f(s) - s f'(s) > 0 on (0, s_max].

    The analytic cases are tried first; anything else is decided on a dense
    log grid and flagged "numerical".
    """
    if not s_max > 0:
        raise ParameterError("s_max must be positive")
    m, n, lam = p.m, p.n, p.lam

    if same(n, m + 1.0) and lam > -1.0:
        return UniquenessCertificate(holds=True, provenance="analytic", condition="n=m+1, lambda>-1")
    if lam >= 0 and n >= 1.0:
        return UniquenessCertificate(holds=True, provenance="analytic", condition="lambda>=0, n>=1")
    if lam > 0 and n > m and not same(n, m) and s_max <= lam ** (1.0 / (m - n)):
        return UniquenessCertificate(
            holds=True, provenance="analytic", condition="lambda>0, n>m, s_max<=lambda^(1/(m-n))"
        )
    if same(n, m) and 0 < lam < 1.0:
        return UniquenessCertificate(holds=True, provenance="analytic", condition="0<lambda<1, n=m")
    if lam <= 0 and n <= 1.0:
        # m = 1 with λ = 0 still has the strictly positive term m s^(m+1)
        return UniquenessCertificate(holds=True, provenance="analytic", condition="lambda<=0, n<=1")
    if local_uniqueness_certificate(p):
        return UniquenessCertificate(holds=True, provenance="analytic", condition="concave majorant, lambda<0")

    s = np.geomspace(s_max * 1e-10, s_max, CERTIFICATE_GRID)
    values = brezis_oswald_terms(p, s)
    scale = (
        (1.0 - m) * s**m + m * s ** (m + 1.0) + abs(lam * (n - 1.0)) * s**n
    )
    holds = bool(np.all(values > CERTIFICATE_MARGIN * scale))
    logger.debug("numerical uniqueness certificate for %s on (0, %s]: %s", p, s_max, holds)
    return UniquenessCertificate(holds=holds, provenance="numerical")


def uniqueness_certificate(p: ProblemParams, s_max: float) -> bool:
    """True implies at most one positive solution with sup-norm <= s_max."""
    return certify_uniqueness(p, s_max).holds
