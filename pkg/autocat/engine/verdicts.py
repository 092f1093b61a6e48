# autocat/engine/verdicts.py
"""
Existence / uniqueness decision table.

Each branch names the results backing it through keys of RESULTS. The table
never extrapolates: outside every stated hypothesis the verdict is "unknown".
"""

import math
from typing import Dict, List, Optional, Tuple

from ..programs.models_problem import (
    CaseCode,
    ExistenceVerdict,
    ProblemParams,
    VerdictKind,
)
from .nonlinearity import (
    apriori_bound,
    classify,
    local_uniqueness_certificate,
    positivity_guaranteed,
    same,
    uniqueness_certificate,
)
from .thresholds import (
    threshold_caseIV_nonexistence,
    threshold_caseV,
    threshold_caseVI,
    threshold_caseVII,
    threshold_fold_caseI,
)

# result key -> one-line statement
RESULTS: Dict[str, str] = {
    "apriori-bound": "every solution satisfies ||u|| <= M(lambda)",
    "sub-super-existence": "m < 1: positive solution from c*phi1 and a large constant",
    "m1-sign-restriction": "m = 1, lambda1 >= 1: a solution forces lambda < 0",
    "m1-sub-super-existence": "m = 1, lambda1 < 1: positive solution by sub/supersolutions",
    "brezis-oswald-uniqueness": "f(s) - s f'(s) > 0 gives at most one positive solution",
    "case1-fold-bound": "n < m: no solution above the fold bound; minimizer with E < 0 below the fold",
    "case1-mountain-pass": "n < m admissible: second solution with E > 0",
    "case1-flat-profile": "n < m: compact-support profile exists iff lambda < lambda_c",
    "equal-exponent-threshold": "n = m: positive solution iff lambda < 1",
    "case2-monotone-branch": "m < n <= 1: unique positive solution for all lambda, decreasing in lambda",
    "case3-local-uniqueness": "1 < n < m + 1, lambda < 0: explicit uniqueness certificate",
    "case3-three-solutions": "1 < n < m + 1: three positive solutions inside the window",
    "case4-nonexistence-bound": "n = m + 1: no solution below -1 - lambda1^(1/(1-m))(1-m)m^(m/(1-m))",
    "case4-rescaling": "n = m + 1, lambda < -1: rescaled convex-concave problem",
    "case4-superlinear": "n > m + 1: unique positive solution for lambda >= 0",
    "m1-sublinear-threshold": "m = 1, n < 1, lambda1 < 1: no positive solution above threshold_caseV",
    "logistic-threshold": "m = n = 1: positive solution iff lambda < 1 - lambda1",
    "m1-superlinear-bound": "m = 1, 1 < n < 2, lambda1 > 1: no solution above threshold_caseVI",
    "m1-quadratic": "m = 1, n = 2: eigenvalue reductions at lambda = -1",
    "m1-supercubic-bound": "m = 1, n > 2, lambda1 < 1: no solution below threshold_caseVII",
    "m1-supercubic-negative": "m = 1, n > 2, lambda1 >= 1: solutions only for lambda < 0",
}

V = VerdictKind


def _v(kind: VerdictKind, *citations: str, notes: Optional[List[str]] = None) -> ExistenceVerdict:
    return ExistenceVerdict(kind=kind, citations=list(citations), notes=notes or [])


def _unique_if_certified(p: ProblemParams, *citations: str) -> ExistenceVerdict:
    bound = apriori_bound(p)
    if bound is not None and uniqueness_certificate(p, bound):
        return _v(V.UNIQUE_POSITIVE, *citations, "brezis-oswald-uniqueness")
    return _v(V.AT_LEAST_ONE, *citations)


# --------------------------------------------------
# m < 1
# --------------------------------------------------


def _case1(p: ProblemParams) -> ExistenceVerdict:
    if p.lam <= 0:
        return _unique_if_certified(p, "sub-super-existence")
    if p.lam > threshold_fold_caseI(p.m, p.n):
        return _v(V.NONE, "case1-fold-bound")
    return _v(
        V.UNKNOWN,
        "case1-fold-bound",
        notes=["two solutions below the (non-explicit) fold; fold location is not closed-form"],
    )


def _case2(p: ProblemParams) -> ExistenceVerdict:
    if same(p.n, p.m):
        if p.lam >= 1.0:
            return _v(V.NONE, "equal-exponent-threshold")
        return _unique_if_certified(p, "equal-exponent-threshold", "sub-super-existence")
    return _unique_if_certified(p, "case2-monotone-branch", "sub-super-existence")


def _case3(p: ProblemParams, window: Optional[Tuple[float, float]]) -> ExistenceVerdict:
    if p.lam >= 0:
        return _unique_if_certified(p, "sub-super-existence")
    if window is not None and window[0] < p.lam < window[1]:
        return _v(V.AT_LEAST_THREE, "case3-three-solutions", "sub-super-existence")
    if local_uniqueness_certificate(p):
        return _v(V.UNIQUE_POSITIVE, "case3-local-uniqueness", "sub-super-existence")
    return _v(V.AT_LEAST_ONE, "sub-super-existence")


def _case4(p: ProblemParams, lambda1: Optional[float]) -> ExistenceVerdict:
    if same(p.n, p.m + 1.0):
        if same(p.lam, -1.0):
            # reduces to -Δu = u^m
            return _v(V.UNIQUE_POSITIVE, "case4-rescaling", "brezis-oswald-uniqueness")
        if p.lam > -1.0:
            return _unique_if_certified(p, "sub-super-existence")
        if lambda1 is not None and p.lam < threshold_caseIV_nonexistence(p.m, lambda1):
            return _v(V.NONE, "case4-nonexistence-bound")
        return _v(V.UNKNOWN, "case4-rescaling", notes=["existence only near lambda = -1"])
    if p.lam >= 0:
        return _unique_if_certified(p, "case4-superlinear")
    return _v(V.UNKNOWN, "case4-superlinear", notes=["lambda < 0 threshold is not explicit"])


# --------------------------------------------------
# m = 1
# --------------------------------------------------


def _case5(p: ProblemParams, lambda1: float) -> ExistenceVerdict:
    if same(p.n, 1.0):
        if p.lam < 1.0 - lambda1:
            return _v(V.UNIQUE_POSITIVE, "logistic-threshold")
        return _v(V.NONE, "logistic-threshold")
    if p.lam < 0:
        return _unique_if_certified(p, "sub-super-existence")
    if lambda1 >= 1.0:
        return _v(V.NONE, "m1-sign-restriction")
    if p.lam == 0:
        return _unique_if_certified(p, "m1-sub-super-existence")
    if p.lam > threshold_caseV(p.n, lambda1):
        return _v(V.NONE, "m1-sublinear-threshold")
    return _v(V.UNKNOWN, "m1-sublinear-threshold")


def _case6(p: ProblemParams, lambda1: float) -> ExistenceVerdict:
    if same(p.n, 2.0):
        if p.lam > -1.0:
            if lambda1 < 1.0 and not math.isclose(lambda1, 1.0, rel_tol=1e-9):
                return _v(V.UNIQUE_POSITIVE, "m1-quadratic", "m1-sub-super-existence")
            return _v(V.NONE, "m1-quadratic", "m1-sign-restriction")
        if same(p.lam, -1.0):
            if math.isclose(lambda1, 1.0, rel_tol=1e-9):
                return _v(V.INFINITELY_MANY, "m1-quadratic")
            return _v(V.NONE, "m1-quadratic")
        if lambda1 > 1.0 and p.dim < 6:
            return _v(V.AT_LEAST_ONE, "m1-quadratic")
        if lambda1 > 1.0:
            return _v(V.UNKNOWN, "m1-quadratic")
        return _v(V.NONE, "m1-quadratic")

    if math.isclose(lambda1, 1.0, rel_tol=1e-9):
        if p.lam < 0:
            return _v(V.AT_LEAST_ONE, "m1-sub-super-existence")
        return _v(V.NONE, "m1-sign-restriction")
    if lambda1 < 1.0:
        if p.lam >= 0:
            return _unique_if_certified(p, "m1-sub-super-existence")
        return _v(V.AT_LEAST_ONE, "m1-sub-super-existence")
    if p.lam >= 0:
        return _v(V.NONE, "m1-sign-restriction")
    if p.lam > threshold_caseVI(p.n, lambda1):
        return _v(V.NONE, "m1-superlinear-bound")
    return _v(V.UNKNOWN, "m1-superlinear-bound")


def _case7(p: ProblemParams, lambda1: float) -> ExistenceVerdict:
    if lambda1 < 1.0 and not math.isclose(lambda1, 1.0, rel_tol=1e-9):
        if p.lam >= 0:
            return _unique_if_certified(p, "m1-sub-super-existence")
        if p.lam < threshold_caseVII(p.n, lambda1):
            return _v(V.NONE, "m1-supercubic-bound")
        return _v(V.UNKNOWN, "m1-supercubic-bound")
    if p.lam >= 0:
        return _v(V.NONE, "m1-sign-restriction", "m1-supercubic-negative")
    if p.n < p.critical_exponent - 1.0:
        return _v(V.AT_LEAST_ONE, "m1-supercubic-negative")
    return _v(V.UNKNOWN, "m1-supercubic-negative")


# --------------------------------------------------
# Entry point
# --------------------------------------------------


def existence_verdict(
    p: ProblemParams,
    lambda1: Optional[float] = None,
    window: Optional[Tuple[float, float]] = None,
) -> ExistenceVerdict:
    """
    Strongest verdict the covered results support for (m, n, λ, λ1).

    `lambda1` is the principal Dirichlet eigenvalue of the domain; it is only
    needed when m = 1 or for the n = m + 1 nonexistence bound. `window` is a
    computed (λ_under, λ_over) pair for 1 < n < m + 1.
    """
    tag = classify(p.m, p.n).tag

    if tag in (CaseCode.C5, CaseCode.C6, CaseCode.C7) and lambda1 is None:
        return _v(V.UNKNOWN, notes=["m = 1 verdicts need lambda1"])

    if tag == CaseCode.C1:
        verdict = _case1(p)
    elif tag == CaseCode.C2:
        verdict = _case2(p)
    elif tag == CaseCode.C3:
        verdict = _case3(p, window)
    elif tag == CaseCode.C4:
        verdict = _case4(p, lambda1)
    elif tag == CaseCode.C5:
        verdict = _case5(p, lambda1)
    elif tag == CaseCode.C6:
        verdict = _case6(p, lambda1)
    else:
        verdict = _case7(p, lambda1)

    if verdict.kind not in (V.NONE, V.UNKNOWN):
        verdict.positive = positivity_guaranteed(p)
    if apriori_bound(p) is not None:
        verdict.citations.append("apriori-bound")
    return verdict
