# autocat/services/scenarios.py
"""
Scenario registry.

Each scenario replays one result of the decision table (a key of
engine.verdicts.RESULTS) on a concrete mesh. SUITES assigns every result key
to exactly one case suite.
"""

from functools import lru_cache
from typing import Dict, List, Tuple

import numpy as np

from ..engine.thresholds import threshold_fold_caseI
from ..errors import ScenarioError
from ..programs.models_problem import CaseCode, ProblemParams, VerdictKind
from ..programs.models_verify import Expectation, MeshSpec, Scenario

TWO_PI = 6.283185307179586
# minimizer vs monotone iteration: seeded uniform draws of λ on the existence range
AGREEMENT_DRAWS = 10
AGREEMENT_SEED = 20240
AGREEMENT_RANGE = (-2.0, 0.9)

SUITES: Dict[CaseCode, Tuple[str, ...]] = {
    CaseCode.C1: (
        "apriori-bound",
        "sub-super-existence",
        "case1-fold-bound",
        "case1-mountain-pass",
        "case1-flat-profile",
    ),
    CaseCode.C2: (
        "equal-exponent-threshold",
        "case2-monotone-branch",
        "brezis-oswald-uniqueness",
    ),
    CaseCode.C3: ("case3-local-uniqueness", "case3-three-solutions"),
    CaseCode.C4: ("case4-nonexistence-bound", "case4-rescaling", "case4-superlinear"),
    CaseCode.C5: (
        "m1-sign-restriction",
        "m1-sub-super-existence",
        "m1-sublinear-threshold",
        "logistic-threshold",
    ),
    CaseCode.C6: ("m1-superlinear-bound", "m1-quadratic"),
    CaseCode.C7: ("m1-supercubic-bound", "m1-supercubic-negative"),
}


def _agreement_lambdas() -> List[float]:
    rng = np.random.default_rng(AGREEMENT_SEED)
    return sorted(float(x) for x in rng.uniform(*AGREEMENT_RANGE, size=AGREEMENT_DRAWS))


def _p(m: float, n: float, lam: float = 0.0, dim: int = 1) -> ProblemParams:
    return ProblemParams(m=m, n=n, lam=lam, dim=dim)


def _scenario(
    sid: str,
    tag: CaseCode,
    params: ProblemParams,
    citation: str,
    lambdas: List[float],
    expectation: Expectation,
    mesh: MeshSpec = MeshSpec(cells=64),
) -> Scenario:
    return Scenario(
        id=sid,
        case_tag=tag,
        params=params,
        mesh=mesh,
        lambdas=lambdas,
        expectation=expectation,
        citation=citation,
    )


def _case1() -> List[Scenario]:
    C = CaseCode.C1
    p = _p(0.5, 0.25)
    long = MeshSpec(size=10.0, cells=128)
    return [
        _scenario(
            "case1-apriori-bound-sweep", C, p, "apriori-bound",
            [-0.5, 0.0, 0.1, 0.2], Expectation(claim="bound"), mesh=long,
        ),
        _scenario(
            "case1-existence-nonpositive-lambda", C, p, "sub-super-existence",
            [-1.0, 0.0], Expectation(claim="existence"),
        ),
        _scenario(
            "case1-fold-threshold-formula", C, p, "case1-fold-bound",
            [], Expectation(claim="threshold", quantity="fold_caseI"),
        ),
        _scenario(
            "case1-no-solution-above-fold-bound", C, p, "case1-fold-bound",
            [0.6], Expectation(claim="nonexistence"), mesh=long,
        ),
        _scenario(
            "case1-minimizer-negative-energy", C, p, "case1-fold-bound",
            [0.05, 0.1], Expectation(claim="energy_sign", sign=-1), mesh=long,
        ),
        _scenario(
            "case1-single-fold-below-bound", C, p, "case1-fold-bound",
            [0.02], Expectation(claim="fold_bound", value=threshold_fold_caseI(0.5, 0.25), tolerance=1e-6),
            mesh=long,
        ),
        _scenario(
            "case1-mountain-pass-positive-energy", C, _p(0.8, 0.3), "case1-mountain-pass",
            [0.05], Expectation(claim="energy_sign", sign=1, tolerance=1e-6), mesh=long,
        ),
        _scenario(
            "case1-compact-support-threshold-formula", C, p, "case1-flat-profile",
            [], Expectation(claim="threshold", quantity="lambda_c"),
        ),
        _scenario(
            "case1-flat-profile-1d", C, p, "case1-flat-profile",
            [0.3], Expectation(claim="flat_profile", tolerance=1e-6),
        ),
    ]


def _case2() -> List[Scenario]:
    C = CaseCode.C2
    equal = _p(0.5, 0.5)
    mixed = _p(0.5, 0.75)
    return [
        _scenario(
            "case2-equal-exponent-existence", C, equal, "equal-exponent-threshold",
            [0.0, 0.5, 0.9], Expectation(claim="monotone_branch"),
        ),
        _scenario(
            "case2-equal-exponent-nonexistence", C, equal, "equal-exponent-threshold",
            [1.0, 1.2], Expectation(claim="nonexistence"),
        ),
        _scenario(
            "case2-equal-exponent-verdict", C, equal, "equal-exponent-threshold",
            [1.0], Expectation(claim="verdict", verdict=VerdictKind.NONE),
        ),
        _scenario(
            "case2-monotone-branch", C, mixed, "case2-monotone-branch",
            [-2.0, -1.0, 0.0, 0.5, 0.9], Expectation(claim="monotone_branch"),
        ),
        _scenario(
            "case2-linear-stability", C, mixed, "case2-monotone-branch",
            [-1.0, 0.5], Expectation(claim="stability", sign=1),
        ),
        _scenario(
            "case2-minimizer-monotone-agreement", C, mixed, "brezis-oswald-uniqueness",
            _agreement_lambdas(), Expectation(claim="agreement", tolerance=1e-6),
        ),
        _scenario(
            "case2-unique-verdict", C, mixed, "brezis-oswald-uniqueness",
            [0.0], Expectation(claim="verdict", verdict=VerdictKind.UNIQUE_POSITIVE),
        ),
    ]


def _case3() -> List[Scenario]:
    C = CaseCode.C3
    p = _p(0.5, 1.25)
    return [
        _scenario(
            "case3-local-uniqueness-verdict", C, p, "case3-local-uniqueness",
            [-0.1], Expectation(claim="verdict", verdict=VerdictKind.UNIQUE_POSITIVE),
        ),
        _scenario(
            "case3-existence-negative-lambda", C, p, "case3-local-uniqueness",
            [-0.1], Expectation(claim="existence"),
        ),
        _scenario(
            "case3-three-solution-window", C, p, "case3-three-solutions",
            [], Expectation(claim="window", tolerance=1e-5),
        ),
    ]


def _case4() -> List[Scenario]:
    C = CaseCode.C4
    critical = _p(0.5, 1.5)
    return [
        _scenario(
            "case4-critical-nonexistence", C, critical, "case4-nonexistence-bound",
            [-40.0], Expectation(claim="nonexistence"),
        ),
        _scenario(
            "case4-nonexistence-threshold-formula", C, critical, "case4-nonexistence-bound",
            [], Expectation(claim="threshold", quantity="caseIV"),
        ),
        _scenario(
            "case4-critical-unit-lambda-verdict", C, critical, "case4-rescaling",
            [-1.0], Expectation(claim="verdict", verdict=VerdictKind.UNIQUE_POSITIVE),
        ),
        _scenario(
            "case4-rescaled-problem", C, critical, "case4-rescaling",
            [-1.2], Expectation(claim="rescaling", tolerance=1e-8),
        ),
        _scenario(
            "case4-superlinear-existence", C, _p(0.5, 2.0), "case4-superlinear",
            [0.0, 1.0], Expectation(claim="existence"),
        ),
    ]


def _case5() -> List[Scenario]:
    C = CaseCode.C5
    sub = _p(1.0, 0.5)
    logistic = _p(1.0, 1.0)
    wide = MeshSpec(size=TWO_PI, cells=64)
    return [
        _scenario(
            "m1-positive-lambda-nonexistence", C, sub, "m1-sign-restriction",
            [0.5], Expectation(claim="nonexistence"),
        ),
        _scenario(
            "m1-sublinear-existence-small-eigenvalue", C, sub, "m1-sub-super-existence",
            [0.0], Expectation(claim="existence"), mesh=wide,
        ),
        _scenario(
            "m1-sublinear-threshold-formula", C, sub, "m1-sublinear-threshold",
            [], Expectation(claim="threshold", quantity="caseV"), mesh=wide,
        ),
        _scenario(
            "m1-sublinear-threshold-nonexistence", C, sub, "m1-sublinear-threshold",
            [0.35], Expectation(claim="nonexistence"), mesh=wide,
        ),
        _scenario(
            "logistic-existence-below-threshold", C, logistic, "logistic-threshold",
            [0.0, 0.7], Expectation(claim="existence"), mesh=wide,
        ),
        _scenario(
            "logistic-nonexistence-above-threshold", C, logistic, "logistic-threshold",
            [0.76], Expectation(claim="nonexistence"), mesh=wide,
        ),
        _scenario(
            "logistic-bifurcation-from-zero", C, logistic, "logistic-threshold",
            [0.5], Expectation(claim="bifurcation", quantity="logistic"), mesh=wide,
        ),
    ]


def _case6() -> List[Scenario]:
    C = CaseCode.C6
    p = _p(1.0, 1.5)
    quadratic = _p(1.0, 2.0)
    return [
        _scenario(
            "m1-superlinear-threshold-formula", C, p, "m1-superlinear-bound",
            [], Expectation(claim="threshold", quantity="caseVI"),
        ),
        _scenario(
            "m1-superlinear-nonexistence-above-bound", C, p, "m1-superlinear-bound",
            [-3.0], Expectation(claim="nonexistence"),
        ),
        _scenario(
            "m1-superlinear-existence-below-bound", C, p, "m1-superlinear-bound",
            [-20.0], Expectation(claim="existence"),
        ),
        _scenario(
            "m1-quadratic-nonexistence", C, quadratic, "m1-quadratic",
            [0.5], Expectation(claim="nonexistence"),
        ),
        _scenario(
            "m1-quadratic-verdict", C, quadratic, "m1-quadratic",
            [0.0], Expectation(claim="verdict", verdict=VerdictKind.NONE),
        ),
    ]


def _case7() -> List[Scenario]:
    C = CaseCode.C7
    p = _p(1.0, 3.0)
    wide = MeshSpec(size=TWO_PI, cells=64)
    return [
        _scenario(
            "m1-supercubic-threshold-formula", C, p, "m1-supercubic-bound",
            [], Expectation(claim="threshold", quantity="caseVII"), mesh=wide,
        ),
        _scenario(
            "m1-supercubic-nonexistence-below-bound", C, p, "m1-supercubic-bound",
            [-0.5], Expectation(claim="nonexistence"), mesh=wide,
        ),
        _scenario(
            "m1-supercubic-existence-nonnegative", C, p, "m1-supercubic-bound",
            [0.0, 1.0], Expectation(claim="existence"), mesh=wide,
        ),
        _scenario(
            "m1-supercubic-positive-lambda-nonexistence", C, p, "m1-supercubic-negative",
            [0.5], Expectation(claim="nonexistence"),
        ),
        _scenario(
            "m1-supercubic-verdict", C, p, "m1-supercubic-negative",
            [0.5], Expectation(claim="verdict", verdict=VerdictKind.NONE),
        ),
    ]


@lru_cache(maxsize=1)
def registry() -> Dict[str, Scenario]:
    scenarios: Dict[str, Scenario] = {}
    for build in (_case1, _case2, _case3, _case4, _case5, _case6, _case7):
        for s in build():
            if s.id in scenarios:
                raise ScenarioError(f"duplicate scenario id {s.id!r}")
            scenarios[s.id] = s
    return scenarios


def get_scenario(scenario_id: str) -> Scenario:
    try:
        return registry()[scenario_id]
    except KeyError:
        raise ScenarioError(f"unknown scenario id {scenario_id!r}") from None


def scenario_suite(case_tag) -> List[Scenario]:
    """Scenarios of one case suite, in registration order."""
    try:
        tag = CaseCode(case_tag)
    except ValueError:
        raise ScenarioError(f"unknown case tag {case_tag!r}") from None
    return [s for s in registry().values() if s.case_tag == tag]
