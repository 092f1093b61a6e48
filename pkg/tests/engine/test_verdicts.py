# tests/engine/test_verdicts.py

import math

import pytest

from autocat.engine.verdicts import RESULTS, existence_verdict
from autocat.programs.models_problem import ProblemParams, VerdictKind as V

PI2 = math.pi**2


@pytest.mark.parametrize(
    "m, n, lam, lambda1, window, kind",
    [
        (0.5, 0.5, 1.0, PI2, None, V.NONE),
        (0.5, 0.5, 0.5, PI2, None, V.UNIQUE_POSITIVE),
        (0.5, 0.25, 0.6, PI2, None, V.NONE),
        (0.5, 0.25, 0.3, PI2, None, V.UNKNOWN),
        (0.5, 0.75, 0.0, PI2, None, V.UNIQUE_POSITIVE),
        (0.5, 1.25, -0.1, PI2, None, V.UNIQUE_POSITIVE),
        (0.5, 1.25, -0.5, PI2, (-1.0, -0.1), V.AT_LEAST_THREE),
        (0.5, 1.5, -1.0, PI2, None, V.UNIQUE_POSITIVE),
        (0.5, 1.5, -40.0, PI2, None, V.NONE),
        (0.5, 2.0, -1.0, PI2, None, V.UNKNOWN),
        (1.0, 1.0, 0.7, 0.25, None, V.UNIQUE_POSITIVE),
        (1.0, 1.0, 0.8, 0.25, None, V.NONE),
        (1.0, 0.5, 0.5, PI2, None, V.NONE),
        (1.0, 2.0, -1.0, 1.0, None, V.INFINITELY_MANY),
        (1.0, 2.0, 0.0, PI2, None, V.NONE),
        (1.0, 3.0, 0.5, PI2, None, V.NONE),
        (1.0, 3.0, -0.6, 0.5, None, V.NONE),
    ],
)
def test_decision_table(m, n, lam, lambda1, window, kind):
    verdict = existence_verdict(ProblemParams(m=m, n=n, lam=lam), lambda1=lambda1, window=window)
    assert verdict.kind == kind
    assert verdict.citations
    assert set(verdict.citations) <= set(RESULTS)


def test_m_one_needs_lambda1():
    verdict = existence_verdict(ProblemParams(m=1.0, n=1.5, lam=0.0))
    assert verdict.kind == V.UNKNOWN
    assert verdict.notes


def test_positive_flag_only_on_positive_verdicts():
    assert existence_verdict(ProblemParams(m=0.5, n=0.75, lam=0.0)).positive
    assert not existence_verdict(ProblemParams(m=0.5, n=0.5, lam=2.0)).positive


def test_apriori_citation_when_bound_known():
    verdict = existence_verdict(ProblemParams(m=0.5, n=0.75, lam=-1.0))
    assert "apriori-bound" in verdict.citations
    verdict = existence_verdict(ProblemParams(m=0.5, n=2.0, lam=-1.0))
    assert "apriori-bound" not in verdict.citations
