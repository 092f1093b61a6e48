# tests/engine/test_thresholds.py

import math

import numpy as np
import pytest

from autocat.engine import scalar
from autocat.engine.thresholds import (
    abc_rescale,
    caseIb_admissible,
    caseIII_window,
    lambda_c,
    logistic_threshold,
    threshold_caseIV_nonexistence,
    threshold_caseV,
    threshold_caseVI,
    threshold_caseVII,
    threshold_fold_caseI,
)
from autocat.errors import ParameterError
from autocat.programs.models_problem import ProblemParams

DRAWS = 200


def test_spot_values():
    # max_s s^0.25 - s^1.25 is reached at s = 0.2
    assert threshold_fold_caseI(0.5, 0.25) == pytest.approx(0.2**0.25 * 0.8, rel=1e-14)
    assert threshold_fold_caseI(0.5, 0.25) == pytest.approx(0.534992, abs=1e-6)
    assert lambda_c(0.5, 0.25) == pytest.approx(0.50656, abs=1e-5)
    assert threshold_caseVII(3.0, 0.5) == pytest.approx(-0.5, rel=1e-14)
    assert logistic_threshold(0.25) == 0.75


def test_fold_bound_is_below_one_and_above_lambda_c():
    rng = np.random.default_rng(7)
    for _ in range(50):
        m = rng.uniform(0.05, 0.95)
        n = rng.uniform(0.01, m - 0.01)
        fold = threshold_fold_caseI(m, n)
        assert 0 < fold < 1
        # F has a positive zero only below lambda_c, and F < 0 at the fold
        assert lambda_c(m, n) < fold


def test_caseI_formulas_match_oracles():
    rng = np.random.default_rng(0)
    for _ in range(DRAWS):
        m = rng.uniform(0.05, 0.95)
        n = rng.uniform(0.02, m - 0.02)
        assert threshold_fold_caseI(m, n) == pytest.approx(scalar.fold_caseI_oracle(m, n), rel=1e-8)
        assert lambda_c(m, n) == pytest.approx(scalar.lambda_c_oracle(m, n), rel=1e-8)


def test_caseIV_formula_matches_oracle():
    rng = np.random.default_rng(1)
    for _ in range(DRAWS):
        m = rng.uniform(0.1, 0.7)
        lambda1 = rng.uniform(0.5, 20.0)
        assert threshold_caseIV_nonexistence(m, lambda1) == pytest.approx(
            scalar.caseIV_oracle(m, lambda1), rel=1e-8
        )


def test_linear_growth_formulas_match_oracles():
    rng = np.random.default_rng(2)
    for _ in range(DRAWS):
        n5, l5 = rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95)
        n6, l6 = rng.uniform(1.05, 1.95), rng.uniform(1.5, 50.0)
        n7, l7 = rng.uniform(2.1, 6.0), rng.uniform(0.05, 0.95)
        assert threshold_caseV(n5, l5) == pytest.approx(scalar.caseV_oracle(n5, l5), rel=1e-8)
        assert threshold_caseVI(n6, l6) == pytest.approx(scalar.caseVI_oracle(n6, l6), rel=1e-8)
        assert threshold_caseVII(n7, l7) == pytest.approx(scalar.caseVII_oracle(n7, l7), rel=1e-8)


def test_window_matches_oracle():
    m, n = 0.5, 1.25
    A1, A2, A3 = 0.1, 0.05, 0.03
    window = caseIII_window(m, n, A1, A2, A3)
    under, over = scalar.window_oracle(m, n, A1, A2, A3)
    assert window.lambda_under == pytest.approx(under, rel=1e-8)
    assert window.lambda_over == pytest.approx(over, rel=1e-8)
    assert window.lambda_under < 0 and window.lambda_over < 0
    assert window.ordered == (window.lambda_under < window.lambda_over)


def test_caseIb_admissible_interval():
    assert caseIb_admissible(0.5, 1).upper == pytest.approx(0.0625)
    assert caseIb_admissible(0.8, 1).upper == pytest.approx(0.61)
    # m >= 4/(N-2) leaves nothing
    assert caseIb_admissible(0.9, 7).upper == 0.0


def test_abc_rescale():
    unit = abc_rescale(ProblemParams(m=0.5, n=1.5, lam=-2.0))
    assert unit.mu == pytest.approx(1.0)
    assert unit.amplitude_scale == pytest.approx(1.0)
    scaled = abc_rescale(ProblemParams(m=0.5, n=1.5, lam=-3.0))
    assert scaled.mu == pytest.approx(2.0)
    assert scaled.amplitude_scale == pytest.approx(4.0)
    with pytest.raises(ParameterError):
        abc_rescale(ProblemParams(m=0.5, n=1.5, lam=-0.5))
    with pytest.raises(ParameterError):
        abc_rescale(ProblemParams(m=0.5, n=1.25, lam=-3.0))


@pytest.mark.parametrize(
    "call",
    [
        lambda: lambda_c(0.5, 0.75),
        lambda: threshold_fold_caseI(0.5, 0.5),
        lambda: threshold_caseIV_nonexistence(1.0, math.pi**2),
        lambda: threshold_caseV(0.5, 1.5),
        lambda: threshold_caseVI(1.5, 0.5),
        lambda: threshold_caseVII(1.5, 0.5),
        lambda: caseIII_window(0.5, 0.75, 0.1, 0.1, 0.1),
        lambda: logistic_threshold(0.0),
    ],
)
def test_thresholds_reject_other_regimes(call):
    with pytest.raises(ParameterError):
        call()
