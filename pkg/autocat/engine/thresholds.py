# autocat/engine/thresholds.py
"""
Closed-form thresholds of the parameter λ.

Every function validates its regime and raises ParameterError outside it.
The brute-force counterparts live in engine/scalar.py.
"""

from ..errors import ParameterError
from ..programs.models_grid import unit_ball_volume
from ..programs.models_problem import (
    CaseIIIWindow,
    OpenInterval,
    ProblemParams,
    RescaledProblem,
)
from .nonlinearity import same


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ParameterError(message)


def _caseI(m: float, n: float) -> None:
    _require(0 < n < m < 1, f"needs 0 < n < m < 1, got m={m}, n={n}")


# --------------------------------------------------
# Sublinear absorption (n < m < 1)
# --------------------------------------------------


def lambda_c(m: float, n: float) -> float:
    """
    Largest λ for which the one-dimensional problem has a compact-support
    (flat) solution on some interval.
    """
    _caseI(m, n)
    k = m - n
    return (
        (n + 1.0) / (m + 1.0)
        * ((m + 2.0) / (m + 1.0)) ** k
        * k**k
        / (k + 1.0) ** (k + 1.0)
    )


def threshold_fold_caseI(m: float, n: float) -> float:
    """Upper bound for the fold λ*: max_s s^(m-n) - s^(m+1-n). Always < 1."""
    _caseI(m, n)
    k = m - n
    return k**k / (k + 1.0) ** (k + 1.0)


def caseIb_admissible(m: float, dim: int) -> OpenInterval:
    """
    Exponents n for which the mountain-pass second solution is guaranteed:
    n < min(m, ((N+2)(2m-1) - (N-2)m^2)/4) and m < 2* - 2.
    """
    _require(0 < m < 1, f"needs 0 < m < 1, got {m}")
    _require(dim >= 1, "dimension must be >= 1")
    if dim > 2 and not m < 4.0 / (dim - 2):
        return OpenInterval(lower=0.0, upper=0.0)
    bound = ((dim + 2) * (2.0 * m - 1.0) - (dim - 2) * m * m) / 4.0
    upper = min(m, bound)
    return OpenInterval(lower=0.0, upper=max(upper, 0.0))


# --------------------------------------------------
# Concave-convex range (m < 1 < n <= m + 1)
# --------------------------------------------------


def threshold_caseIV_nonexistence(m: float, lambda1: float) -> float:
    """For n = m + 1: no solution below -1 - λ1^(1/(1-m)) (1-m) m^(m/(1-m))."""
    _require(0 < m < 1, f"needs 0 < m < 1, got {m}")
    _require(lambda1 > 0, "lambda1 must be positive")
    e = 1.0 / (1.0 - m)
    return -1.0 - lambda1**e * (1.0 - m) * m ** (m * e)


def caseIII_window(m: float, n: float, A1: float, A2: float, A3: float) -> CaseIIIWindow:
    """
    Window (λ_under, λ_over) of the three-solution argument, built from the
    functional constants A1 (q=m+1), A2 (q=n+1), A3 (q=m+2).
    """
    _require(0 < m < 1 < n < m + 1 and not same(n, m + 1.0), f"needs 0 < m < 1 < n < m+1, got m={m}, n={n}")
    _require(min(A1, A2, A3) > 0, "functional constants must be positive")

    q = m + 1.0 - n
    e1 = 1.0 / (1.0 - m)
    lam_under = -(
        (n - 1.0) ** ((n - 1.0) * e1)
        * (1.0 - m)
        / (
            2.0 ** ((n - m) * e1)
            * (n - m) ** ((n - m) * e1)
            * A1 ** ((n - 1.0) * e1)
            * A2
        )
    )
    lam_over = -(
        m
        * A3 ** ((n - 1.0) / m)
        / (
            2.0 ** (q / m)
            * (n - 1.0) ** ((n - 1.0) / m)
            * q ** (q / m)
            * A2
        )
    )
    s_under = ((1.0 - m) / (-2.0 * lam_under * (n - m) * A2)) ** (1.0 / (n - 1.0))
    s_hat_over = (-lam_over * (n - 1.0) * A2 / (m * A3)) ** (1.0 / q)
    return CaseIIIWindow(
        lambda_under=lam_under,
        lambda_over=lam_over,
        s_under=s_under,
        s_hat_over=s_hat_over,
        ordered=lam_under < lam_over,
        heights_ordered=s_under < s_hat_over,
    )


def window_constant(m: float, n: float) -> float:
    """C~ of the size condition A1^(1/(1-m)) A3^(1/m) < C~."""
    _require(0 < m < 1 < n < m + 1, f"needs 0 < m < 1 < n < m+1, got m={m}, n={n}")
    q = m + 1.0 - n
    return (
        ((n - 1.0) / 2.0) ** (1.0 / (m * (1.0 - m)))
        * ((1.0 - m) / m) ** (1.0 / (n - 1.0))
        * q ** (q / (m * (n - 1.0)))
        / (n - m) ** ((n - m) / ((1.0 - m) * (n - 1.0)))
    )


def omega_size_bound(m: float, n: float, dim: int, A1_star: float, A3_star: float) -> float:
    """|Ω| below this value guarantees a nonempty window (Faber-Krahn scaling)."""
    _require(min(A1_star, A3_star) > 0, "unit-ball constants must be positive")
    c_tilde = window_constant(m, n)
    return (
        c_tilde ** (dim * m * (1.0 - m) / 2.0)
        * unit_ball_volume(dim)
        * A1_star ** (-dim * m / 2.0)
        * A3_star ** (-dim * (1.0 - m) / 2.0)
    )


def abc_rescale(p: ProblemParams) -> RescaledProblem:
    """
    For n = m + 1 and λ < -1 the equation reads -Δu = u^m + (-λ-1)u^(m+1);
    v = (-λ-1)^(1/m) u solves -Δv = mu v^m + v^(m+1).
    """
    _require(same(p.n, p.m + 1.0), f"rescaling needs n = m + 1, got m={p.m}, n={p.n}")
    _require(p.lam < -1.0, f"rescaling needs lambda < -1, got {p.lam}")
    base = -p.lam - 1.0
    return RescaledProblem(mu=base ** ((1.0 - p.m) / p.m), amplitude_scale=base ** (1.0 / p.m))


# --------------------------------------------------
# Linear growth (m = 1)
# --------------------------------------------------


def threshold_caseV(n: float, lambda1: float) -> float:
    """n < 1, λ1 < 1: no positive solution above this λ."""
    _require(0 < n < 1, f"needs 0 < n < 1, got {n}")
    _require(0 < lambda1 < 1, f"needs 0 < lambda1 < 1, got {lambda1}")
    return (1.0 - lambda1) ** (2.0 - n) * (1.0 - n) ** (1.0 - n) / (2.0 - n) ** (2.0 - n)


def threshold_caseVI(n: float, lambda1: float) -> float:
    """1 < n < 2, λ1 > 1: no solution above this (negative) λ."""
    _require(1 < n < 2, f"needs 1 < n < 2, got {n}")
    _require(lambda1 > 1, f"needs lambda1 > 1, got {lambda1}")
    return -((lambda1 - 1.0) ** (2.0 - n)) / ((n - 1.0) ** (n - 1.0) * (2.0 - n) ** (2.0 - n))


def threshold_caseVII(n: float, lambda1: float) -> float:
    """n > 2, λ1 < 1: no solution below this (negative) λ."""
    _require(n > 2, f"needs n > 2, got {n}")
    _require(0 < lambda1 < 1, f"needs 0 < lambda1 < 1, got {lambda1}")
    return -((n - 2.0) ** (n - 2.0)) / ((n - 1.0) ** (n - 1.0) * (1.0 - lambda1) ** (n - 2.0))


def logistic_threshold(lambda1: float) -> float:
    """m = n = 1: a positive solution exists iff λ < 1 - λ1."""
    _require(lambda1 > 0, "lambda1 must be positive")
    return 1.0 - lambda1
