# autocat/engine/scalar.py
"""
Brute-force scalar oracles for the closed-form thresholds.

Each threshold is the extremum over s > 0 of an auxiliary function from the
corresponding existence/nonexistence argument. The oracle scans a log-spaced
grid and refines the best grid point by golden-section search in log s.
"""

from typing import Callable, Literal, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

GRID_LO = 1e-8
GRID_HI = 1e8
GRID_POINTS = 400


def log_grid_extremum(
    fn: Callable[[np.ndarray], np.ndarray],
    kind: Literal["min", "max"] = "min",
    lo: float = GRID_LO,
    hi: float = GRID_HI,
    points: int = GRID_POINTS,
) -> Tuple[float, float]:
    """
    Return (s_opt, fn(s_opt)) for the global min or max of fn on [lo, hi].
    """
    sign = 1.0 if kind == "min" else -1.0
    t = np.linspace(np.log(lo), np.log(hi), points)
    with np.errstate(over="ignore", invalid="ignore"):
        values = sign * np.asarray(fn(np.exp(t)), dtype=float)
    values = np.where(np.isfinite(values), values, np.inf)
    i = int(np.argmin(values))

    def g(x: float) -> float:
        return sign * float(fn(np.asarray(np.exp(x))))

    if 0 < i < points - 1:
        try:
            res = minimize_scalar(
                g, bracket=(t[i - 1], t[i], t[i + 1]), method="golden", tol=1e-12
            )
        except ValueError:
            res = minimize_scalar(
                g, bounds=(t[i - 1], t[i + 1]), method="bounded", options={"xatol": 1e-12}
            )
    else:
        j0, j1 = max(i - 1, 0), min(i + 1, points - 1)
        res = minimize_scalar(
            g, bounds=(t[j0], t[j1]), method="bounded", options={"xatol": 1e-12}
        )

    x = float(res.x)
    if g(x) > values[i]:
        x = float(t[i])
    s = float(np.exp(x))
    return s, sign * g(x)


# --------------------------------------------------
# Oracles, one per closed-form threshold
# --------------------------------------------------


def fold_caseI_oracle(m: float, n: float) -> float:
    k = m - n
    return log_grid_extremum(lambda s: s**k - s ** (k + 1.0), kind="max")[1]


def lambda_c_oracle(m: float, n: float) -> float:
    """(n+1) max_s [s^(m-n)/(m+1) - s^(m+1-n)/(m+2)]: largest λ with a positive zero of F."""
    k = m - n
    best = log_grid_extremum(
        lambda s: s**k / (m + 1.0) - s ** (k + 1.0) / (m + 2.0), kind="max"
    )[1]
    return (n + 1.0) * best


def caseIV_oracle(m: float, lambda1: float) -> float:
    """-1 + min_s (1/s - λ1 s^-m): below it λ1 s^(1-m) + (λ+1)s - 1 < 0 for all s."""
    return -1.0 + log_grid_extremum(lambda s: 1.0 / s - lambda1 * s ** (-m), kind="min")[1]


def caseV_oracle(n: float, lambda1: float) -> float:
    """-min_s [(λ1-1)s^(1-n) + s^(2-n)]."""
    return -log_grid_extremum(
        lambda s: (lambda1 - 1.0) * s ** (1.0 - n) + s ** (2.0 - n), kind="min"
    )[1]


def caseVI_oracle(n: float, lambda1: float) -> float:
    """-min_s (λ1 - 1 + s) s^(1-n)."""
    return -log_grid_extremum(
        lambda s: (lambda1 - 1.0 + s) * s ** (1.0 - n), kind="min"
    )[1]


def caseVII_oracle(n: float, lambda1: float) -> float:
    """min_s (1 - λ1 - s) s^(1-n)."""
    return log_grid_extremum(
        lambda s: (1.0 - lambda1 - s) * s ** (1.0 - n), kind="min"
    )[1]


def window_oracle(
    m: float, n: float, A1: float, A2: float, A3: float
) -> Tuple[float, float]:
    """
    (λ_under, λ_over) by bisection on λ:
      λ_under: max_s g_λ = 0 with g_λ(s) = s^(1-m)/2 - A1 + λ s^(n-m) A2
      λ_over:  min_s f_λ = 0 with f_λ(s) = 1/2 + s^m A3 + λ s^(n-1) A2
    """

    def g_max(lam: float) -> float:
        return log_grid_extremum(
            lambda s: s ** (1.0 - m) / 2.0 - A1 + lam * s ** (n - m) * A2, kind="max"
        )[1]

    def f_min(lam: float) -> float:
        return log_grid_extremum(
            lambda s: 0.5 + s**m * A3 + lam * s ** (n - 1.0) * A2, kind="min"
        )[1]

    return _bisect_sign(g_max), _bisect_sign(f_min)


def _bisect_sign(fn: Callable[[float], float]) -> float:
    """Root in λ < 0 of a function positive near 0- and negative far out."""
    hi = -1e-12
    lo = -1.0
    while fn(lo) > 0:
        lo *= 2.0
        if lo < -1e12:
            raise ValueError("oracle root not bracketed")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if fn(mid) > 0:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-14 * max(1.0, abs(lo)):
            break
    return 0.5 * (lo + hi)
