# autocat/services/shooting.py
"""
Radial shooting for u'' + (N-1)/r u' + f(u) = 0, u(0) = a, u'(0) = 0.

The shooting discriminant is u'(R) at the first zero R, or +1 when the orbit
turns back (or blows up) before reaching 0. Flat profiles sit where the
discriminant changes sign through 0.
"""

import logging
from typing import Iterable, List, Optional, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from ..engine.nonlinearity import reaction_values
from ..errors import ParameterError
from ..programs.models_grid import Mesh
from ..programs.models_problem import ProblemParams
from ..programs.models_solve import ShootConfig, ShootResult

logger = logging.getLogger(__name__)

ODE_METHOD = "DOP853"


def _reaction(p: ProblemParams, u: float) -> float:
    return float(reaction_values(p, np.asarray(max(u, 0.0))))


def _integrate(p: ProblemParams, a: float, cfg: ShootConfig):
    N = p.dim
    r0 = cfg.r_start
    fa = _reaction(p, a)
    # series start u = a - f(a) r^2 / (2N)
    y0 = [a - fa * r0 * r0 / (2.0 * N), -fa * r0 / N]

    def rhs(r, y):
        return [y[1], -(N - 1.0) / r * y[1] - _reaction(p, y[0])]

    def hit_zero(r, y):
        return y[0]

    hit_zero.terminal = True
    hit_zero.direction = -1

    def turning_point(r, y):
        return y[1]

    turning_point.terminal = True
    turning_point.direction = 1

    def blowup(r, y):
        return y[0] - cfg.blowup

    blowup.terminal = True
    blowup.direction = 1

    return solve_ivp(
        rhs,
        (r0, cfg.r_max),
        y0,
        method=ODE_METHOD,
        rtol=cfg.rtol,
        atol=cfg.atol,
        events=(hit_zero, turning_point, blowup),
        dense_output=True,
    )


def radial_shoot(p: ProblemParams, a: float, cfg: Optional[ShootConfig] = None) -> ShootResult:
    """Shoot from height a; the profile table holds (r, u, du_dr) from r = 0."""
    if not a > 0:
        raise ParameterError(f"initial height must be positive, got {a}")
    cfg = cfg or ShootConfig()
    sol = _integrate(p, a, cfg)
    notes = []
    if sol.status == -1:
        notes.append(f"integrator failure: {sol.message}")

    first_zero = None
    slope = 0.0
    if sol.t_events[0].size:
        stop, first_zero = "zero", float(sol.t_events[0][0])
        slope = float(sol.y_events[0][0][1])
        r_end = first_zero
    elif sol.t_events[1].size:
        stop, r_end = "turning_point", float(sol.t_events[1][0])
    elif sol.t_events[2].size:
        stop, r_end = "blowup", float(sol.t_events[2][0])
    else:
        stop, r_end = "r_max", float(sol.t[-1])

    r = np.linspace(cfg.r_start, r_end, cfg.samples - 1)
    y = sol.sol(r)
    profile = np.column_stack(
        [np.concatenate([[0.0], r]), np.concatenate([[a], y[0]]), np.concatenate([[0.0], y[1]])]
    )
    if first_zero is not None:
        profile[-1, 1] = 0.0

    flat = first_zero is not None and abs(slope) <= cfg.slope_tol
    logger.debug("shoot a=%.17g: stop=%s R=%s slope=%.3e", a, stop, first_zero, slope)
    return ShootResult(
        initial_height=a,
        first_zero=first_zero,
        slope_at_zero=slope,
        profile=profile,
        stop_reason=stop,
        flat=flat,
        notes=notes,
    )


def flat_profile_brackets(
    p: ProblemParams, heights: Iterable[float], cfg: Optional[ShootConfig] = None
) -> List[Tuple[float, float]]:
    """Every consecutive pair of (sorted) heights where the discriminant changes sign."""
    cfg = cfg or ShootConfig()
    hs = sorted(float(h) for h in heights)
    out: List[Tuple[float, float]] = []
    prev_h, prev_d = None, None
    for h in hs:
        d = radial_shoot(p, h, cfg).discriminant
        if prev_d is not None and np.sign(d) != np.sign(prev_d):
            out.append((prev_h, h))
        prev_h, prev_d = h, d
    return out


def bracket_flat_profile(
    p: ProblemParams, heights: Iterable[float], cfg: Optional[ShootConfig] = None
) -> Optional[Tuple[float, float]]:
    """First consecutive pair of (sorted) heights where the discriminant changes sign."""
    brackets = flat_profile_brackets(p, heights, cfg)
    return brackets[0] if brackets else None


def find_flat_profile(
    p: ProblemParams, a_lo: float, a_hi: float, cfg: Optional[ShootConfig] = None
) -> ShootResult:
    """
    Bisection on the initial height for u(R) = u'(R) = 0.

    A bracket that collapses to machine precision with |u'(R)| > slope_tol
    straddles a jump of the discriminant, not a flat profile: the crossing-side
    endpoint comes back with flat=False and a note.
    """
    cfg = cfg or ShootConfig()
    if not 0 < a_lo < a_hi:
        raise ParameterError(f"need 0 < a_lo < a_hi, got ({a_lo}, {a_hi})")
    lo, hi = radial_shoot(p, a_lo, cfg), radial_shoot(p, a_hi, cfg)
    for res in (lo, hi):
        if res.flat:
            return res
    if np.sign(lo.discriminant) == np.sign(hi.discriminant):
        lo.notes.append(
            f"no sign change of the shooting discriminant on [{a_lo}, {a_hi}]"
        )
        return lo

    lo_sign = np.sign(lo.discriminant)
    for _ in range(cfg.max_bisections):
        mid = 0.5 * (lo.initial_height + hi.initial_height)
        if mid <= lo.initial_height or mid >= hi.initial_height:
            break
        res = radial_shoot(p, mid, cfg)
        if res.flat:
            logger.info("flat profile a=%.17g R=%.17g", res.initial_height, res.first_zero)
            return res
        if np.sign(res.discriminant) == lo_sign:
            lo = res
        else:
            hi = res

    crossing = lo if lo.first_zero is not None else hi
    if crossing.first_zero is None:
        crossing.notes.append("bracket collapsed without a zero crossing")
        return crossing
    crossing.flat = abs(crossing.slope_at_zero) <= cfg.slope_tol
    if crossing.flat:
        crossing.notes.append(
            f"bracket collapsed at machine precision; |u'(R)| = {abs(crossing.slope_at_zero):.3e}"
        )
        logger.info(
            "flat profile (collapsed bracket) a=%.17g R=%.17g slope=%.3e",
            crossing.initial_height, crossing.first_zero, crossing.slope_at_zero,
        )
    else:
        crossing.notes.append(
            f"bracket collapsed at a={crossing.initial_height:.17g} with |u'(R)| = "
            f"{abs(crossing.slope_at_zero):.3e} > {cfg.slope_tol:g}: discriminant jump, not flat"
        )
        logger.info(
            "discriminant jump at a=%.17g, slope=%.3e", crossing.initial_height, crossing.slope_at_zero
        )
    return crossing


def search_flat_profile(
    p: ProblemParams, heights: Iterable[float], cfg: Optional[ShootConfig] = None
) -> Optional[ShootResult]:
    """
    Bisect every sign change of the discriminant over `heights` until one is
    flat. None when the scan has no sign change; otherwise the flat profile, or
    the non-flat attempt with the smallest |u'(R)|.
    """
    cfg = cfg or ShootConfig()
    brackets = flat_profile_brackets(p, heights, cfg)
    if not brackets:
        return None
    best: Optional[ShootResult] = None
    for a_lo, a_hi in brackets:
        shot = find_flat_profile(p, a_lo, a_hi, cfg)
        if shot.flat:
            return shot
        if shot.first_zero is not None and (best is None or abs(shot.slope_at_zero) < abs(best.slope_at_zero)):
            best = shot
    best = best or shot
    best.notes.append(f"no flat profile in {len(brackets)} discriminant brackets")
    return best


def profile_on_mesh(
    p: ProblemParams, shot: ShootResult, mesh: Mesh, cfg: Optional[ShootConfig] = None
) -> np.ndarray:
    """
    Re-integrate the orbit of `shot` and sample it at the mesh nodes (|x| on
    interval meshes, r on radial ones); zero beyond the first zero.
    """
    cfg = cfg or ShootConfig()
    if shot.first_zero is None:
        raise ParameterError("profile has no zero; nothing to resample")
    sol = _integrate(p, shot.initial_height, cfg)
    if mesh.domain.kind == "interval":
        centre = 0.5 * (mesh.domain.a + mesh.domain.b)
        r = np.abs(mesh.nodes - centre)
    else:
        r = np.asarray(mesh.nodes)
    out = np.zeros(mesh.size)
    inside = (r < shot.first_zero) & (r > cfg.r_start)
    out[inside] = np.maximum(sol.sol(r[inside])[0], 0.0)
    out[r <= cfg.r_start] = shot.initial_height
    return out
