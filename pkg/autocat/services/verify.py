# autocat/services/verify.py
"""
Numerical replays of the decision table.

Every scenario runs one structured claim (see Expectation.claim) and ends in
a VerifyReport:
  - "passed" / "failed" when the claim was checked,
  - "error" when the replay itself broke (bad scenario, solver exception).

Nonexistence is only ever a numerical surrogate: many randomized starts
across several methods, none of which reaches a nontrivial solution.
"""

import logging
import os
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from ..engine import scalar
from ..engine.eigen import principal_eigenpair
from ..engine.grid import (
    build_mesh,
    dirichlet_norm_squared,
    energy,
    fiber_derivative,
    integrate,
    residual_norm,
    sup_norm,
)
from ..engine.nonlinearity import apriori_bound, primitive_values
from ..engine.thresholds import (
    caseIII_window,
    lambda_c,
    logistic_threshold,
    omega_size_bound,
    threshold_caseIV_nonexistence,
    threshold_caseV,
    threshold_caseVI,
    threshold_caseVII,
    threshold_fold_caseI,
)
from ..engine.verdicts import existence_verdict
from ..errors import AutocatError, ParameterError, ScenarioError
from ..programs.models_branch import Branch, ContinuationConfig
from ..programs.models_grid import Domain, Mesh
from ..programs.models_problem import CaseIIIWindow, ProblemParams
from ..programs.models_solve import NonexistenceProbe, ShootConfig, ShootResult, SolveReport, SolverConfig
from ..programs.models_verify import MeshSpec, Positivity, Scenario, ThreeSolutionReport, VerifyReport
from .continuation import continue_branch, estimate_trivial_bifurcation, stability_indicator, sweep_lambda
from .descent import global_minimize, seed_bump
from .export import write_branch, write_json, write_profile, write_solve_report
from .functional_constants import functional_constant, unit_ball_constant
from .mountain_pass import mountain_pass
from .newton import newton_solve
from .scenarios import get_scenario, scenario_suite
from .shooting import profile_on_mesh, search_flat_profile
from .solve import NONTRIVIAL, find_solution, is_nontrivial, rescaled_check
from .sub_super import build_supersolution, monotone_iteration, solve_by_sub_super

logger = logging.getLogger(__name__)

PROBE_STARTS = 20
PROBE_AMPLITUDE_DECADES = (-3.0, 0.3)
PROBE_SHAPE_POWERS = (0.5, 3.0)
PASS_SCALES = np.geomspace(1.0, 1e6, 61)
PASS_MAX_STEPS = 500
FLAT_SLOPE_TOL = 1e-8
FLAT_HEIGHTS = np.geomspace(1e-6, 1.0, 91)
FLAT_MESH_H = 0.05
FLAT_MARGIN = 0.5
DISTINCT_TOL = 1e-6
WINDOW_SHRINK = 0.5
WINDOW_SEEDS = 24
BIFURCATION_OFFSET = 0.01
BIFURCATION_NEAR_SUP = 0.05

# --------------------------------------------------
# Positivity classification
# --------------------------------------------------


def _outward_slopes(mesh: Mesh, u: np.ndarray) -> List[float]:
    h = mesh.h
    if mesh.domain.kind == "interval":
        if u.size < 2:
            return [-u[0] / h] * 2
        return [-(4.0 * u[0] - u[1]) / (2.0 * h), -(4.0 * u[-1] - u[-2]) / (2.0 * h)]
    if u.size < 2:
        return [-2.0 * u[-1] / h]
    # quadratic through the reflected boundary value 0 at R and the last two cell centres
    return [-(9.0 * u[-1] - u[-2]) / (3.0 * h)]


def positivity_profile(
    u: np.ndarray,
    mesh: Mesh,
    delta: Optional[float] = None,
    slope_tol: Optional[float] = None,
) -> Positivity:
    """
    Classify a nonnegative grid function:
      - zero: sup below delta
      - interior_dead_core: a vanishing node with positive values further out
        (on both sides for an interval)
      - strictly_positive: every node above delta and a clearly negative
        outward derivative at the boundary
      - boundary_flat: anything else (positive inside, flat at the boundary)
    """
    u = np.asarray(u, dtype=float)
    sup = sup_norm(u)
    delta = 10.0 * 1e-12 * (1.0 + sup) if delta is None else delta
    if sup <= delta:
        return "zero"
    slope_tol = 0.05 * sup / mesh.domain.length if slope_tol is None else slope_tol

    small = u <= delta
    big = ~small
    if mesh.domain.kind == "interval":
        left = np.maximum.accumulate(big)
        right = np.maximum.accumulate(big[::-1])[::-1]
        if np.any(small & left & right):
            return "interior_dead_core"
    else:
        further_out = np.maximum.accumulate(big[::-1])[::-1]
        further_out = np.append(further_out[1:], False)
        if np.any(small & further_out):
            return "interior_dead_core"

    if not np.any(small) and all(s <= -slope_tol for s in _outward_slopes(mesh, u)):
        return "strictly_positive"
    return "boundary_flat"


# --------------------------------------------------
# Nonexistence probe
# --------------------------------------------------


def _random_start(rng: np.random.Generator, bump: np.ndarray, bound: float) -> np.ndarray:
    amplitude = bound * 10.0 ** rng.uniform(*PROBE_AMPLITUDE_DECADES)
    shape = bump ** rng.uniform(*PROBE_SHAPE_POWERS) * (1.0 + 0.5 * rng.random(bump.size))
    return amplitude * shape / np.max(shape)


def probe_nonexistence(
    p: ProblemParams,
    mesh: Mesh,
    starts: int = PROBE_STARTS,
    cfg: Optional[SolverConfig] = None,
    seed: int = 0,
    nontrivial_threshold: float = NONTRIVIAL,
) -> NonexistenceProbe:
    """
    Search for a nontrivial solution from randomized starts. Each start u0 is
    handed to three methods:
      - Newton from u0
      - global minimization from u0
      - monotone iteration between 0 and the constant max(M, max u0), where M is
        the constant supersolution; without one, a mountain pass from 0 to the
        first negative-energy point on the ray of u0
    """
    cfg = cfg or SolverConfig()
    rng = np.random.default_rng(seed)
    bump = seed_bump(mesh)
    bound = apriori_bound(p) or 1.0
    notes: List[str] = []
    methods: List[str] = []
    attempts = 0
    largest = 0.0
    found = False

    try:
        M: Optional[float] = build_supersolution(p)
    except ParameterError as exc:
        M = None
        notes.append(f"no constant supersolution ({exc}); mountain pass replaces the monotone iteration")

    zero = np.zeros(mesh.size)
    for k in range(starts):
        u0 = _random_start(rng, bump, bound)
        for method, solve in (("newton", newton_solve), ("global_minimize", global_minimize)):
            report = solve(p, mesh, u0, cfg)
            attempts += 1
            if method not in methods:
                methods.append(method)
            if report.converged:
                largest = max(largest, report.sup_norm)
            if is_nontrivial(report, nontrivial_threshold):
                found = True
                notes.append(f"{method} start {k}: nontrivial solution, sup={report.sup_norm:.6g}")
        if M is None:
            # no constant supersolution: the third method is a mountain pass from 0
            # to the first negative-energy point on the ray of u0
            scale = next((t for t in PASS_SCALES if energy(p, mesh, t * u0) < 0), None)
            if scale is None:
                notes.append(f"start {k}: no negative energy on its ray; mountain pass skipped")
                continue
            try:
                report = mountain_pass(p, mesh, scale * u0, cfg, max_steps=PASS_MAX_STEPS)
            except AutocatError as exc:
                notes.append(f"start {k}: mountain pass not attempted: {exc}")
                continue
            attempts += 1
            if "mountain_pass" not in methods:
                methods.append("mountain_pass")
            if report.converged:
                largest = max(largest, report.sup_norm)
            if is_nontrivial(report, nontrivial_threshold):
                found = True
                notes.append(f"mountain_pass start {k}: nontrivial solution, sup={report.sup_norm:.6g}")
            continue

        top = max(M, float(np.max(u0)))
        report = monotone_iteration(p, mesh, zero, np.full(mesh.size, top), cfg)
        attempts += 1
        if "monotone_iteration" not in methods:
            methods.append("monotone_iteration")
        # the iteration from above ends at the maximal solution below `top`
        gap = report.diagnostics.get("bracket_gap", 0.0)
        upper_ok = report.diagnostics.get("upper_residual", np.inf) <= cfg.tol
        if upper_ok:
            largest = max(largest, gap)
        if upper_ok and gap > nontrivial_threshold:
            found = True
            notes.append(f"monotone_iteration start {k}: maximal solution below {top:.6g} has sup={gap:.6g}")

    probe = NonexistenceProbe(
        attempts=attempts,
        methods=methods,
        nontrivial_found=found,
        largest_sup_norm=largest,
        notes=notes,
    )
    logger.info(
        "nonexistence probe lambda=%.6g: %d attempts, nontrivial_found=%s",
        p.lam, attempts, found,
    )
    return probe


# --------------------------------------------------
# Three-solution window
# --------------------------------------------------


def _window_seeds(mesh: Mesh, window: CaseIIIWindow, count: int = WINDOW_SEEDS) -> List[np.ndarray]:
    """
    Scaled seed bumps with Dirichlet norms from well inside the small ball
    (radius s_under) to well beyond the exterior level s_hat_over.
    """
    v = seed_bump(mesh)
    v = v / np.sqrt(dirichlet_norm_squared(mesh, v))
    lo = 1e-3 * min(window.s_under, window.s_hat_over)
    hi = 1e3 * max(window.s_under, window.s_hat_over)
    return [s * v for s in np.geomspace(lo, hi, count)]


def _is_new(u: np.ndarray, kept: List[np.ndarray]) -> bool:
    return all(sup_norm(u - d) > DISTINCT_TOL * max(1.0, sup_norm(u), sup_norm(d)) for d in kept)


def three_solution_attempt(
    m: float,
    n: float,
    cells: int = 128,
    dim: int = 1,
    shrink: float = WINDOW_SHRINK,
    cfg: Optional[SolverConfig] = None,
) -> ThreeSolutionReport:
    """
    Build a domain below the size bound, compute the window (λ_under, λ_over)
    from its functional constants and try to find three distinct solutions at
    the window midpoint.
    """
    if not 0 < shrink < 1:
        raise ParameterError(f"shrink must lie in (0, 1), got {shrink}")
    cfg = cfg or SolverConfig()
    A1_star = unit_ball_constant(m + 1.0, dim)
    A3_star = unit_ball_constant(m + 2.0, dim)
    bound = omega_size_bound(m, n, dim, A1_star, A3_star)

    if dim == 1:
        domain = Domain.interval(0.0, shrink * bound)
        length = domain.length
    else:
        # |B_R| = shrink * bound
        radius = (shrink * bound / Domain.radial_ball(dim, 1.0).measure) ** (1.0 / dim)
        domain = Domain.radial_ball(dim, radius)
        length = domain.measure
    mesh = build_mesh(domain, cells)

    consts = {
        "A1": functional_constant(mesh, m + 1.0),
        "A2": functional_constant(mesh, n + 1.0),
        "A3": functional_constant(mesh, m + 2.0),
    }
    window = caseIII_window(m, n, consts["A1"].value, consts["A2"].value, consts["A3"].value)
    report = ThreeSolutionReport(
        length=length,
        size_bound=bound,
        constants={k: c.value for k, c in consts.items()},
        constant_gaps={k: c.relative_gap for k, c in consts.items() if c.relative_gap is not None},
        window=window,
    )
    if not window.ordered:
        report.notes.append("window is empty on this domain")
        return report

    lam = 0.5 * (window.lambda_under + window.lambda_over)
    report.lam = lam
    p = ProblemParams(m=m, n=n, lam=lam, dim=dim)

    # every critical point reachable from the seeds, deduplicated
    critical: List[Tuple[str, SolveReport]] = []
    for k, u0 in enumerate(_window_seeds(mesh, window)):
        for method, solve in (("newton", newton_solve), ("global_minimize", global_minimize)):
            r = solve(p, mesh, u0, cfg)
            name = f"{method}_{k}"
            report.attempts[name] = is_nontrivial(r)
            if is_nontrivial(r) and _is_new(r.solution, [c.solution for _, c in critical]):
                critical.append((name, r))

    found: Dict[str, SolveReport] = {}
    stable = [
        (name, r) for name, r in critical
        if (stability_indicator(p, mesh, r.solution).value or 0.0) > 0
    ]
    if stable:
        small = min(stable, key=lambda item: item[1].sup_norm)
        large = max(stable, key=lambda item: item[1].sup_norm)
        found["small_minimizer"] = small[1]
        if large[0] != small[0]:
            found["large_minimizer"] = large[1]
            try:
                mp = mountain_pass(p, mesh, large[1].solution, cfg, u_start=small[1].solution)
            except AutocatError as exc:
                report.notes.append(f"mountain pass not attempted: {exc}")
            else:
                report.attempts["mountain_pass"] = is_nontrivial(mp)
                found["mountain_pass"] = mp
        else:
            report.notes.append("one stable solution only; no mountain pass between minima")
    else:
        report.notes.append(f"no stable solution from {len(report.attempts)} seeded solves")
    for name, r in critical:
        if _is_new(r.solution, [f.solution for f in found.values()]):
            found[f"critical_{name}"] = r

    solutions = {k: r.solution for k, r in found.items() if is_nontrivial(r)}
    report.energies = {k: r.energy_value for k, r in found.items() if is_nontrivial(r)}
    names = sorted(solutions)
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            report.distances[f"{a}|{b}"] = sup_norm(solutions[a] - solutions[b])

    distinct: List[np.ndarray] = []
    for name in names:
        if _is_new(solutions[name], distinct):
            distinct.append(solutions[name])
    report.distinct = len(distinct)
    logger.info(
        "three-solution attempt m=%.6g n=%.6g |Omega|=%.6g window=(%.6g, %.6g): %d distinct",
        m, n, length, window.lambda_under, window.lambda_over, report.distinct,
    )
    return report


# --------------------------------------------------
# Claim checks
# --------------------------------------------------


@dataclass
class _Outcome:
    passed: bool
    detail: str = ""
    measured: Dict[str, float] = field(default_factory=dict)
    tolerances: Dict[str, float] = field(default_factory=dict)
    reports: List[Tuple[str, SolveReport]] = field(default_factory=list)
    branch: Optional[Branch] = None
    shot: Optional[ShootResult] = None
    payload: Optional[object] = None


def _mesh_for(spec: MeshSpec, dim: int) -> Mesh:
    if spec.kind == "interval":
        if dim != 1:
            raise ScenarioError(f"interval meshes need dim = 1, got {dim}")
        return build_mesh(Domain.interval(0.0, spec.size), spec.cells)
    return build_mesh(Domain.radial_ball(dim, spec.size), spec.cells)


def _tag(lam: float) -> str:
    return f"lambda_{lam:+.6g}"


def _require_lambdas(s: Scenario) -> List[float]:
    if not s.lambdas:
        raise ScenarioError(f"scenario {s.id!r} needs at least one lambda")
    return list(s.lambdas)


def _check_existence(s: Scenario, mesh: Mesh) -> _Outcome:
    out = _Outcome(passed=True)
    eig = principal_eigenpair(mesh)
    shapes = []
    for lam in _require_lambdas(s):
        p = s.params.with_lambda(lam)
        report = find_solution(p, mesh, eig=eig)
        out.reports.append((_tag(lam), report))
        out.measured[f"sup_norm@{lam:g}"] = report.sup_norm
        if not is_nontrivial(report):
            out.passed = False
            shapes.append(f"lambda={lam:g}: no nontrivial solution")
            continue
        u = report.solution
        stationarity = abs(fiber_derivative(p, mesh, u, 1.0))
        allowed = 10.0 * SolverConfig().tol * max(1.0, integrate(mesh, np.abs(u)))
        out.measured[f"fiber_derivative@{lam:g}"] = stationarity
        out.tolerances[f"fiber_derivative@{lam:g}"] = allowed
        bound = apriori_bound(p)
        if bound is not None:
            out.measured[f"bound_ratio@{lam:g}"] = report.sup_norm / bound
            if report.sup_norm > bound * (1.0 + 1e-8):
                out.passed = False
        if stationarity > allowed:
            out.passed = False
        shapes.append(f"lambda={lam:g}: {report.method}, {positivity_profile(u, mesh)}")
    out.detail = "; ".join(shapes)
    return out


def _check_nonexistence(s: Scenario, mesh: Mesh) -> _Outcome:
    out = _Outcome(passed=True)
    lines = []
    for lam in _require_lambdas(s):
        probe = probe_nonexistence(s.params.with_lambda(lam), mesh)
        out.measured[f"largest_sup_norm@{lam:g}"] = probe.largest_sup_norm
        out.measured[f"attempts@{lam:g}"] = float(probe.attempts)
        if probe.nontrivial_found:
            out.passed = False
        lines.append(f"lambda={lam:g}: {probe.attempts} attempts, nontrivial_found={probe.nontrivial_found}")
    out.tolerances["nontrivial_threshold"] = NONTRIVIAL
    out.detail = "numerical surrogate; " + "; ".join(lines)
    return out


def _check_energy_sign(s: Scenario, mesh: Mesh) -> _Outcome:
    sign = s.expectation.sign
    if sign is None:
        raise ScenarioError(f"scenario {s.id!r}: energy_sign needs a sign")
    out = _Outcome(passed=True)
    for lam in _require_lambdas(s):
        p = s.params.with_lambda(lam)
        low = global_minimize(p, mesh, np.zeros(mesh.size))
        out.reports.append((f"{_tag(lam)}_minimizer", low))
        if not is_nontrivial(low) or not low.energy_value < 0:
            out.passed = False
            out.detail = f"lambda={lam:g}: no negative-energy minimizer"
            continue
        out.measured[f"minimizer_energy@{lam:g}"] = low.energy_value
        if sign < 0:
            continue
        mp = mountain_pass(p, mesh, low.solution)
        out.reports.append((f"{_tag(lam)}_mountain_pass", mp))
        out.measured[f"mountain_pass_energy@{lam:g}"] = mp.energy_value
        out.measured[f"mountain_pass_residual@{lam:g}"] = mp.residual_norm
        out.tolerances[f"mountain_pass_residual@{lam:g}"] = s.expectation.tolerance
        if not (mp.converged and mp.energy_value > 0 and mp.residual_norm <= s.expectation.tolerance):
            out.passed = False
            out.detail = f"lambda={lam:g}: mountain pass " + ("; ".join(mp.notes) or "did not reach E > 0")
    return out


def _check_bound(s: Scenario, mesh: Mesh) -> _Outcome:
    branch = sweep_lambda(s.params, mesh, sorted(_require_lambdas(s)), strategy="warm_then_minimize")
    violations = [pt.lam for pt in branch.points if pt.within_apriori_bound is False]
    ratios = [
        pt.sup_norm / apriori_bound(s.params.with_lambda(pt.lam))
        for pt in branch.points
        if apriori_bound(s.params.with_lambda(pt.lam))
    ]
    return _Outcome(
        passed=bool(branch.points) and not violations,
        detail=f"{len(branch.points)} points, {len(branch.gaps)} gaps, violations at {violations}",
        measured={"points": float(len(branch.points)), "max_bound_ratio": max(ratios, default=0.0)},
        tolerances={"max_bound_ratio": 1.0},
        branch=branch,
    )


def _check_monotone_branch(s: Scenario, mesh: Mesh) -> _Outcome:
    lams = sorted(_require_lambdas(s))
    branch = sweep_lambda(s.params, mesh, lams, strategy="warm_then_monotone")
    sups = branch.sup_norms()
    decreasing = bool(np.all(np.diff(sups) < 0))
    complete = not branch.gaps and len(branch.points) == len(lams)
    return _Outcome(
        passed=complete and decreasing,
        detail=f"{len(branch.points)}/{len(lams)} points, strictly decreasing={decreasing}",
        measured={f"sup_norm@{pt.lam:g}": pt.sup_norm for pt in branch.points},
        branch=branch,
    )


def _check_fold_bound(s: Scenario, mesh: Mesh) -> _Outcome:
    bound = s.expectation.value
    if bound is None:
        raise ScenarioError(f"scenario {s.id!r}: fold_bound needs a value")
    lam0 = _require_lambdas(s)[0]
    p = s.params.with_lambda(lam0)
    start = global_minimize(p, mesh, np.zeros(mesh.size))
    if not is_nontrivial(start):
        return _Outcome(passed=False, detail="no start solution", reports=[(_tag(lam0), start)])
    cfg = ContinuationConfig(
        ds=0.02, ds_max=0.1, lam_min=lam0 - 1.0, lam_max=bound + 0.5, collapse_threshold=1e-6
    )
    branch = continue_branch(p, mesh, start.solution, cfg)
    folds = [f.lam_star for f in branch.folds]
    lam_max = float(np.max(branch.lambdas()))
    tol = s.expectation.tolerance
    ok = len(folds) == 1 and folds[0] <= bound + tol and lam_max <= bound + tol
    return _Outcome(
        passed=ok,
        detail=f"folds at {folds}, termination={branch.termination}",
        measured={"folds": float(len(folds)), "first_fold": folds[0] if folds else float("nan"), "max_lambda": lam_max},
        tolerances={"fold_bound": bound},
        branch=branch,
    )


_THRESHOLDS: Dict[str, Tuple[Callable[..., float], Callable[..., float], str]] = {
    # name -> (closed form, oracle, second argument)
    "fold_caseI": (threshold_fold_caseI, scalar.fold_caseI_oracle, "n"),
    "lambda_c": (lambda_c, scalar.lambda_c_oracle, "n"),
    "caseIV": (threshold_caseIV_nonexistence, scalar.caseIV_oracle, "lambda1"),
    "caseV": (threshold_caseV, scalar.caseV_oracle, "lambda1"),
    "caseVI": (threshold_caseVI, scalar.caseVI_oracle, "lambda1"),
    "caseVII": (threshold_caseVII, scalar.caseVII_oracle, "lambda1"),
}


def _check_threshold(s: Scenario, mesh: Mesh) -> _Outcome:
    name = s.expectation.quantity
    if name not in _THRESHOLDS:
        raise ScenarioError(f"scenario {s.id!r}: unknown threshold {name!r}")
    closed, oracle, second = _THRESHOLDS[name]
    if second == "n":
        args = (s.params.m, s.params.n)
    else:
        lambda1 = principal_eigenpair(mesh).lambda1
        first = s.params.m if name == "caseIV" else s.params.n
        args = (first, lambda1)
    value, check = closed(*args), oracle(*args)
    gap = abs(value - check) / max(abs(value), 1e-300)
    out = _Outcome(
        passed=gap <= 1e-8,
        detail=f"{name} = {value:.12g}, oracle {check:.12g}",
        measured={name: value, "oracle": check, "relative_gap": gap},
        tolerances={"relative_gap": 1e-8},
    )
    if s.expectation.value is not None:
        out.tolerances[name] = s.expectation.tolerance
        out.passed = out.passed and abs(value - s.expectation.value) <= s.expectation.tolerance
    return out


def _check_stability(s: Scenario, mesh: Mesh) -> _Outcome:
    sign = s.expectation.sign
    if sign is None:
        raise ScenarioError(f"scenario {s.id!r}: stability needs a sign")
    out = _Outcome(passed=True)
    eig = principal_eigenpair(mesh)
    for lam in _require_lambdas(s):
        p = s.params.with_lambda(lam)
        report = find_solution(p, mesh, eig=eig)
        out.reports.append((_tag(lam), report))
        if not is_nontrivial(report):
            out.passed = False
            continue
        stab = stability_indicator(p, mesh, report.solution)
        value = stab.value if stab.value is not None else float("nan")
        out.measured[f"stability@{lam:g}"] = value
        if stab.value is None or np.sign(stab.value) != sign:
            out.passed = False
    return out


def _check_window(s: Scenario, mesh: Mesh) -> _Outcome:
    report = three_solution_attempt(s.params.m, s.params.n, cells=s.mesh.cells, dim=s.params.dim)
    w = report.window
    gaps = report.constant_gaps
    gaps_ok = len(gaps) == 3 and max(gaps.values()) <= s.expectation.tolerance
    measured = {
        "lambda_under": w.lambda_under,
        "lambda_over": w.lambda_over,
        "length": report.length,
        "size_bound": report.size_bound,
        "distinct_solutions": float(report.distinct),
    }
    measured.update({f"gap_{k}": v for k, v in gaps.items()})
    return _Outcome(
        passed=w.ordered and w.lambda_over < 0 and gaps_ok,
        detail=f"window ({w.lambda_under:.6g}, {w.lambda_over:.6g}), {report.distinct} distinct solutions found",
        measured=measured,
        tolerances={"constant_gap": s.expectation.tolerance},
        payload=report,
    )


def _primitive_root(p: ProblemParams, lo: float, hi: float) -> float:
    def F(s: float) -> float:
        return float(primitive_values(p, np.asarray(s)))

    return brentq(F, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def _flat_mesh(shot: ShootResult, dim: int) -> Mesh:
    """Mesh of spacing about FLAT_MESH_H reaching FLAT_MARGIN past the support radius."""
    half = shot.first_zero + FLAT_MARGIN
    if dim == 1:
        return build_mesh(Domain.interval(-half, half), 2 * int(np.ceil(half / FLAT_MESH_H)))
    return build_mesh(Domain.radial_ball(dim, half), int(np.ceil(half / FLAT_MESH_H)))


def _check_flat_profile(s: Scenario, mesh: Mesh) -> _Outcome:
    cfg = ShootConfig(slope_tol=FLAT_SLOPE_TOL)
    out = _Outcome(passed=True)
    for lam in _require_lambdas(s):
        p = s.params.with_lambda(lam)
        shot = search_flat_profile(p, FLAT_HEIGHTS, cfg)
        if shot is None:
            out.passed = False
            out.detail = f"lambda={lam:g}: no sign change of the shooting discriminant"
            continue
        out.shot = shot
        out.measured[f"height@{lam:g}"] = shot.initial_height
        out.measured[f"slope@{lam:g}"] = abs(shot.slope_at_zero)
        out.tolerances["slope"] = FLAT_SLOPE_TOL
        ok = shot.flat and abs(shot.slope_at_zero) <= FLAT_SLOPE_TOL
        if not ok:
            out.detail = f"lambda={lam:g}: " + "; ".join(shot.notes)
        if shot.first_zero is not None:
            out.measured[f"support_radius@{lam:g}"] = shot.first_zero
        if p.dim == 1:
            # ½u'^2 + F(u) is conserved, so the flat height is the zero of F
            root = _primitive_root(p, 0.5 * shot.initial_height, 2.0 * shot.initial_height)
            out.measured[f"primitive_root@{lam:g}"] = root
            out.tolerances["height"] = s.expectation.tolerance
            ok = ok and abs(shot.initial_height - root) <= s.expectation.tolerance
        if shot.flat:
            flat_mesh = _flat_mesh(shot, p.dim)
            res = residual_norm(p, flat_mesh, profile_on_mesh(p, shot, flat_mesh, cfg))
            allowed = 10.0 * flat_mesh.h**2
            out.measured[f"mesh_residual@{lam:g}"] = res
            out.tolerances[f"mesh_residual@{lam:g}"] = allowed
            # the O(h^2) bound is only asserted where there is no 1/r term
            if p.dim == 1:
                ok = ok and res <= allowed
        out.passed = out.passed and ok
    return out


def _check_verdict(s: Scenario, mesh: Mesh) -> _Outcome:
    expected = s.expectation.verdict
    if expected is None:
        raise ScenarioError(f"scenario {s.id!r}: verdict claim needs a verdict")
    lambda1 = principal_eigenpair(mesh).lambda1
    out = _Outcome(passed=True, measured={"lambda1": lambda1})
    seen = []
    for lam in _require_lambdas(s):
        verdict = existence_verdict(s.params.with_lambda(lam), lambda1=lambda1)
        seen.append(f"lambda={lam:g}: {verdict.kind.value} ({', '.join(verdict.citations)})")
        if verdict.kind != expected:
            out.passed = False
    out.detail = "; ".join(seen)
    return out


def _check_agreement(s: Scenario, mesh: Mesh) -> _Outcome:
    out = _Outcome(passed=True, tolerances={"distance": s.expectation.tolerance})
    eig = principal_eigenpair(mesh)
    for lam in _require_lambdas(s):
        p = s.params.with_lambda(lam)
        a = global_minimize(p, mesh, np.zeros(mesh.size))
        b = solve_by_sub_super(p, mesh, eig)
        out.reports += [(f"{_tag(lam)}_minimizer", a), (f"{_tag(lam)}_monotone", b)]
        if not (is_nontrivial(a) and is_nontrivial(b)):
            out.passed = False
            continue
        dist = sup_norm(a.solution - b.solution)
        out.measured[f"distance@{lam:g}"] = dist
        if dist > s.expectation.tolerance:
            out.passed = False
    return out


def _check_bifurcation(s: Scenario, mesh: Mesh) -> _Outcome:
    if s.expectation.quantity != "logistic":
        raise ScenarioError(f"scenario {s.id!r}: bifurcation target {s.expectation.quantity!r} is not known")
    eig = principal_eigenpair(mesh)
    target = logistic_threshold(eig.lambda1)
    lam0 = _require_lambdas(s)[0]
    p = s.params.with_lambda(lam0)
    start = find_solution(p, mesh, eig=eig)
    if not is_nontrivial(start):
        return _Outcome(passed=False, detail="no start solution", reports=[(_tag(lam0), start)])
    cfg = ContinuationConfig(ds=0.02, ds_max=0.05, lam_min=lam0 - 1.0, lam_max=target + 1.0, collapse_threshold=1e-6)
    branch = continue_branch(p, mesh, start.solution, cfg)
    estimate = estimate_trivial_bifurcation(branch, threshold=1e-4)
    allowed = 10.0 * mesh.h**2
    gap = abs(estimate - target) if estimate is not None else float("inf")

    # the branch is small just below the threshold and absent just above it
    near = find_solution(p.with_lambda(target - BIFURCATION_OFFSET), mesh, eig=eig)
    beyond = probe_nonexistence(p.with_lambda(target + BIFURCATION_OFFSET), mesh)
    near_ok = is_nontrivial(near) and near.sup_norm < BIFURCATION_NEAR_SUP
    ok = gap <= allowed and near_ok and not beyond.nontrivial_found
    return _Outcome(
        passed=ok,
        detail=(
            f"bifurcation estimate {estimate}, expected {target:.12g}, termination={branch.termination}; "
            f"sup={near.sup_norm:.3g} at lambda={target - BIFURCATION_OFFSET:.6g}, "
            f"nontrivial above threshold: {beyond.nontrivial_found} ({beyond.attempts} attempts)"
        ),
        measured={
            "estimate": estimate if estimate is not None else float("nan"),
            "target": target,
            "error": gap,
            "sup_below_threshold": near.sup_norm,
            "largest_sup_above_threshold": beyond.largest_sup_norm,
        },
        tolerances={"error": allowed, "sup_below_threshold": BIFURCATION_NEAR_SUP},
        reports=[(f"{_tag(target - BIFURCATION_OFFSET)}_below_threshold", near)],
        branch=branch,
    )


def _check_rescaling(s: Scenario, mesh: Mesh) -> _Outcome:
    out = _Outcome(passed=True)
    for lam in _require_lambdas(s):
        p = s.params.with_lambda(lam)
        report = find_solution(p, mesh, methods=["global_minimize", "newton"])
        out.reports.append((_tag(lam), report))
        if not is_nontrivial(report):
            out.passed = False
            continue
        scaled, _, res = rescaled_check(p, mesh, report.solution)
        allowed = s.expectation.tolerance * (1.0 + scaled.amplitude_scale)
        out.measured[f"rescaled_residual@{lam:g}"] = res
        out.measured[f"mu@{lam:g}"] = scaled.mu
        out.tolerances[f"rescaled_residual@{lam:g}"] = allowed
        if res > allowed:
            out.passed = False
    return out


_CHECKS: Dict[str, Callable[[Scenario, Mesh], _Outcome]] = {
    "existence": _check_existence,
    "nonexistence": _check_nonexistence,
    "energy_sign": _check_energy_sign,
    "bound": _check_bound,
    "monotone_branch": _check_monotone_branch,
    "fold_bound": _check_fold_bound,
    "threshold": _check_threshold,
    "stability": _check_stability,
    "window": _check_window,
    "flat_profile": _check_flat_profile,
    "verdict": _check_verdict,
    "agreement": _check_agreement,
    "bifurcation": _check_bifurcation,
    "rescaling": _check_rescaling,
}


# --------------------------------------------------
# Scenario runner
# --------------------------------------------------


def _write_evidence(out: _Outcome, mesh: Mesh, directory: str) -> List[str]:
    files: List[str] = []
    for stem, report in out.reports:
        files.extend(write_solve_report(report, mesh, directory, stem))
    if out.branch is not None:
        files.extend(write_branch(out.branch, mesh, directory))
    if out.shot is not None:
        files.extend(write_profile(out.shot, directory))
    if out.payload is not None:
        files.append(write_json(os.path.join(directory, "details.json"), out.payload))
    return files


def run_scenario(s: Scenario, output_dir: Optional[str] = None) -> VerifyReport:
    """
    Run one scenario. Evidence goes to <output_dir>/<scenario id>/ when an
    output directory is given.
    """
    started = time.perf_counter()
    check = _CHECKS.get(s.expectation.claim)
    try:
        if check is None:
            raise ScenarioError(f"no check for claim {s.expectation.claim!r}")
        mesh = _mesh_for(s.mesh, s.params.dim)
        out = check(s, mesh)
        evidence: List[str] = []
        if output_dir:
            evidence = _write_evidence(out, mesh, os.path.join(output_dir, s.id))
        report = VerifyReport(
            scenario_id=s.id,
            status="passed" if out.passed else "failed",
            citation=s.citation,
            measured=out.measured,
            tolerances=out.tolerances,
            evidence=evidence,
            detail=out.detail or None,
        )
    except (AutocatError, ValueError, ArithmeticError, RuntimeError, np.linalg.LinAlgError, OSError) as exc:
        logger.exception("scenario %s raised", s.id)
        report = VerifyReport(
            scenario_id=s.id,
            status="error",
            citation=s.citation,
            detail=f"{type(exc).__name__}: {exc}",
        )
    report.runtime_seconds = time.perf_counter() - started
    if output_dir:
        path = write_json(os.path.join(output_dir, s.id, "report.json"), report)
        report.evidence.append(path)
    logger.info("scenario %s: %s (%.2fs)", s.id, report.status, report.runtime_seconds)
    return report


def run_scenario_id(scenario_id: str, output_dir: Optional[str] = None) -> VerifyReport:
    return run_scenario(get_scenario(scenario_id), output_dir)


def run_suite(case_tag, output_dir: Optional[str] = None) -> List[VerifyReport]:
    return [run_scenario(s, output_dir) for s in scenario_suite(case_tag)]
