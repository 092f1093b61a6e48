# tests/services/test_continuation.py

import numpy as np
import pytest

from autocat.engine.eigen import principal_eigenpair
from autocat.engine.grid import build_mesh
from autocat.engine.thresholds import threshold_fold_caseI
from autocat.errors import ParameterError
from autocat.programs.models_branch import Branch, BranchPoint, ContinuationConfig
from autocat.programs.models_grid import Domain
from autocat.programs.models_problem import ProblemParams
from autocat.services.continuation import (
    RECOVERY_EPS,
    _jacobian,
    _lambda_derivative,
    _operator,
    _refresh_tangent,
    continue_branch,
    detect_fold,
    estimate_trivial_bifurcation,
    stability_indicator,
    sweep_lambda,
)
from autocat.services.descent import global_minimize
from autocat.services.sub_super import solve_by_sub_super


def _branch(lams, sups, arclengths=None):
    arclengths = arclengths if arclengths is not None else np.arange(len(lams), dtype=float)
    points = [
        BranchPoint(lam=lam, sup_norm=sup, l2_norm=sup, energy=0.0, arclength=s, solution_id=k)
        for k, (lam, sup, s) in enumerate(zip(lams, sups, arclengths))
    ]
    return Branch(points=points)


def test_fold_vertex_on_a_parabola():
    s = np.linspace(0.0, 2.0, 9)
    lam = 1.0 - (s - 1.1) ** 2
    folds = detect_fold(_branch(lam, s + 0.1, s))
    assert len(folds) == 1
    fold = folds[0]
    assert fold.index == 4
    assert (fold.index_before, fold.index_after) == (3, 5)
    assert fold.lam_star == pytest.approx(1.0, abs=1e-12)


def test_no_fold_on_monotone_branch():
    assert detect_fold(_branch([0.0, 0.1, 0.2, 0.3], [1.0, 0.9, 0.8, 0.7])) == []
    assert detect_fold(_branch([0.0, 0.1], [1.0, 0.9])) == []


def test_trivial_bifurcation_extrapolation():
    sups = np.array([0.3, 0.2, 0.1, 0.05])
    lams = 0.75 - 2.0 * sups + sups**2
    branch = _branch(lams, sups)
    # the three smallest sup-norms carry an exact quadratic
    assert estimate_trivial_bifurcation(branch) == pytest.approx(0.75, abs=1e-12)
    assert estimate_trivial_bifurcation(branch, threshold=0.25) is None


def test_sweep_in_case2_is_decreasing(unit_mesh, case2_params):
    branch = sweep_lambda(case2_params, unit_mesh, [-1.0, 0.0, 0.5, 0.9], strategy="warm_then_monotone")
    assert branch.termination == "sweep_complete"
    assert not branch.gaps
    sups = branch.sup_norms()
    assert len(sups) == 4
    assert np.all(np.diff(sups) < 0)
    assert all(pt.within_apriori_bound for pt in branch.points)
    assert len(branch.solutions) == 4


def test_sweep_records_gaps(unit_mesh):
    p = ProblemParams(m=0.5, n=0.5)
    branch = sweep_lambda(p, unit_mesh, [0.5, 1.2], strategy="warm_then_monotone")
    assert [pt.lam for pt in branch.points] == [0.5]
    assert [gap.lam for gap in branch.gaps] == [1.2]


def test_sweep_rejects_unordered_lambdas(unit_mesh, case2_params):
    with pytest.raises(ParameterError):
        sweep_lambda(case2_params, unit_mesh, [0.0, 1.0, 0.5])


def test_stability_of_case2_solution(unit_mesh, case2_params):
    report = solve_by_sub_super(case2_params, unit_mesh, principal_eigenpair(unit_mesh))
    stab = stability_indicator(case2_params, unit_mesh, report.solution)
    assert stab.value > 0
    assert not stab.truncated


def test_continuation_in_case2(unit_mesh, case2_params):
    start = solve_by_sub_super(case2_params, unit_mesh, principal_eigenpair(unit_mesh))
    cfg = ContinuationConfig(ds=0.05, ds_max=0.2, lam_min=-1.0, lam_max=0.9)
    branch = continue_branch(case2_params, unit_mesh, start.solution, cfg)
    assert branch.termination == "right_bound"
    lams = branch.lambdas()
    assert lams[0] == 0.0
    assert np.all(np.diff(lams) > 0)
    assert np.all(np.diff(branch.sup_norms()) < 0)
    assert branch.folds == []
    assert max(pt.residual_norm for pt in branch.points) <= 1e-9


def test_continuation_needs_a_solution(unit_mesh, case2_params):
    with pytest.raises(ParameterError):
        continue_branch(case2_params, unit_mesh, np.full(unit_mesh.size, 0.5))


def test_refreshed_tangent_spans_the_kernel(unit_mesh, case2_params):
    start = solve_by_sub_super(case2_params, unit_mesh, principal_eigenpair(unit_mesh))
    u = start.solution
    cfg = ContinuationConfig()
    A = _operator(unit_mesh)
    v, vlam = _refresh_tangent(A, case2_params, unit_mesh, u, (np.zeros(u.size), 1.0), cfg)
    assert np.sqrt(np.dot(unit_mesh.weights, v * v) + vlam**2) == pytest.approx(1.0, abs=1e-12)
    assert vlam > 0
    J = _jacobian(A, case2_params, u, RECOVERY_EPS)
    defect = J @ v + _lambda_derivative(case2_params, u) * vlam
    assert np.max(np.abs(defect)) <= 1e-8
    # u shrinks as λ grows
    assert np.max(v) < 0


@pytest.mark.slow
def test_caseI_branch_turns_back_after_the_fold():
    p = ProblemParams(m=0.5, n=0.25, lam=0.02)
    mesh = build_mesh(Domain.interval(0.0, 10.0), 128)
    bound = threshold_fold_caseI(0.5, 0.25)
    start = global_minimize(p, mesh, np.zeros(mesh.size))
    cfg = ContinuationConfig(ds=0.02, ds_max=0.1, lam_min=-0.98, lam_max=bound + 0.5, collapse_threshold=1e-6)
    branch = continue_branch(p, mesh, start.solution, cfg)
    assert branch.termination != "step_failure"
    assert len(branch.folds) == 1
    fold = branch.folds[0]
    assert fold.lam_star <= bound + 1e-6
    # points past the fold head back toward λ = 0 on smaller solutions
    after = branch.points[fold.index_after:]
    assert len(after) >= 3
    assert after[-1].lam < fold.lam_star - 0.05
    assert after[-1].sup_norm < branch.points[fold.index].sup_norm
