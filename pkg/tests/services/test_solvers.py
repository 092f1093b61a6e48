# tests/services/test_solvers.py

import numpy as np
import pytest

from autocat.engine.eigen import principal_eigenpair
from autocat.engine.grid import build_mesh, energy, residual_norm, sup_norm
from autocat.engine.nonlinearity import apriori_bound, reaction
from autocat.errors import ParameterError, SolverError
from autocat.programs.models_grid import Domain
from autocat.programs.models_problem import ProblemParams
from autocat.services.descent import global_minimize, negative_energy_seed, seed_bump
from autocat.services.mountain_pass import PATH_NODES, _initial_path, _k_norm, _respace, mountain_pass
from autocat.services.newton import newton_solve
from autocat.services.solve import find_solution, is_nontrivial, solve_with_method
from autocat.services.sub_super import (
    build_subsolution,
    build_supersolution,
    monotone_iteration,
    solve_by_sub_super,
)
from autocat.services.verify import probe_nonexistence


def test_supersolution_dominates_the_bound():
    for p in (
        ProblemParams(m=0.5, n=0.75, lam=0.0),
        ProblemParams(m=0.5, n=1.25, lam=-2.0),
        ProblemParams(m=0.5, n=1.5, lam=-0.5),
    ):
        M = build_supersolution(p)
        assert M >= apriori_bound(p)
        assert reaction(p, M) <= 0


def test_supersolution_needs_a_hypothesis():
    with pytest.raises(ParameterError):
        build_supersolution(ProblemParams(m=0.5, n=2.0, lam=-1.0))


def test_subsolution_inequality(unit_mesh, case2_params):
    eig = principal_eigenpair(unit_mesh)
    sub = build_subsolution(case2_params, eig)
    assert sub.valid
    v = sub.values
    assert np.all(eig.lambda1 * v <= reaction(case2_params, v))


def test_monotone_iteration_rejects_crossed_barriers(unit_mesh, case2_params):
    with pytest.raises(SolverError):
        monotone_iteration(case2_params, unit_mesh, np.ones(unit_mesh.size), np.zeros(unit_mesh.size))


def test_three_methods_agree_in_case2(unit_mesh, case2_params):
    eig = principal_eigenpair(unit_mesh)
    monotone = solve_by_sub_super(case2_params, unit_mesh, eig)
    assert is_nontrivial(monotone)
    assert monotone.residual_norm <= 1e-10
    assert monotone.diagnostics["bracket_gap"] <= 1e-6

    minimizer = global_minimize(case2_params, unit_mesh, np.zeros(unit_mesh.size))
    assert is_nontrivial(minimizer)
    assert minimizer.energy_value < 0
    assert sup_norm(minimizer.solution - monotone.solution) <= 1e-6

    newton = newton_solve(case2_params, unit_mesh, 1.1 * monotone.solution)
    assert newton.converged
    assert sup_norm(newton.solution - monotone.solution) <= 1e-6
    assert residual_norm(case2_params, unit_mesh, newton.solution) <= 1e-10


def test_solution_within_apriori_bound(unit_mesh):
    p = ProblemParams(m=0.5, n=1.25, lam=-1.0)
    report = find_solution(p, unit_mesh)
    assert is_nontrivial(report)
    assert report.sup_norm <= apriori_bound(p) + 1e-8


def test_negative_energy_seed(unit_mesh, case2_params):
    seed = negative_energy_seed(case2_params, unit_mesh)
    assert seed is not None
    assert np.max(seed) > 0
    # the only solution at n = m, λ = 1 is zero and E >= 0 along the fiber
    assert negative_energy_seed(ProblemParams(m=0.5, n=0.5, lam=1.0), unit_mesh) is None


def test_seed_bump_shapes(unit_mesh, ball_mesh):
    for mesh in (unit_mesh, ball_mesh):
        bump = seed_bump(mesh)
        assert np.max(bump) == pytest.approx(1.0)
        assert np.all(bump > 0)


def test_solve_with_method_rejects_euler_lagrange(unit_mesh, case2_params):
    with pytest.raises(ValueError):
        solve_with_method(case2_params, unit_mesh, "euler_lagrange")


def test_mountain_pass_needs_distinct_endpoints(unit_mesh, case2_params):
    with pytest.raises(SolverError):
        mountain_pass(case2_params, unit_mesh, np.zeros(unit_mesh.size))
    # E(u_end) >= 0 leaves no pass from zero
    with pytest.raises(SolverError):
        mountain_pass(case2_params, unit_mesh, -seed_bump(unit_mesh))


def test_respacing_keeps_the_anchor(unit_mesh):
    rng = np.random.default_rng(3)
    bump = seed_bump(unit_mesh)
    t = np.sort(np.concatenate([[0.0, 1.0], rng.uniform(0.0, 1.0, 9)]))
    path = t[:, None] * bump[None, :]
    out = _respace(unit_mesh, path, anchor=4)
    assert np.array_equal(out[4], path[4])
    assert np.array_equal(out[0], path[0]) and np.array_equal(out[-1], path[-1])
    left = [_k_norm(unit_mesh, out[j + 1] - out[j]) for j in range(4)]
    right = [_k_norm(unit_mesh, out[j + 1] - out[j]) for j in range(4, 10)]
    assert np.allclose(left, left[0], rtol=1e-10)
    assert np.allclose(right, right[0], rtol=1e-10)


def test_initial_path_sits_on_a_narrow_barrier():
    p = ProblemParams(m=0.8, n=0.3, lam=0.05)
    mesh = build_mesh(Domain.interval(0.0, 10.0), 128)
    low = global_minimize(p, mesh, np.zeros(mesh.size))
    assert low.energy_value < 0
    path, t_top = _initial_path(p, mesh, np.zeros(mesh.size), low.solution, PATH_NODES)
    assert path.shape == (PATH_NODES, mesh.size)
    # the barrier is within the first percent of the segment
    assert 0.0 < t_top < 0.01
    energies = np.array([energy(p, mesh, u) for u in path])
    assert energies[1:-1].max() > 0.0


def test_mountain_pass_flags_the_palais_smale_regime(unit_mesh):
    # λ < 0 with n < m + 1 lies outside the regime
    p = ProblemParams(m=0.5, n=1.25, lam=-2.0)
    seed = negative_energy_seed(p, unit_mesh)
    assert seed is not None
    report = mountain_pass(p, unit_mesh, seed, max_steps=2)
    assert report.diagnostics["palais_smale_regime"] == 0.0
    assert any("Palais-Smale" in note for note in report.notes)


@pytest.mark.slow
def test_caseI_mountain_pass_has_positive_energy():
    p = ProblemParams(m=0.8, n=0.3, lam=0.05)
    mesh = build_mesh(Domain.interval(0.0, 10.0), 128)
    low = global_minimize(p, mesh, np.zeros(mesh.size))
    report = mountain_pass(p, mesh, low.solution)
    assert report.converged, report.notes
    assert report.energy_value > 0
    assert report.residual_norm <= 1e-6
    assert report.diagnostics["palais_smale_regime"] == 1.0
    assert sup_norm(report.solution - low.solution) > 1e-3


def test_equal_exponent_threshold_search(unit_mesh):
    p = ProblemParams(m=0.5, n=0.5, lam=1.0)
    search = probe_nonexistence(p, unit_mesh, starts=3)
    assert not search.nontrivial_found
    # every start goes through all three methods
    assert search.attempts == 9
    assert search.methods == ["newton", "global_minimize", "monotone_iteration"]
    assert search.largest_sup_norm <= 1e-6

    below = probe_nonexistence(p.with_lambda(0.5), unit_mesh, starts=2)
    assert below.nontrivial_found


def test_search_without_a_constant_supersolution_uses_the_mountain_pass(unit_mesh):
    p = ProblemParams(m=0.5, n=1.5, lam=-40.0)
    search = probe_nonexistence(p, unit_mesh, starts=2)
    assert search.methods == ["newton", "global_minimize", "mountain_pass"]
    assert search.attempts == 6
    assert not search.nontrivial_found


@pytest.mark.slow
def test_equal_exponent_threshold_full_search(unit_mesh):
    p = ProblemParams(m=0.5, n=0.5)
    for lam in (0.0, 0.5, 0.9):
        report = find_solution(p.with_lambda(lam), unit_mesh)
        assert is_nontrivial(report)
        assert report.residual_norm <= 1e-10
    for lam in (1.0, 1.2):
        assert not probe_nonexistence(p.with_lambda(lam), unit_mesh).nontrivial_found
