# tests/engine/test_grid.py

import numpy as np
import pytest

from autocat.engine.grid import (
    build_mesh,
    energy,
    energy_gradient,
    fiber,
    fiber_derivative,
    integrate,
    laplacian_apply,
    read_grid_function,
    residual,
    write_grid_function,
)
from autocat.errors import ParameterError
from autocat.programs.models_grid import Domain, unit_ball_volume
from autocat.programs.models_problem import ProblemParams


def test_interval_mesh_layout(unit_mesh):
    assert unit_mesh.size == 63
    assert unit_mesh.h == pytest.approx(1.0 / 64)
    np.testing.assert_allclose(unit_mesh.weights, unit_mesh.h)
    K = unit_mesh.stiffness.toarray()
    np.testing.assert_allclose(K, K.T)
    assert not unit_mesh.nodes.flags.writeable


def test_radial_weights_add_up_to_ball_volume(ball_mesh):
    assert integrate(ball_mesh, np.ones(ball_mesh.size)) == pytest.approx(unit_ball_volume(3), rel=1e-12)
    assert ball_mesh.nodes[0] == pytest.approx(0.5 * ball_mesh.h)


def test_build_mesh_rejects_too_few_cells():
    with pytest.raises(ParameterError):
        build_mesh(Domain.interval(0.0, 1.0), 3)
    with pytest.raises(ParameterError):
        build_mesh(Domain.interval(0.0, 1.0), 10.5)


def test_interval_laplacian_exact_on_quadratics(unit_mesh):
    x = unit_mesh.nodes
    np.testing.assert_allclose(laplacian_apply(unit_mesh, x * (1.0 - x)), 2.0, rtol=1e-9)


def test_interval_laplacian_boundary_values():
    mesh = build_mesh(Domain.interval(0.0, 1.0), 32)
    x = mesh.nodes
    # u = 1 + x has -u'' = 0 with u(0) = 1, u(1) = 2
    out = laplacian_apply(mesh, 1.0 + x, boundary=(1.0, 2.0))
    np.testing.assert_allclose(out, 0.0, atol=1e-9)


@pytest.mark.parametrize("dim", [1, 2, 3])
def test_radial_laplacian_exact_on_quadratics_inside(dim):
    mesh = build_mesh(Domain.radial_ball(dim, 1.0), 40)
    r = mesh.nodes
    out = laplacian_apply(mesh, 1.0 - r**2)
    # the last node carries the half-cell boundary closure
    np.testing.assert_allclose(out[:-1], 2.0 * dim, rtol=1e-9)


def test_energy_gradient_matches_finite_differences(unit_mesh):
    p = ProblemParams(m=0.5, n=0.25, lam=0.1)
    rng = np.random.default_rng(3)
    eps = 1e-6
    for _ in range(50):
        u = 0.2 + 0.5 * rng.random(unit_mesh.size)
        d = rng.standard_normal(unit_mesh.size)
        exact = float(energy_gradient(p, unit_mesh, u) @ d)
        fd = (energy(p, unit_mesh, u + eps * d) - energy(p, unit_mesh, u - eps * d)) / (2 * eps)
        assert fd == pytest.approx(exact, rel=1e-5, abs=1e-6)


def test_residual_is_weighted_gradient(unit_mesh):
    p = ProblemParams(m=0.5, n=1.25, lam=-0.5)
    u = np.sin(np.pi * unit_mesh.nodes)
    np.testing.assert_allclose(
        residual(p, unit_mesh, u), energy_gradient(p, unit_mesh, u) / unit_mesh.weights, rtol=1e-12, atol=1e-12
    )


def test_fiber_agrees_with_energy(unit_mesh):
    p = ProblemParams(m=0.5, n=1.25, lam=-0.5)
    v = np.sin(np.pi * unit_mesh.nodes)
    for t in (0.1, 0.7, 2.0):
        assert fiber(p, unit_mesh, v, t) == pytest.approx(energy(p, unit_mesh, t * v), rel=1e-10)
        fd = (fiber(p, unit_mesh, v, t + 1e-6) - fiber(p, unit_mesh, v, t - 1e-6)) / 2e-6
        assert fiber_derivative(p, unit_mesh, v, t) == pytest.approx(fd, rel=1e-6)
    with pytest.raises(ParameterError):
        fiber(p, unit_mesh, v, 0.0)
    with pytest.raises(ParameterError):
        fiber(p, unit_mesh, np.zeros(unit_mesh.size), 1.0)


def test_energy_ignores_negative_part_in_reaction(unit_mesh):
    p = ProblemParams(m=0.5, n=0.75, lam=0.0)
    u = -np.sin(np.pi * unit_mesh.nodes)
    # F(u^+) = 0, so only the Dirichlet term is left
    assert energy(p, unit_mesh, u) == pytest.approx(0.5 * float(u @ (unit_mesh.stiffness @ u)))


def test_grid_function_file(tmp_path, unit_mesh):
    u = np.sin(np.pi * unit_mesh.nodes) / 3.0
    path = write_grid_function(str(tmp_path / "u.csv"), unit_mesh, u)
    np.testing.assert_array_equal(read_grid_function(path, unit_mesh), u)

    other = build_mesh(Domain.interval(0.0, 1.0), 32)
    with pytest.raises(ParameterError):
        read_grid_function(path, other)


def test_grid_function_shape_checked(unit_mesh):
    with pytest.raises(ParameterError):
        laplacian_apply(unit_mesh, np.zeros(unit_mesh.size + 1))
