# tests/engine/test_eigen.py

import math

import numpy as np
import pytest

from autocat.engine.eigen import principal_eigenpair, smallest_eigenvalue
from autocat.engine.grid import build_mesh
from autocat.programs.models_grid import Domain


def _interval_lambda1(cells):
    eig = principal_eigenpair(build_mesh(Domain.interval(0.0, 1.0), cells))
    return eig.lambda1


def test_discrete_eigenvalue_closed_form():
    cells = 256
    h = 1.0 / cells
    exact = 4.0 / h**2 * math.sin(0.5 * math.pi * h) ** 2
    assert _interval_lambda1(cells) == pytest.approx(exact, rel=1e-9)


def test_eigenvalue_converges_at_second_order():
    err_512 = abs(_interval_lambda1(512) - math.pi**2)
    err_1024 = abs(_interval_lambda1(1024) - math.pi**2)
    assert err_1024 / math.pi**2 <= 1e-5
    assert 3.5 <= err_512 / err_1024 <= 4.5


def test_eigenfunction_is_positive_with_unit_sup(unit_mesh):
    eig = principal_eigenpair(unit_mesh)
    assert np.all(eig.phi1 > 0)
    assert np.max(eig.phi1) == pytest.approx(1.0)
    assert eig.residual <= 1e-8


def test_ball_eigenvalue():
    # first zero of sin(r)/r
    eig = principal_eigenpair(build_mesh(Domain.radial_ball(3, 1.0), 256))
    assert eig.lambda1 == pytest.approx(math.pi**2, rel=1e-3)


def test_wide_interval_eigenvalue(wide_mesh):
    assert principal_eigenpair(wide_mesh).lambda1 == pytest.approx(0.25, rel=1e-3)


def test_smallest_eigenvalue_matches_inverse_iteration(unit_mesh):
    eig = principal_eigenpair(unit_mesh)
    assert smallest_eigenvalue(unit_mesh, np.zeros(unit_mesh.size)) == pytest.approx(eig.lambda1, rel=1e-8)
    shifted = smallest_eigenvalue(unit_mesh, np.full(unit_mesh.size, 2.0))
    assert shifted == pytest.approx(eig.lambda1 + 2.0, rel=1e-8)


def test_eigen_rejects_bad_tolerance(unit_mesh):
    with pytest.raises(ValueError):
        principal_eigenpair(unit_mesh, tol=0.0)
