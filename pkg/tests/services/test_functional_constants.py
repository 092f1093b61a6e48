# tests/services/test_functional_constants.py

import math

import pytest

from autocat.engine.eigen import principal_eigenpair
from autocat.engine.grid import build_mesh
from autocat.errors import ParameterError
from autocat.programs.models_grid import Domain
from autocat.services.functional_constants import (
    compute_Ap,
    functional_constant,
    unit_ball_constant,
)


def _interval(length, cells=128):
    return build_mesh(Domain.interval(0.0, length), cells)


def test_quadratic_exponent_is_the_eigenvalue(unit_mesh):
    result = functional_constant(unit_mesh, 2.0)
    assert result.value == pytest.approx(1.0 / (2.0 * principal_eigenpair(unit_mesh).lambda1))
    assert result.relative_gap == 0.0


def test_cubic_exponent_cross_check():
    result = functional_constant(_interval(1.0), 3.0)
    assert result.converged
    assert result.relative_gap <= 1e-5


@pytest.mark.parametrize("q", [2.5, 3.0])
def test_length_scaling(q):
    short = compute_Ap(_interval(1.0, 64), q)
    long = compute_Ap(_interval(2.0, 64), q)
    assert long == pytest.approx(2.0 ** (1.0 + q / 2.0) * short, rel=1e-7)


def test_unit_interval_constant():
    # λ1(-1, 1) = π²/4
    assert unit_ball_constant(2.0, 1) == pytest.approx(2.0 / math.pi**2, rel=1e-3)


def test_exponent_checks(unit_mesh):
    with pytest.raises(ParameterError):
        functional_constant(unit_mesh, 1.0)
    ball = build_mesh(Domain.radial_ball(3, 1.0), 16)
    with pytest.raises(ParameterError):
        functional_constant(ball, 6.0)


@pytest.mark.parametrize("q", [1.5, 2.25, 2.5])
def test_near_quadratic_exponents_on_a_short_interval(q):
    result = functional_constant(_interval(0.674), q)
    assert result.converged, result.notes
    assert result.relative_gap <= 1e-5


def test_near_quadratic_exponent_on_the_unit_interval():
    value = compute_Ap(_interval(1.0), 2.25)
    result = functional_constant(_interval(1.0), 2.25)
    assert result.relative_gap <= 1e-5
    assert value == pytest.approx(result.value, rel=1e-12)
