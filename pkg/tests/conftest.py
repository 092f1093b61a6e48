# tests/conftest.py

import math

import pytest

from autocat.engine.grid import build_mesh
from autocat.programs.models_grid import Domain
from autocat.programs.models_problem import ProblemParams


@pytest.fixture
def unit_mesh():
    return build_mesh(Domain.interval(0.0, 1.0), 64)


@pytest.fixture
def wide_mesh():
    # (0, 2π) has λ1 = 1/4
    return build_mesh(Domain.interval(0.0, 2.0 * math.pi), 64)


@pytest.fixture
def ball_mesh():
    return build_mesh(Domain.radial_ball(3, 1.0), 64)


@pytest.fixture
def case2_params():
    return ProblemParams(m=0.5, n=0.75, lam=0.0)
