# tests/services/test_shooting.py

import math

import numpy as np
import pytest
from scipy.optimize import brentq

from autocat.engine.grid import build_mesh, residual_norm
from autocat.engine.nonlinearity import primitive
from autocat.errors import ParameterError
from autocat.programs.models_grid import Domain
from autocat.programs.models_problem import ProblemParams
from autocat.programs.models_solve import ShootConfig
from autocat.services.shooting import (
    bracket_flat_profile,
    find_flat_profile,
    flat_profile_brackets,
    profile_on_mesh,
    radial_shoot,
    search_flat_profile,
)

P = ProblemParams(m=0.5, n=0.25, lam=0.3)
BALL = ProblemParams(m=0.5, n=0.25, lam=0.1, dim=3)
HEIGHTS = np.geomspace(1e-6, 1.0, 91)


def _flat_height():
    # smallest positive zero of F; F < 0 below it
    return brentq(lambda s: primitive(P, s), 0.005, 0.05, xtol=1e-15)


def test_one_dimensional_orbit_conserves_energy():
    a = 0.5
    shot = radial_shoot(P, a)
    assert shot.stop_reason == "zero"
    assert shot.first_zero is not None
    assert shot.slope_at_zero == pytest.approx(-math.sqrt(2.0 * primitive(P, a)), rel=1e-7)
    assert shot.profile[0, 0] == 0.0 and shot.profile[0, 1] == a
    assert shot.profile[-1, 1] == 0.0


def test_orbit_below_the_flat_height_turns_back():
    shot = radial_shoot(P, 0.5 * _flat_height())
    assert shot.first_zero is None
    assert shot.discriminant == 1.0


def test_radial_shoot_rejects_nonpositive_height():
    with pytest.raises(ParameterError):
        radial_shoot(P, 0.0)


def test_flat_profile_matches_primitive_root():
    root = _flat_height()
    bracket = bracket_flat_profile(P, HEIGHTS)
    assert bracket is not None
    assert bracket[0] <= root <= bracket[1]

    shot = find_flat_profile(P, bracket[0], bracket[1])
    assert shot.flat
    assert shot.initial_height == pytest.approx(root, abs=1e-6)
    assert abs(shot.slope_at_zero) <= 1e-8


def test_flat_profile_resampled_on_a_mesh_solves_the_discrete_problem():
    root = _flat_height()
    shot = find_flat_profile(P, 0.5 * root, 2.0 * root)
    half = shot.first_zero + 0.5
    cells = 2 * int(math.ceil(half / 0.05))
    mesh = build_mesh(Domain.interval(-half, half), cells)
    u = profile_on_mesh(P, shot, mesh)
    assert np.max(u) == pytest.approx(shot.initial_height, rel=1e-6)
    assert u[0] == 0.0 and u[-1] == 0.0
    assert residual_norm(P, mesh, u) <= 10.0 * mesh.h**2


def test_find_flat_profile_checks_bracket():
    with pytest.raises(ParameterError):
        find_flat_profile(P, 0.2, 0.1)


def test_collapsed_bracket_is_flat_only_with_a_small_slope():
    cfg = ShootConfig()
    # the discriminant jumps from a steep crossing to blow-up on this bracket
    shot = find_flat_profile(BALL, 0.8895, 1.0, cfg)
    assert shot.flat == (shot.first_zero is not None and abs(shot.slope_at_zero) <= cfg.slope_tol)
    assert not shot.flat
    assert abs(shot.slope_at_zero) > cfg.slope_tol
    assert any("not flat" in note for note in shot.notes)


def test_search_starts_from_the_lowest_bracket():
    brackets = flat_profile_brackets(P, HEIGHTS)
    assert brackets[0] == bracket_flat_profile(P, HEIGHTS)
    assert brackets == sorted(brackets)
    assert search_flat_profile(P, HEIGHTS).initial_height == pytest.approx(_flat_height(), abs=1e-6)


def test_radial_flat_profile_in_three_dimensions():
    # the scan also brackets a jump of the discriminant at the upper zero of f
    cfg = ShootConfig(slope_tol=1e-6)
    shot = search_flat_profile(BALL, HEIGHTS, cfg)
    assert shot is not None
    assert shot.flat, shot.notes
    assert abs(shot.slope_at_zero) <= 1e-6
    assert shot.first_zero > 0

    mesh = build_mesh(Domain.radial_ball(3, shot.first_zero + 0.5), 400)
    u = profile_on_mesh(BALL, shot, mesh, cfg)
    assert np.max(u) == pytest.approx(shot.initial_height, rel=1e-3)
    assert np.all(u[mesh.nodes >= shot.first_zero] == 0.0)
