import math

import numpy as np
import pytest

from sphdesign.objective import certify, objective_value
from sphdesign.pointsets import (GaugedConfig, QuadraturePointSet, fix_gauge,
                                 gauss_legendre_grid, icosahedral_points,
                                 load_design, load_pointset, save_pointset,
                                 separation_distance, spiral_points,
                                 uniform_random_points)

FOUR_PI = 4.0 * math.pi


def test_spiral_basics():
    ps = spiral_points(121)
    assert ps.n == 121
    assert np.allclose(ps.weights, FOUR_PI / 121)
    assert ps.theta.min() >= 0.0 and ps.theta.max() <= math.pi
    assert np.all(np.diff(ps.theta) <= 0.0)      # polar sweep, south to north


def test_uniform_seeded():
    a = uniform_random_points(64, 5)
    b = uniform_random_points(64, 5)
    c = uniform_random_points(64, 6)
    assert np.array_equal(a.theta, b.theta) and np.array_equal(a.phi, b.phi)
    assert not np.array_equal(a.theta, c.theta)


def test_icosahedral_counts():
    for level, n in ((0, 12), (1, 42), (2, 162)):
        ps = icosahedral_points(level)
        assert ps.n == n
        r = np.linalg.norm(ps.xyz, axis=1)
        assert np.max(np.abs(r - 1.0)) < 1e-12


def test_gauss_legendre_exactness():
    grid = gauss_legendre_grid(10)
    assert abs(grid.weights.sum() - FOUR_PI) < 1e-10
    assert certify(grid, 10, tol=1e-10)["pass"]


def test_validation_errors():
    ok = np.array([0.3, 1.2])
    with pytest.raises(ValueError):
        QuadraturePointSet(np.array([0.3, 3.5]), ok, np.ones(2))
    with pytest.raises(ValueError):
        QuadraturePointSet(ok, ok, np.array([1.0, -1.0]))
    with pytest.raises(ValueError):
        QuadraturePointSet(ok, ok, np.ones(3))


def test_gauge_pins_and_preserves_objective():
    ps = uniform_random_points(20, 3)
    cfg = fix_gauge(ps)
    assert cfg.theta[0] == 0.0
    assert cfg.phi[0] == 0.0 and cfg.phi[1] == 0.0
    assert cfg.vector.size == 2 * ps.n - 3
    # the gauge is a rotation, so the design objective cannot move
    for t in (3, 6):
        a = objective_value(ps.theta, ps.phi, t)
        b = objective_value(cfg.theta, cfg.phi, t)
        assert abs(a - b) < 1e-12 * max(1.0, a)
    # vector -> angles -> vector is the identity on free variables
    back = GaugedConfig(cfg.vector, ps.n)
    assert np.array_equal(back.vector, cfg.vector)


def test_save_load_round_trip(tmp_path):
    ps = uniform_random_points(17, 9)
    ps.declared_degree = 3
    csv_path, json_path = save_pointset(ps, tmp_path / "rt")
    assert csv_path.exists() and json_path.exists()
    back = load_pointset(json_path)
    assert np.array_equal(back.theta, ps.theta)
    assert np.array_equal(back.phi, ps.phi)
    assert np.array_equal(back.weights, ps.weights)
    assert back.declared_degree == 3
    # the CSV alone also loads
    again = load_pointset(csv_path)
    assert np.array_equal(again.theta, ps.theta)


def test_shipped_designs():
    for t in (16, 32, 64):
        ps = load_design(t)
        assert ps.declared_degree == t
        assert ps.n == (t + 1) ** 2
        assert ps.certified_tol is not None and ps.certified_tol <= 1e-10
    with pytest.raises(FileNotFoundError):
        load_design(999)


def test_separation_distance():
    ps = spiral_points(100)
    d = separation_distance(ps)
    assert 0.0 < d < 2.0
