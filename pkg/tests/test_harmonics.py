import math

import numpy as np
import scipy.special

from sphdesign.harmonics import (analysis_apply, assoc_legendre, cart_to_sph,
                                 coeff_index, n_coeffs, sph_harm, sph_to_cart,
                                 synthesis_apply)
from sphdesign.pointsets import gauss_legendre_grid

FOUR_PI = 4.0 * math.pi


def _y_values(ell, m, theta, phi):
    return np.array([sph_harm(ell, m, t, p).value for t, p in zip(theta, phi)])


def test_layout():
    assert n_coeffs(0) == 1
    assert n_coeffs(3) == 16
    assert coeff_index(0, 0) == 0
    assert coeff_index(2, -2) == 4
    assert coeff_index(2, 2) == 8


def test_explicit_low_degree_values():
    rng = np.random.default_rng(11)
    theta = rng.uniform(0.05, math.pi - 0.05, 20)
    phi = rng.uniform(0.0, 2 * math.pi, 20)
    st, ct = np.sin(theta), np.cos(theta)
    cases = {
        (0, 0): np.full(20, 1.0 / math.sqrt(FOUR_PI)) + 0j,
        (1, 0): math.sqrt(3 / FOUR_PI) * ct + 0j,
        (1, 1): math.sqrt(3 / (8 * math.pi)) * st * np.exp(1j * phi),
        (2, 1): math.sqrt(5 / (24 * math.pi)) * 3 * st * ct * np.exp(1j * phi),
        (2, 2): math.sqrt(5 / (96 * math.pi)) * 3 * st**2 * np.exp(2j * phi),
    }
    for (ell, m), want in cases.items():
        got = _y_values(ell, m, theta, phi)
        assert np.max(np.abs(got - want)) < 1e-14, (ell, m)


def test_negative_m_identity():
    rng = np.random.default_rng(12)
    theta = rng.uniform(0.0, math.pi, 30)
    phi = rng.uniform(0.0, 2 * math.pi, 30)
    for ell in (1, 3, 7, 12):
        for m in range(1, ell + 1):
            lhs = _y_values(ell, -m, theta, phi)
            rhs = (-1.0) ** m * np.conj(_y_values(ell, m, theta, phi))
            assert np.max(np.abs(lhs - rhs)) < 1e-13


def test_assoc_legendre_against_scipy():
    # scipy's lpmv carries the Condon-Shortley factor; ours does not
    rng = np.random.default_rng(13)
    z = rng.uniform(-0.999, 0.999, 50)
    for ell in (0, 1, 2, 5, 9, 14):
        for m in range(0, ell + 1):
            ours = assoc_legendre(ell, m, z)
            ref = (-1.0) ** m * scipy.special.lpmv(m, ell, z)
            scale = max(1.0, np.max(np.abs(ref)))
            assert np.max(np.abs(ours - ref)) / scale < 1e-11, (ell, m)


def test_addition_theorem():
    rng = np.random.default_rng(14)
    t1, p1 = rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi)
    t2, p2 = rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi)
    x = sph_to_cart(np.array([t1]), np.array([p1]))[0]
    y = sph_to_cart(np.array([t2]), np.array([p2]))[0]
    dot = float(x @ y)
    for ell in (1, 4, 9):
        total = 0.0 + 0.0j
        for m in range(-ell, ell + 1):
            total += (sph_harm(ell, m, t1, p1).value
                      * np.conj(sph_harm(ell, m, t2, p2).value))
        coeffs = np.zeros(ell + 1)
        coeffs[ell] = 1.0
        want = (2 * ell + 1) / FOUR_PI * np.polynomial.legendre.legval(dot, coeffs)
        assert abs(total - want) < 1e-13


def test_matrix_free_kernels_match_scalar_basis():
    # one-hot synthesis must reproduce the pointwise Y_l^m for every sign of m
    th, ph = 1.234, 2.345
    for ell in (1, 2, 5, 9):
        for m in range(-ell, ell + 1):
            c = np.zeros(n_coeffs(ell), dtype=np.complex128)
            c[coeff_index(ell, m)] = 1.0
            v = synthesis_apply(c, np.array([th]), np.array([ph]))[0]
            assert abs(v - sph_harm(ell, m, th, ph).value) < 1e-13, (ell, m)
    a = analysis_apply(np.ones(1), np.array([th]), np.array([ph]), np.ones(1), 5)
    for ell in range(6):
        for m in range(-ell, ell + 1):
            want = np.conj(sph_harm(ell, m, th, ph).value)
            assert abs(a[coeff_index(ell, m)] - want) < 1e-13, (ell, m)


def test_analysis_inverts_synthesis_on_gl_grid():
    rng = np.random.default_rng(15)
    for t in (3, 8, 12):
        grid = gauss_legendre_grid(2 * t)
        c = rng.standard_normal(n_coeffs(t)) + 1j * rng.standard_normal(n_coeffs(t))
        vals = synthesis_apply(c, grid.theta, grid.phi)
        back = analysis_apply(vals, grid.theta, grid.phi, grid.weights, t)
        assert np.max(np.abs(back - c)) < 1e-12


def test_analysis_synthesis_adjoint():
    # <Y c, v>_w == <c, Y* W v> for random data
    rng = np.random.default_rng(16)
    grid = gauss_legendre_grid(10)
    t = 5
    c = rng.standard_normal(n_coeffs(t)) + 1j * rng.standard_normal(n_coeffs(t))
    v = rng.standard_normal(grid.n) + 1j * rng.standard_normal(grid.n)
    lhs = np.sum(grid.weights * synthesis_apply(c, grid.theta, grid.phi) * np.conj(v))
    rhs = np.sum(c * np.conj(analysis_apply(v, grid.theta, grid.phi, grid.weights, t)))
    assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(lhs))


def test_cart_sph_round_trip():
    rng = np.random.default_rng(17)
    theta = rng.uniform(0.0, math.pi, 100)
    phi = rng.uniform(0.0, 2 * math.pi, 100)
    t2, p2 = cart_to_sph(sph_to_cart(theta, phi))
    assert np.max(np.abs(t2 - theta)) < 1e-12
    # phi only defined mod 2pi and undefined at the poles
    dphi = np.abs(np.mod(p2 - phi + math.pi, 2 * math.pi) - math.pi)
    assert np.max(dphi) < 1e-12
    assert np.all((p2 >= 0.0) & (p2 < 2 * math.pi))
    poles = sph_to_cart(np.array([0.0, math.pi]), np.array([1.3, 2.4]))
    assert np.max(np.abs(poles[:, :2])) < 1e-15


def test_synthesis_deterministic():
    rng = np.random.default_rng(18)
    grid = gauss_legendre_grid(20)
    c = rng.standard_normal(n_coeffs(10)) + 1j * rng.standard_normal(n_coeffs(10))
    a = synthesis_apply(c, grid.theta, grid.phi)
    b = synthesis_apply(c, grid.theta, grid.phi)
    assert np.array_equal(a, b)
