import math

import numpy as np

from sphdesign.harmonics import sph_harm
from sphdesign.objective import (DesignObjective, certify, objective_value,
                                 weyl_sums)
from sphdesign.pointsets import (fix_gauge, load_design, spiral_points,
                                 uniform_random_points)

FOUR_PI = 4.0 * math.pi


def test_objective_matches_inclusive_form():
    # independent oracle: W_lm = sum_i Y_l^m(x_i) summed point by point over
    # every (l, m) with 1 <= l <= t, scaled by 4pi/N^2
    rng = np.random.default_rng(21)
    for _ in range(5):
        n, t = int(rng.integers(8, 25)), int(rng.integers(2, 7))
        ps = uniform_random_points(n, int(rng.integers(100)))
        a = objective_value(ps.theta, ps.phi, t)
        total = 0.0
        for ell in range(1, t + 1):
            for m in range(-ell, ell + 1):
                w = sum(sph_harm(ell, m, th, ph).value
                        for th, ph in zip(ps.theta, ps.phi))
                total += abs(w) ** 2
        full = FOUR_PI / n**2 * total
        assert a >= 0.0
        assert abs(a - full) < 1e-12 * max(1.0, a)
        # the packed table stores m >= 0 only; the m = 0, l = 0 entry is N/sqrt(4pi)
        ws = weyl_sums(ps.theta, ps.phi, t)
        assert abs(ws.packed[0] - n / math.sqrt(FOUR_PI)) < 1e-12 * n


def test_certify_verdicts(design16):
    assert certify(design16, 16, tol=1e-10)["pass"]
    raw = spiral_points(121)
    bad = certify(raw, 10, tol=1e-10)
    assert not bad["pass"]
    assert bad["max_weighted_weyl"] > 1e-3
    assert certify(raw, 0, tol=1e-10)["pass"]     # degree 0 is the weight sum


def test_gradient_against_central_differences():
    rng = np.random.default_rng(22)
    for _ in range(10):
        n, t = int(rng.integers(6, 30)), int(rng.integers(2, 8))
        obj = DesignObjective(n, t)
        x = fix_gauge(uniform_random_points(n, int(rng.integers(1000)))).vector
        ev = obj.evaluate(x)
        g = ev.grad
        h = 1e-6
        idx = rng.choice(obj.dim, size=min(8, obj.dim), replace=False)
        for i in idx:
            xp, xm = x.copy(), x.copy()
            xp[i] += h
            xm[i] -= h
            fd = (obj.evaluate(xp).value - obj.evaluate(xm).value) / (2 * h)
            scale = max(np.abs(g).max(), 1e-8)
            assert abs(g[i] - fd) / scale < 1e-6


def test_hess_vec_against_differenced_gradients():
    rng = np.random.default_rng(23)
    for _ in range(5):
        n, t = int(rng.integers(6, 20)), int(rng.integers(2, 6))
        obj = DesignObjective(n, t)
        x = fix_gauge(uniform_random_points(n, int(rng.integers(1000)))).vector
        ev = obj.evaluate(x)
        v = rng.standard_normal(obj.dim)
        v /= np.linalg.norm(v)
        h = 1e-6
        fd = (obj.evaluate(x + h * v).grad - obj.evaluate(x - h * v).grad) / (2 * h)
        hv = ev.hess_vec(v, mode="full")
        scale = max(np.abs(fd).max(), 1e-8)
        assert np.max(np.abs(hv - fd)) / scale < 1e-5


def test_hess_diag_matches_hess_vec():
    rng = np.random.default_rng(24)
    obj = DesignObjective(12, 4)
    x = fix_gauge(uniform_random_points(12, 77)).vector
    ev = obj.evaluate(x)
    for mode in ("full", "approximation"):
        diag = ev.hess_diag(mode=mode)
        for i in rng.choice(obj.dim, size=6, replace=False):
            e = np.zeros(obj.dim)
            e[i] = 1.0
            assert abs(diag[i] - ev.hess_vec(e, mode=mode)[i]) < 1e-10 * max(
                1.0, abs(diag[i]))


def test_hessian_modes_agree_at_design(design16):
    # the second-derivative block vanishes with the residual, so full and
    # Gauss-Newton coincide at a converged design
    obj = DesignObjective(design16.n, 16)
    x = fix_gauge(design16).vector
    ev = obj.evaluate(x)
    rng = np.random.default_rng(25)
    v = rng.standard_normal(obj.dim)
    v /= np.linalg.norm(v)
    full = ev.hess_vec(v, mode="full")
    gn = ev.hess_vec(v, mode="approximation")
    assert np.max(np.abs(full - gn)) < 1e-8 * max(np.max(np.abs(full)), 1e-12)
