import math

import numpy as np
import pytest

from sphdesign.approximation import (OCTAHEDRON_VERTICES, SphericalSignal,
                                     add_noise, degree_sweep, f_k_eval,
                                     indicator_signal, project_cg,
                                     relative_l2_error, wendland_eval,
                                     wendland_signal, wendland_spec)
from sphdesign.harmonics import n_coeffs, synthesis_apply
from sphdesign.pointsets import spiral_points


def _phi_scalar(k, t):
    # independent scalar recomputation of the compact table
    if t >= 1.0:
        return 0.0
    u = 1.0 - t
    return [
        u**2,
        u**4 * (4 * t + 1),
        u**6 * (35 * t**2 + 18 * t + 3) / 3,
        u**8 * (32 * t**3 + 25 * t**2 + 8 * t + 1),
        u**10 * (429 * t**4 + 450 * t**3 + 210 * t**2 + 50 * t + 5) / 5,
    ][k]


def test_wendland_scale_factors():
    assert abs(wendland_spec(0).delta_k - 3 * math.sqrt(math.pi) / 2) < 1e-14
    for k in range(5):
        d = wendland_spec(k).delta_k
        want = (3 * k + 3) * math.gamma(k + 0.5) / (2 * math.gamma(k + 1))
        assert abs(d - want) < 1e-13
        assert d > 2.0      # the cutoff never activates for on-sphere chords


def test_wendland_eval_table():
    spec = wendland_spec(1)
    assert wendland_eval(spec, 0.5 * spec.delta_k) == pytest.approx(0.1875, abs=1e-15)
    rng = np.random.default_rng(31)
    for k in range(5):
        spec = wendland_spec(k)
        s = rng.uniform(0.0, spec.delta_k * 1.2, 40)
        got = wendland_eval(spec, s)
        want = np.array([_phi_scalar(k, si / spec.delta_k) for si in s])
        assert np.max(np.abs(got - want)) < 1e-14
    with pytest.raises(ValueError):
        wendland_eval(spec, np.array([-0.1]))


def test_f1_at_first_vertex_scalar_oracle():
    spec = wendland_spec(1)
    total = 0.0
    e1 = np.array([1.0, 0.0, 0.0])
    for z in OCTAHEDRON_VERTICES:
        chord = math.sqrt(max(2.0 - 2.0 * float(z @ e1), 0.0))
        total += _phi_scalar(1, chord / spec.delta_k)
    got = float(f_k_eval(1, e1))
    assert abs(got - total) < 1e-14
    assert abs(got - 1.6156586827586) < 1e-12


def test_octahedral_symmetry():
    for k in (0, 2, 4):
        vals = f_k_eval(k, OCTAHEDRON_VERTICES)
        assert np.max(np.abs(vals - vals[0])) < 1e-14


def test_indicator_closed_upper_hemisphere():
    xyz = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0],
                    [1.0, 0.0, 0.0], [0.3, -0.4, -1e-12]])
    sig = (np.array([1.0, 0.0, 1.0, 0.0]))
    from sphdesign.approximation import indicator_eval
    assert np.array_equal(indicator_eval(xyz), sig)


def test_projection_recovers_bandlimited_truth(design16):
    rng = np.random.default_rng(32)
    T = 8
    c = rng.standard_normal(n_coeffs(T)) + 1j * rng.standard_normal(n_coeffs(T))
    truth = SphericalSignal(synthesis_apply(c, design16.theta, design16.phi),
                            design16)
    res = project_cg(truth, T)
    assert res.status == "converged"
    assert res.cg_iterations <= 3       # the normal matrix is the identity
    assert np.max(np.abs(res.coefficients - c)) < 1e-12
    assert relative_l2_error(res.projected, truth) < 1e-12


def test_projection_idempotent(design16):
    sig = wendland_signal(2, design16)
    once = project_cg(sig, 6)
    twice = project_cg(once.projected, 6)
    err = relative_l2_error(twice.projected, once.projected)
    assert err < 1e-13


def test_projection_weight_modes_agree_on_equal_weights(design16):
    sig = wendland_signal(1, design16)
    a = project_cg(sig, 5, weight_mode="w")
    b = project_cg(sig, 5, weight_mode="sqrt_w")
    assert np.max(np.abs(a.coefficients - b.coefficients)) < 1e-10
    with pytest.raises(ValueError):
        project_cg(sig, 5, weight_mode="w2")


def test_projection_budget_status():
    # non-design rule: the normal matrix is far from the identity, so one
    # CG step cannot converge
    ps = spiral_points(200)
    sig = wendland_signal(1, ps)
    res = project_cg(sig, 10, k_max=1)
    assert res.status == "max_iterations"
    assert res.cg_iterations == 1


def test_relative_error_and_noise(design16):
    truth = wendland_signal(4, design16)
    assert relative_l2_error(truth, truth) == 0.0
    zero = SphericalSignal(np.zeros(design16.n), design16)
    with pytest.raises(ValueError):
        relative_l2_error(truth, zero)

    a = add_noise(truth, 0.05, seed=3)
    b = add_noise(truth, 0.05, seed=3)
    c = add_noise(truth, 0.05, seed=4)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)
    clean = add_noise(truth, 0.0, seed=3)
    assert np.array_equal(clean.values, truth.values)
    noise = a.values - truth.values
    scale = 0.05 * np.max(np.abs(truth.values))
    assert abs(np.std(noise) / scale - 1.0) < 0.1


def test_degree_sweep_structure(design32):
    truth = wendland_signal(1, design32)
    noisy = add_noise(truth, 0.05, seed=0)
    sw = degree_sweep(noisy, truth, range(2, 11, 2))
    assert list(sw.degrees) == [2, 4, 6, 8, 10]
    assert sw.errors.shape == (5,)
    assert np.all(sw.errors > 0.0)
    assert sw.best_error == sw.errors.min()
    assert sw.best_degree == sw.degrees[int(np.argmin(sw.errors))]
    assert len(sw.rows()) == 5
