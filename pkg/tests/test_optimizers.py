import numpy as np
import pytest

from sphdesign.objective import DesignObjective
from sphdesign.optimizers import (LsRcgConfig, TrConfig, compute_design,
                                  initial_pointset, ls_rcg, tr_pcg)
from sphdesign.pointsets import fix_gauge


def test_initial_pointset_kinds():
    assert initial_pointset("sp", 50).n == 50
    assert initial_pointset("spiral", 50).n == 50
    a = initial_pointset("ud", 50, seed=1)
    b = initial_pointset("uniform", 50, seed=1)
    assert np.array_equal(a.theta, b.theta)
    with pytest.raises(ValueError):
        initial_pointset("random", 50)


def test_small_design_all_solver_mode_pairs():
    for solver in ("tr-pcg", "ls-rcg"):
        for mode in ("full", "approximation"):
            ps, res = compute_design(4, solver=solver, hessian_mode=mode)
            assert res.status == "converged", (solver, mode)
            assert res.sqrt_value <= 5e-13, (solver, mode)
            assert res.grad_inf <= 1e-13
            assert ps.certified_tol <= 1e-12
            assert ps.declared_degree == 4


def test_converged_input_exits_immediately():
    ps, _ = compute_design(4)
    ps2, res = compute_design(4, init=ps)
    assert res.iterations == 0
    assert res.status == "converged"
    assert np.array_equal(ps2.theta, ps.theta)


def test_callback_sees_iterations():
    seen = []
    _, res = compute_design(3, callback=lambda k, v, g: seen.append((k, v, g)))
    assert len(seen) == res.iterations
    ks = [s[0] for s in seen]
    assert ks == sorted(ks)
    assert all(v >= 0.0 and g >= 0.0 for _, v, g in seen)


def test_iteration_budget_reported():
    _, res = compute_design(6, init="ud", seed=0, k_max=1)
    assert res.status != "converged"
    assert res.iterations == 1


def test_solvers_deterministic():
    a = compute_design(4, init="ud", seed=11)[1]
    b = compute_design(4, init="ud", seed=11)[1]
    assert np.array_equal(a.x, b.x)
    assert a.value == b.value


def test_direct_solver_calls():
    obj = DesignObjective(25, 4)
    x0 = fix_gauge(initial_pointset("sp", 25)).vector
    r1 = tr_pcg(obj, x0, TrConfig(eps1=1e-13, k_max=200, precond="diagonal"))
    assert r1.status == "converged" and r1.grad_inf <= 1e-13
    r2 = ls_rcg(obj, x0, LsRcgConfig(eps1=1e-13, k_max=2000))
    assert r2.status == "converged" and r2.grad_inf <= 1e-13
    assert len(r1.trace) >= 2
