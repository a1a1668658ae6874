"""Unconstrained minimizers used for spherical-design computation.

Two solvers over a shared objective protocol (`obj.dim`, `obj.evaluate(x)`
returning an object with `.value`, `.grad`, `.hess_vec(v, mode)`,
`.hess_diag(mode)`):

* ls_rcg    restarted nonlinear conjugate gradient with a curvature-based
            (Daniel) beta and an exact-Newton line search on the ray
* tr_pcg    trust-region Newton with Steihaug truncated CG, optional
            Jacobi preconditioning

Both stop on ||grad||_inf <= eps1, return monotone iterate traces, and
report budget exhaustion / stalls distinctly from convergence.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .objective import DesignObjective, certify
from .harmonics import cart_to_sph, sph_to_cart
from .pointsets import (GaugedConfig, QuadraturePointSet, equal_weights,
                        fix_gauge, spiral_points, uniform_random_points)


class ZeroCurvatureError(RuntimeError):
    """Line search asked for curvature along a degenerate direction."""


@dataclass
class LineSearchConfig:
    i_max: int = 40
    eps2: float = 1e-10
    backtrack: float = 0.5


@dataclass
class LsRcgConfig:
    k_max: int = 2000
    restart_r: float = 0.2
    eps1: float = 1e-13          # on ||grad||_inf
    hessian_mode: str = "full"
    ls: LineSearchConfig = field(default_factory=LineSearchConfig)
    callback: object = None      # called with (k, value, grad_inf) per iteration


@dataclass
class TrConfig:
    k_max: int = 2000
    eps1: float = 1e-13
    delta0: float = 1.0
    delta_max: float = 10.0
    eta: float = 0.1             # step acceptance threshold, 0 < eta < 1/4
    hessian_mode: str = "full"
    precond: str = "identity"    # "identity" | "diagonal"
    cg_max: int | None = None
    callback: object = None      # called with (k, value, grad_inf) per iteration

    def __post_init__(self):
        if not 0.0 < self.eta < 0.25:
            raise ValueError("eta must lie in (0, 1/4)")


@dataclass
class OptimResult:
    x: np.ndarray
    value: float
    sqrt_value: float
    grad_inf: float
    iterations: int
    converged: bool
    status: str                  # "converged" | "max_iterations" | "stalled"
    trace: list
    restarts: int = 0
    cg_steps: int = 0


def line_search(obj, x, d, cfg=None, mode="full", ev0=None):
    """Newton-Raphson on h(a) = f(x + a d) with geometric backtracking.

    a_0 = -(g.d)/(d.E d); each step a <- a - (g_a.d)/(d.E_a d) with curvature
    re-evaluated at the trial point; a <- backtrack*a whenever f increases.
    Stops when |g_a.d| / (||g_a|| ||d||) < eps2 or the budget runs out, and
    then returns the best step seen.  Returns (alpha, evaluation_at_alpha).
    """
    cfg = cfg or LineSearchConfig()
    d = np.asarray(d, dtype=np.float64)
    if not np.any(d):
        raise ZeroCurvatureError("zero search direction")
    ev = ev0 if ev0 is not None else obj.evaluate(x)
    g0d = float(ev.grad @ d)
    curv = float(d @ ev.hess_vec(d, mode))
    if curv == 0.0 and g0d == 0.0:
        raise ZeroCurvatureError("vanishing curvature and slope along direction")
    alpha = -g0d / curv if curv > 0.0 else 1.0
    if alpha <= 0.0:
        alpha = 1.0
    f_ref = ev.value
    best_alpha, best_ev = 0.0, None
    best_f = ev.value
    for _ in range(cfg.i_max):
        trial = obj.evaluate(x + alpha * d)
        if trial.value > f_ref:
            alpha *= cfg.backtrack
            continue
        if trial.value < best_f:
            best_f, best_alpha, best_ev = trial.value, alpha, trial
        gd = float(trial.grad @ d)
        denom = float(np.linalg.norm(trial.grad) * np.linalg.norm(d))
        if denom == 0.0 or abs(gd) / denom < cfg.eps2:
            return alpha, trial
        curv = float(d @ trial.hess_vec(d, mode))
        if curv > 0.0:
            step = -gd / curv
            new_alpha = alpha + step
            if new_alpha <= 0.0:
                new_alpha = alpha * cfg.backtrack
        else:
            new_alpha = 2.0 * alpha  # nonconvex along the ray: extend
        f_ref = trial.value
        alpha = new_alpha
    return best_alpha, best_ev


def ls_rcg(obj, x0, cfg=None):
    """Restarted conjugate gradient (Daniel beta) with Newton line search."""
    cfg = cfg or LsRcgConfig()
    mode = cfg.hessian_mode
    x = np.asarray(x0, dtype=np.float64).copy()
    ev = obj.evaluate(x)
    d = -ev.grad
    trace = [(0, ev.value, float(np.abs(ev.grad).max()))]
    restarts = 0
    k = 0
    status = "max_iterations"
    while k < cfg.k_max:
        ginf = float(np.abs(ev.grad).max())
        if ginf <= cfg.eps1:
            status = "converged"
            break
        if float(ev.grad @ d) >= 0.0:
            d = -ev.grad
            restarts += 1
        alpha, trial = line_search(obj, x, d, cfg.ls, mode, ev0=ev)
        k += 1
        if trial is None or trial.value > ev.value:
            status = "stalled"
            trace.append((k, ev.value, ginf))
            break
        g_old = ev.grad
        x = x + alpha * d
        ev = trial
        trace.append((k, ev.value, float(np.abs(ev.grad).max())))
        if cfg.callback is not None:
            cfg.callback(k, ev.value, float(np.abs(ev.grad).max()))
        if float(np.abs(ev.grad).max()) <= cfg.eps1:
            status = "converged"
            break
        if float(g_old @ ev.grad) >= cfg.restart_r * float(g_old @ g_old):
            d = -ev.grad
            restarts += 1
        else:
            bd = ev.hess_vec(d, mode)
            denom = float(d @ bd)
            if denom <= 0.0 or not math.isfinite(denom):
                d = -ev.grad
                restarts += 1
            else:
                beta = float(ev.grad @ bd) / denom
                d = -ev.grad + beta * d
    ginf = float(np.abs(ev.grad).max())
    return OptimResult(x, ev.value, math.sqrt(max(ev.value, 0.0)), ginf, k,
                       status == "converged", status, trace, restarts=restarts)


def _boundary_tau(p, d, md, mp_norm2, delta):
    # positive root of ||p + tau d||_M^2 = delta^2 given md = M d, M p dot p
    a = float(d @ md)
    b = 2.0 * float(p @ md)
    c0 = mp_norm2 - delta * delta
    disc = max(b * b - 4.0 * a * c0, 0.0)
    return (-b + math.sqrt(disc)) / (2.0 * a)


def tr_pcg(obj, x0, cfg=None):
    """Trust-region Newton with Steihaug truncated CG.

    Inner tolerance ||r|| <= min(0.5, sqrt(||g||)) * ||g||; radius grows to
    delta_max on strong steps that hit the boundary, shrinks on poor ones;
    steps accepted when rho > eta.
    """
    cfg = cfg or TrConfig()
    mode = cfg.hessian_mode
    x = np.asarray(x0, dtype=np.float64).copy()
    ev = obj.evaluate(x)
    delta = cfg.delta0
    cg_max = cfg.cg_max if cfg.cg_max is not None else obj.dim
    trace = [(0, ev.value, float(np.abs(ev.grad).max()))]
    cg_total = 0
    k = 0
    status = "max_iterations"
    while k < cfg.k_max:
        g = ev.grad
        ginf = float(np.abs(g).max())
        if ginf <= cfg.eps1:
            status = "converged"
            break
        k += 1
        gnorm = float(np.linalg.norm(g))
        tol = min(0.5, math.sqrt(gnorm)) * gnorm
        if cfg.precond == "diagonal":
            dscale = ev.hess_diag(mode)
            floor = max(1e-300, 1e-12 * float(np.abs(dscale).max()))
            minv = 1.0 / np.maximum(dscale, floor)
        else:
            minv = None

        # --- Steihaug truncated CG on the model around x
        p = np.zeros_like(g)
        r = g.copy()
        y = r * minv if minv is not None else r
        dvec = -y
        rmr = float(r @ y)
        mp_norm2 = 0.0
        hit_boundary = False
        for _ in range(cg_max):
            bd = ev.hess_vec(dvec, mode)
            cg_total += 1
            dbd = float(dvec @ bd)
            md = dscale * dvec if minv is not None else dvec
            if dbd <= 0.0:
                tau = _boundary_tau(p, dvec, md, mp_norm2, delta)
                p = p + tau * dvec
                hit_boundary = True
                break
            acg = rmr / dbd
            p_new = p + acg * dvec
            mp_new = mp_norm2 + 2.0 * acg * float(p @ md) + acg * acg * float(dvec @ md)
            if mp_new >= delta * delta:
                tau = _boundary_tau(p, dvec, md, mp_norm2, delta)
                p = p + tau * dvec
                hit_boundary = True
                break
            p = p_new
            mp_norm2 = mp_new
            r = r + acg * bd
            if float(np.linalg.norm(r)) <= tol:
                break
            y = r * minv if minv is not None else r
            rmr_new = float(r @ y)
            dvec = -y + (rmr_new / rmr) * dvec
            rmr = rmr_new

        if not np.any(p):
            status = "stalled"
            trace.append((k, ev.value, ginf))
            break
        hp = ev.hess_vec(p, mode)
        pred = -(float(g @ p) + 0.5 * float(p @ hp))
        trial = obj.evaluate(x + p)
        rho = (ev.value - trial.value) / pred if pred > 0.0 else -math.inf
        if rho < 0.25:
            delta *= 0.25
        elif rho > 0.75 and hit_boundary:
            delta = min(2.0 * delta, cfg.delta_max)
        if rho > cfg.eta:
            x = x + p
            ev = trial
        trace.append((k, ev.value, float(np.abs(ev.grad).max())))
        if cfg.callback is not None:
            cfg.callback(k, ev.value, float(np.abs(ev.grad).max()))
        if delta < 1e-16:
            status = "stalled"
            break
    ginf = float(np.abs(ev.grad).max())
    return OptimResult(x, ev.value, math.sqrt(max(ev.value, 0.0)), ginf, k,
                       status == "converged", status, trace, cg_steps=cg_total)


# ---------------------------------------------------------------------------

def initial_pointset(kind, n, seed=None):
    if kind in ("sp", "spiral"):
        return spiral_points(n)
    if kind in ("ud", "uniform"):
        return uniform_random_points(n, 0 if seed is None else seed)
    raise ValueError(f"unknown initialization {kind!r}")


def compute_design(t, n=None, init="spiral", seed=None, solver="tr-pcg",
                   hessian_mode="full", eps1=1e-13, k_max=None, precond="identity",
                   certify_tol=1e-10, delta_max=10.0, callback=None):
    """Drive a solver from an initial point set to a certified t-design.

    Returns (QuadraturePointSet with certification fields, OptimResult).
    """
    t = int(t)
    if isinstance(init, QuadraturePointSet):
        ps0 = init
        n = ps0.n
    else:
        n = (t + 1) ** 2 if n is None else int(n)
        ps0 = initial_pointset(init, n, seed)
    obj = DesignObjective(n, t)
    x0 = fix_gauge(ps0).vector
    if solver == "ls-rcg":
        cfg = LsRcgConfig(k_max=k_max if k_max is not None else 200 * max(t, 1),
                          eps1=eps1, hessian_mode=hessian_mode, callback=callback)
        res = ls_rcg(obj, x0, cfg)
    elif solver == "tr-pcg":
        cfg = TrConfig(k_max=k_max if k_max is not None else 200 * max(t, 1),
                       eps1=eps1, hessian_mode=hessian_mode, precond=precond,
                       delta_max=delta_max, callback=callback)
        res = tr_pcg(obj, x0, cfg)
    else:
        raise ValueError(f"unknown solver {solver!r}")
    cfgd = GaugedConfig(res.x, n)
    # unconstrained angles may leave the principal ranges; map back through R^3
    theta, phi = cart_to_sph(sph_to_cart(cfgd.theta, cfgd.phi))
    ps = QuadraturePointSet(theta, phi, equal_weights(n),
                            declared_degree=t, generator=f"{ps0.generator}-design",
                            seed=seed)
    cert = certify(ps, t, tol=certify_tol)
    ps.certified_tol = cert["max_weighted_weyl"]
    return ps, res
