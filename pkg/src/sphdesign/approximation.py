"""Least-squares projection onto spherical polynomial spaces, plus the
standard test functions used to exercise it.

The projector solves the weighted normal equations

    Y* diag(w~) Y c = Y* (w~ . f)

matrix-free by conjugate gradients, where Y is the N x (T+1)^2 synthesis
matrix of a point set and w~ is either the quadrature weight vector or its
square root.  On a certified design of degree >= 2T the normal matrix is the
identity (up to certification tolerance) and CG converges immediately.

Test functions: octahedral sums of normalized Wendland radial functions
(smoothness dial k = 0..4) and the closed upper-hemisphere indicator.
"""

import math
from dataclasses import dataclass

import numpy as np

from .harmonics import analysis_apply, n_coeffs, sph_to_cart, synthesis_apply

WEIGHT_MODES = ("w", "sqrt_w")


@dataclass
class SphericalSignal:
    """Sample values aligned with a QuadraturePointSet."""
    values: np.ndarray
    pointset: object

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.ndim != 1 or self.values.size != self.pointset.n:
            raise ValueError("signal length must match the point set")

    @property
    def n(self):
        return self.values.size

    def weighted_norm(self):
        w = self.pointset.weights
        return math.sqrt(float(np.sum(w * np.abs(self.values) ** 2)))


@dataclass
class ProjectionResult:
    coefficients: np.ndarray     # over all (l, m) with l <= degree
    projected: SphericalSignal
    residual: SphericalSignal
    degree: int
    cg_iterations: int
    final_residual_norm: float
    status: str                  # "converged" | "stagnated" | "max_iterations"


def _weight_tilde(pointset, weight_mode):
    if weight_mode not in WEIGHT_MODES:
        raise ValueError(f"weight_mode must be one of {WEIGHT_MODES}")
    w = pointset.weights
    return w if weight_mode == "w" else np.sqrt(w)


def project_cg(signal, T, weight_mode="w", k_max=1000, eps=None):
    """Project a signal onto degree <= T by CG on the normal equations.

    `eps` is an absolute tolerance on the CG residual norm; the default is
    machine epsilon relative to ||b||.  Stagnation (no residual progress
    over ten consecutive steps) is reported distinctly from running out of
    the iteration budget.
    """
    ps = signal.pointset
    T = int(T)
    if T < 0:
        raise ValueError("degree must be nonnegative")
    wt = _weight_tilde(ps, weight_mode)
    theta, phi = ps.theta, ps.phi
    f = np.asarray(signal.values, dtype=np.complex128)

    def apply_normal(c):
        return analysis_apply(synthesis_apply(c, theta, phi), theta, phi, wt, T)

    b = analysis_apply(f, theta, phi, wt, T)
    bnorm = float(np.linalg.norm(b))
    tol = float(eps) if eps is not None else np.finfo(float).eps * bnorm

    x = np.zeros(n_coeffs(T), dtype=np.complex128)
    r = b.copy()
    rnorm = bnorm
    status = "max_iterations"
    k = 0
    stall = 0
    best = rnorm
    if rnorm <= tol:
        status = "converged"
    else:
        p = r.copy()
        rr = rnorm * rnorm
        while k < k_max:
            ap = apply_normal(p)
            denom = float(np.real(np.vdot(p, ap)))
            if denom <= 0.0:            # numerically singular direction
                status = "stagnated"
                break
            alpha = rr / denom
            x = x + alpha * p
            r = r - alpha * ap
            k += 1
            rr_new = float(np.real(np.vdot(r, r)))
            rnorm = math.sqrt(rr_new)
            if rnorm <= tol:
                status = "converged"
                break
            if rnorm >= 0.999 * best:
                stall += 1
                if stall >= 10:
                    status = "stagnated"
                    break
            else:
                stall = 0
                best = rnorm
            p = r + (rr_new / rr) * p
            rr = rr_new

    values = synthesis_apply(x, theta, phi)
    if not np.iscomplexobj(signal.values):
        values = values.real
    projected = SphericalSignal(values, ps)
    residual = SphericalSignal(signal.values - projected.values, ps)
    return ProjectionResult(x, projected, residual, T, k, rnorm, status)


# ---------------------------------------------------------------------------
# Wendland test functions

_PHI_TILDE = (
    lambda t: (1.0 - t) ** 2,
    lambda t: (1.0 - t) ** 4 * (4.0 * t + 1.0),
    lambda t: (1.0 - t) ** 6 * (35.0 * t * t + 18.0 * t + 3.0) / 3.0,
    lambda t: (1.0 - t) ** 8 * ((32.0 * t + 25.0) * t * t + 8.0 * t + 1.0),
    lambda t: (1.0 - t) ** 10
    * (((429.0 * t + 450.0) * t + 210.0) * t * t + 50.0 * t + 5.0) / 5.0,
)

OCTAHEDRON_VERTICES = np.array([
    [1.0, 0.0, 0.0], [-1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0], [0.0, -1.0, 0.0],
    [0.0, 0.0, 1.0], [0.0, 0.0, -1.0],
])


@dataclass(frozen=True)
class WendlandSpec:
    k: int
    delta_k: float

    def __post_init__(self):
        if self.k not in range(5):
            raise ValueError("smoothness index k must be in 0..4")


def wendland_spec(k):
    """Normalization radius delta_k = (3k+3) Gamma(k+1/2) / (2 Gamma(k+1))."""
    k = int(k)
    if k not in range(5):
        raise ValueError("smoothness index k must be in 0..4")
    delta = (3 * k + 3) * math.gamma(k + 0.5) / (2.0 * math.gamma(k + 1))
    return WendlandSpec(k, delta)


def wendland_eval(spec, s):
    """phi_k(s) = phi~_k(s / delta_k), zero once s reaches delta_k."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0.0):
        raise ValueError("radial argument must be nonnegative")
    t = s / spec.delta_k
    out = np.where(t < 1.0, _PHI_TILDE[spec.k](np.minimum(t, 1.0)), 0.0)
    return out if out.ndim else float(out)


def f_k_eval(k, xyz):
    """Sum of phi_k(chord distance) over the six octahedron vertices."""
    spec = wendland_spec(k)
    xyz = np.asarray(xyz, dtype=float)
    # chord ||z_i - x|| for unit vectors, clipped against roundoff
    dots = xyz @ OCTAHEDRON_VERTICES.T
    chord = np.sqrt(np.maximum(2.0 - 2.0 * dots, 0.0))
    return np.sum(wendland_eval(spec, chord), axis=-1)


def indicator_eval(xyz):
    """1 on the closed upper hemisphere (theta <= pi/2), else 0."""
    xyz = np.asarray(xyz, dtype=float)
    return (xyz[..., 2] >= 0.0).astype(float)


def sample_signal(fn, pointset):
    """Evaluate a function of cartesian points into a SphericalSignal."""
    xyz = sph_to_cart(pointset.theta, pointset.phi)
    return SphericalSignal(np.asarray(fn(xyz), dtype=float), pointset)


def wendland_signal(k, pointset):
    return sample_signal(lambda xyz: f_k_eval(k, xyz), pointset)


def indicator_signal(pointset):
    return sample_signal(indicator_eval, pointset)


# ---------------------------------------------------------------------------

def relative_l2_error(approx, truth):
    """||truth - approx|| / ||truth|| in the weighted discrete norm."""
    if approx.n != truth.n:
        raise ValueError("signals are not aligned")
    w = truth.pointset.weights
    denom = math.sqrt(float(np.sum(w * np.abs(truth.values) ** 2)))
    if denom == 0.0:
        raise ValueError("truth signal has zero norm")
    num = math.sqrt(float(np.sum(w * np.abs(truth.values - approx.values) ** 2)))
    return num / denom


def add_noise(signal, sigma, seed=0):
    """Gaussian perturbation with standard deviation sigma * max|values|."""
    if sigma < 0.0:
        raise ValueError("sigma must be nonnegative")
    if sigma == 0.0:
        return SphericalSignal(signal.values.copy(), signal.pointset)
    scale = sigma * float(np.abs(signal.values).max())
    rng = np.random.Generator(np.random.PCG64(seed))
    noise = rng.normal(0.0, scale, signal.n)
    return SphericalSignal(signal.values + noise, signal.pointset)


@dataclass
class DegreeSweepResult:
    degrees: np.ndarray
    errors: np.ndarray           # err(projection at T, truth) per degree
    best_degree: int
    best_error: float

    def rows(self):
        return list(zip(self.degrees.tolist(), self.errors.tolist()))


def degree_sweep(noisy, truth, T_range, weight_mode="w", k_max=1000, eps=None):
    """Project `noisy` at each degree and score against `truth`.

    Returns the per-degree error table and the minimizing degree.
    """
    degrees = np.asarray(list(T_range), dtype=int)
    if degrees.size == 0:
        raise ValueError("empty degree range")
    errors = np.empty(degrees.size)
    for i, T in enumerate(degrees):
        res = project_cg(noisy, int(T), weight_mode, k_max=k_max, eps=eps)
        errors[i] = relative_l2_error(res.projected, truth)
    best = int(np.argmin(errors))
    return DegreeSweepResult(degrees, errors, int(degrees[best]), float(errors[best]))
