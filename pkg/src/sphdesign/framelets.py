"""Truncated semi-discrete spherical framelet systems.

A system is determined by a filter bank (one low-pass function a_hat and n
high-pass functions b_hat_s on [0,1], partition of unity |a|^2 + sum|b_s|^2
= 1) and a ladder of quadrature rules whose exactness degrees double level
to level.  Masks are sampled per harmonic degree by the cascade

    alpha[top][l] = 1 for l <= t_J, else 0
    alpha[j][l]   = a_hat(l / t_{j+1}) * alpha[j+1][l]
    beta_s[j][l]  = b_hat_s(l / t_{j+1}) * alpha[j+1][l]

running from the fine scale down.  Low-pass atoms live on the level-j
points, high-pass atoms on the level-(j+1) points; together they form a
tight frame for the polynomial space of the second-finest rule, provided
every mask stays inside half the exactness degree of the rule it samples
on.  The shipped banks are built that way: a_hat is supported on [0, 1/4]
and the high-pass splits ramp over [1/4, 1/2] and [1/2, 3/4].

Decomposition and reconstruction act on spectral coefficient vectors (the
signal is already band-limited after projection), so inner products reduce
to mask-weighted synthesis/analysis at the ladder points.
"""

import math
from dataclasses import dataclass

import numpy as np

from .harmonics import analysis_apply, n_coeffs, synthesis_apply
from .objective import certify
from .pointsets import load_design

PUC_TOL = 1e-12
LADDER_CERT_TOL = 1e-10


def _smoothstep(x):
    x = np.clip(x, 0.0, 1.0)
    return x * x * (3.0 - 2.0 * x)


class FilterBank:
    """Low-pass a_hat plus n high-pass b_hat functions on [0, 1].

    The partition of unity |a_hat|^2 + sum_s |b_hat_s|^2 = 1 is checked on a
    dense grid at construction; violations are rejected.
    """

    def __init__(self, a_hat, b_hats, name="custom", check_grid=10_001):
        self.a_hat = a_hat
        self.b_hats = tuple(b_hats)
        self.name = name
        self.xi_grid = None     # sampled banks carry their node grid
        if not self.b_hats:
            raise ValueError("a bank needs at least one high-pass filter")
        dev = self.puc_deviation(np.linspace(0.0, 1.0, check_grid))
        if dev > PUC_TOL:
            raise ValueError(f"partition of unity violated by {dev:.3e}")

    @property
    def n(self):
        return len(self.b_hats)

    def puc_deviation(self, xi):
        xi = np.asarray(xi, dtype=float)
        total = np.abs(self.a_hat(xi)) ** 2
        for b in self.b_hats:
            total = total + np.abs(b(xi)) ** 2
        return float(np.abs(total - 1.0).max())

    def sample(self, xi):
        """Rows (a_hat(xi), b_1(xi), ..., b_n(xi)) stacked as columns."""
        xi = np.asarray(xi, dtype=float)
        cols = [np.broadcast_to(self.a_hat(xi), xi.shape).astype(float)]
        cols += [np.broadcast_to(b(xi), xi.shape).astype(float) for b in self.b_hats]
        return np.stack(cols, axis=-1)


def default_bank(n=3):
    """Shipped PUC banks with n in {1, 2, 3} high-pass filters.

    a_hat equals 1 below xi = 1/8 and rolls off to 0 at 1/4, which keeps
    every cascade mask inside half the exactness degree of its quadrature
    rule.  The cascade carrier vanishes from xi = 1/2 on, so the high-pass
    energy sqrt(1 - a^2) is split between the b_s inside the active band:
    rolloffs at [1/4, 5/16] and [5/16, 3/8] give every filter a live
    subband at every level.
    """
    if n not in (1, 2, 3):
        raise ValueError("shipped banks have 1, 2, or 3 high-pass filters")
    half_pi = 0.5 * math.pi

    def a_hat(xi):
        return np.cos(half_pi * _smoothstep((np.asarray(xi, float) - 0.125) * 8.0))

    def lowramp(xi):      # sin part complementing a_hat
        return np.sin(half_pi * _smoothstep((np.asarray(xi, float) - 0.125) * 8.0))

    def r2(xi):
        return half_pi * _smoothstep((np.asarray(xi, float) - 0.25) * 16.0)

    def r3(xi):
        return half_pi * _smoothstep((np.asarray(xi, float) - 0.3125) * 16.0)

    if n == 1:
        b = (lowramp,)
    elif n == 2:
        b = (lambda xi: lowramp(xi) * np.cos(r2(xi)),
             lambda xi: lowramp(xi) * np.sin(r2(xi)))
    else:
        b = (lambda xi: lowramp(xi) * np.cos(r2(xi)),
             lambda xi: lowramp(xi) * np.sin(r2(xi)) * np.cos(r3(xi)),
             lambda xi: lowramp(xi) * np.sin(r2(xi)) * np.sin(r3(xi)))
    return FilterBank(a_hat, b, name=f"default-n{n}")


def bank_from_samples(xi, table, name="sampled"):
    """Bank from sampled values: columns of `table` are (a, b_1, ..., b_n).

    Values between samples are linearly interpolated; the PUC check runs on
    the sample grid itself, which the bank keeps as `xi_grid`.  Cascades
    only ever evaluate filters at the rationals l/t, so a uniform grid of
    2^k + 1 nodes reproduces an analytic bank exactly on power-of-two
    ladders.
    """
    xi = np.asarray(xi, dtype=float)
    table = np.asarray(table, dtype=float)
    if table.ndim != 2 or table.shape[0] != xi.size or table.shape[1] < 2:
        raise ValueError("need columns (a, b_1, ..., b_n) aligned with xi")
    order = np.argsort(xi)
    xi, table = xi[order], table[order]

    def interp(col):
        return lambda x: np.interp(np.asarray(x, dtype=float), xi, table[:, col])

    bank = FilterBank.__new__(FilterBank)
    bank.a_hat = interp(0)
    bank.b_hats = tuple(interp(c) for c in range(1, table.shape[1]))
    bank.name = name
    bank.xi_grid = xi
    dev = bank.puc_deviation(xi)
    if dev > PUC_TOL:
        raise ValueError(f"partition of unity violated by {dev:.3e} at the samples")
    return bank


def save_bank_csv(bank, path, samples=1025):
    xi = np.linspace(0.0, 1.0, samples)
    tab = bank.sample(xi)
    header = "xi,a," + ",".join(f"b{s + 1}" for s in range(bank.n))
    data = np.column_stack([xi, tab])
    np.savetxt(path, data, delimiter=",", header=header, comments="", fmt="%.17g")


def load_bank_csv(path, name=None):
    rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return bank_from_samples(rows[:, 0], rows[:, 1:],
                             name=name or f"csv:{path}")


# ---------------------------------------------------------------------------

class QuadratureLadder:
    """Rules with doubling exactness degrees t_{j+1} = 2 t_j, coarse to fine.

    The frame built on the ladder spans the polynomial space of the
    second-finest degree.  Each rule is re-certified at construction unless
    verify=False.
    """

    def __init__(self, rules, verify=True, cert_tol=LADDER_CERT_TOL):
        rules = list(rules)
        if len(rules) < 2:
            raise ValueError("a ladder needs at least two rules")
        self.rules = rules
        self.degrees = []
        for ps in rules:
            if ps.declared_degree is None:
                raise ValueError("every ladder rule needs a declared degree")
            self.degrees.append(int(ps.declared_degree))
        for lo, hi in zip(self.degrees, self.degrees[1:]):
            if hi != 2 * lo:
                raise ValueError(f"degrees must double: got {lo} then {hi}")
        self.certified = []
        for ps, t in zip(rules, self.degrees):
            if verify:
                report = certify(ps, t, tol=cert_tol)
                if not report["pass"]:
                    raise ValueError(
                        f"rule of degree {t} fails certification: "
                        f"max weighted Weyl sum {report['max_weighted_weyl']:.3e}")
                self.certified.append(report["max_weighted_weyl"])
            else:
                self.certified.append(ps.certified_tol)

    @property
    def n_levels(self):
        return len(self.rules) - 1          # framelet levels j = 0 .. J

    @property
    def frame_degree(self):
        """Degree t_J of the polynomial space the frame spans."""
        return self.degrees[-2]

    def __len__(self):
        return len(self.rules)


def design_ladder(degrees=(16, 32, 64), verify=True):
    """Ladder from the shipped certified designs (degrees must double)."""
    return QuadratureLadder([load_design(t) for t in degrees], verify=verify)


@dataclass
class MaskCascade:
    """Per-degree mask samples: alpha[j][l], beta[j][s][l].

    alpha has one array per level j = 0..J+1 (length degrees[j] + 1, the top
    one spanning the full fine band); beta has, for each j = 0..J, one array
    per high-pass filter spanning degree t_{j+1}.
    """
    alpha: list
    beta: list
    degrees: list

    def telescoping_deviation(self):
        """max_l | |alpha[0][l]|^2 + sum_{j,s} |beta[j][s][l]|^2 - 1 |, l <= t_0."""
        t0 = self.degrees[0]
        total = np.abs(self.alpha[0][:t0 + 1]) ** 2
        for level in self.beta:
            for arr in level:
                total = total + np.abs(arr[:t0 + 1]) ** 2
        return float(np.abs(total - 1.0).max())


def build_masks(bank, ladder):
    """Sample the cascade masks for `bank` on `ladder` degrees."""
    degs = ladder.degrees
    top = len(degs) - 1                      # index of the finest rule (J+1)
    t_J = degs[top - 1]
    ell_top = np.arange(degs[top] + 1)
    alpha = [None] * (top + 1)
    alpha[top] = (ell_top <= t_J).astype(float)
    beta = [None] * top
    for j in range(top - 1, -1, -1):
        t_next = degs[j + 1]
        ell = np.arange(t_next + 1)
        xi = ell / t_next
        carrier = alpha[j + 1][:t_next + 1]
        alpha[j] = (np.asarray(bank.a_hat(xi), dtype=float) * carrier)[:degs[j] + 1]
        beta[j] = [np.asarray(b(xi), dtype=float) * carrier for b in bank.b_hats]
    return MaskCascade(alpha, beta, list(degs))


@dataclass
class FrameletCoefficients:
    """v: low-pass coefficients on the coarsest rule; w[j][s]: high-pass."""
    v: np.ndarray
    w: list

    def energy(self):
        total = float(np.sum(np.abs(self.v) ** 2))
        for level in self.w:
            for arr in level:
                total += float(np.sum(np.abs(arr) ** 2))
        return total

    def counts(self):
        return (self.v.size, [[arr.size for arr in level] for level in self.w])


def _mask_to_coeff(mask, t):
    """Spread a per-degree mask to the flat (l, m) coefficient layout."""
    out = np.empty(n_coeffs(t))
    for ell in range(t + 1):
        out[ell * ell: (ell + 1) * (ell + 1)] = mask[ell]
    return out


def _fit_band(coeffs, t_from, t_to):
    if t_to == t_from:
        return coeffs
    if t_to < t_from:
        return coeffs[:n_coeffs(t_to)]
    out = np.zeros(n_coeffs(t_to), dtype=coeffs.dtype)
    out[:coeffs.size] = coeffs
    return out


def decompose(f_coeffs, cascade, ladder):
    """Framelet coefficients of a band-limited f given by spectral coefficients.

    f must live in the frame space (degree <= ladder.frame_degree).
    """
    f_coeffs = np.asarray(f_coeffs, dtype=np.complex128)
    t_J = ladder.frame_degree
    if f_coeffs.size != n_coeffs(t_J):
        raise ValueError(f"expected coefficients over degree {t_J}, "
                         f"got length {f_coeffs.size}")
    degs = ladder.degrees
    # low-pass at the coarsest level
    t0 = degs[0]
    ps0 = ladder.rules[0]
    masked = _fit_band(f_coeffs, t_J, t0) * _mask_to_coeff(cascade.alpha[0], t0)
    v = np.sqrt(ps0.weights) * synthesis_apply(masked, ps0.theta, ps0.phi)
    # high-pass levels ride on the next-finer rule
    w = []
    for j in range(ladder.n_levels):
        t_next = degs[j + 1]
        ps = ladder.rules[j + 1]
        sw = np.sqrt(ps.weights)
        level = []
        padded = _fit_band(f_coeffs, t_J, t_next)
        for mask in cascade.beta[j]:
            mc = padded * _mask_to_coeff(mask, t_next)
            level.append(sw * synthesis_apply(mc, ps.theta, ps.phi))
        w.append(level)
    return FrameletCoefficients(v, w)


def reconstruct(coeffs, cascade, ladder):
    """Spectral coefficients over the frame space from framelet coefficients."""
    degs = ladder.degrees
    t_J = ladder.frame_degree
    ps0 = ladder.rules[0]
    if coeffs.v.size != ps0.n:
        raise ValueError("low-pass block does not match the coarsest rule")
    t0 = degs[0]
    acc = _fit_band(
        _mask_to_coeff(cascade.alpha[0], t0)
        * analysis_apply(coeffs.v, ps0.theta, ps0.phi, np.sqrt(ps0.weights), t0),
        t0, t_J)
    if len(coeffs.w) != ladder.n_levels:
        raise ValueError("level count does not match the ladder")
    for j, level in enumerate(coeffs.w):
        t_next = degs[j + 1]
        ps = ladder.rules[j + 1]
        if len(level) != len(cascade.beta[j]):
            raise ValueError("high-pass filter count mismatch")
        sw = np.sqrt(ps.weights)
        for arr, mask in zip(level, cascade.beta[j]):
            if arr.size != ps.n:
                raise ValueError("coefficient block does not match its rule")
            part = _mask_to_coeff(mask, t_next) * analysis_apply(
                arr, ps.theta, ps.phi, sw, t_next)
            acc = acc + _fit_band(part, t_next, t_J)
    return acc


def atom_energies(cascade, ladder):
    """Squared L2 norms of the atoms, one scalar per (level, filter) block.

    By the addition theorem the energy of an atom at point k is
    w_k * sum_l |mask[l]|^2 (2l+1) / 4pi; on equal-weight rules it is the
    same for every k, which is what the thresholding normalization uses.
    Returns (low_pass_energy_per_point, [[per s] per level]) arrays aligned
    with the coefficient blocks.
    """
    degs = ladder.degrees

    def block(mask, ps):
        ell = np.arange(mask.size)
        s = float(np.sum(np.abs(mask) ** 2 * (2 * ell + 1))) / (4.0 * math.pi)
        return ps.weights * s

    low = block(cascade.alpha[0], ladder.rules[0])
    high = [[block(mask, ladder.rules[j + 1]) for mask in cascade.beta[j]]
            for j in range(ladder.n_levels)]
    return low, high


def atom_eval(kind, j, k, point, cascade, ladder):
    """Pointwise value of one atom; `kind` is "phi" or ("psi", s).

    phi_{j,k}(x) = sqrt(w_{j,k}) sum_{(l,m), l <= t_j} alpha[j][l]
                   conj(Y_l^m(x_{j,k})) Y_l^m(x); psi analogous with beta
    masks and the level-(j+1) rule.
    """
    if kind == "phi":
        mask, ps, t = cascade.alpha[j], ladder.rules[j], ladder.degrees[j]
    else:
        tag, s = kind
        if tag != "psi":
            raise ValueError("kind must be 'phi' or ('psi', s)")
        mask, ps, t = cascade.beta[j][s], ladder.rules[j + 1], ladder.degrees[j + 1]
    if not 0 <= k < ps.n:
        raise IndexError("point index out of range")
    yk = analysis_apply(np.ones(1), ps.theta[k:k + 1], ps.phi[k:k + 1],
                        np.ones(1), t)      # conj(Y_l^m(x_k)) over the band
    c = math.sqrt(ps.weights[k]) * _mask_to_coeff(mask, t) * yk
    val = synthesis_apply(c, np.atleast_1d(point.theta), np.atleast_1d(point.phi))
    return complex(val[0])
