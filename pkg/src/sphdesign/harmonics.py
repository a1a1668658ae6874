"""Complex spherical harmonics on S^2: point evaluation, synthesis, analysis.

Conventions
-----------
Y_l^m(theta, phi) = sqrt((2l+1)/(4pi) * (l-m)!/(l+m)!) * P_l^m(cos theta) * exp(i m phi)

for m >= 0, where P_l^m(z) = (1-z^2)^{m/2} d^m/dz^m P_l(z) (no (-1)^m factor;
P_1^1(0.5) = +sqrt(0.75)).  Negative orders are defined by the conjugation
identity Y_l^{-m} = (-1)^m conj(Y_l^m).  Coefficient vectors over the index
set I_t = {(l,m): 0 <= l <= t, |m| <= l} are flat complex arrays of length
(t+1)^2 in the order idx = l*(l+1) + m.

theta is the colatitude in [0, pi], phi the longitude.  All bulk operations
are matrix-free with direct O(N t^2) evaluation.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as _k

# refuse to materialize Gram/design matrices beyond this many complex entries
DENSE_MATRIX_MAX_ENTRIES = 20_000_000


@dataclass(frozen=True)
class SphericalPoint:
    """A point on S^2 in spherical coordinates: 0 <= theta <= pi."""
    theta: float
    phi: float


@dataclass(frozen=True)
class HarmonicSample:
    """Value and first/second angular derivatives of one Y_l^m at one point."""
    value: complex
    d_theta: complex
    d_phi: complex
    d2_theta: complex
    d2_phi: complex
    d2_theta_phi: complex


def n_coeffs(t):
    return (t + 1) * (t + 1)


def coeff_index(ell, m):
    """Flat index of (l, m) in the I_t coefficient layout."""
    if abs(m) > ell:
        raise ValueError("|m| must not exceed ell")
    return ell * (ell + 1) + m


def index_degrees(t):
    """Array deg[idx] = l for every flat coefficient index in I_t."""
    deg = np.empty(n_coeffs(t), dtype=np.int64)
    for ell in range(t + 1):
        deg[ell * ell: (ell + 1) * (ell + 1)] = ell
    return deg


def sph_to_cart(theta, phi):
    """Unit vectors (..., 3) from colatitude/longitude arrays or scalars."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


def cart_to_sph(xyz):
    """Inverse of sph_to_cart for unit vectors; phi returned in [0, 2pi)."""
    xyz = np.asarray(xyz, dtype=float)
    theta = np.arccos(np.clip(xyz[..., 2], -1.0, 1.0))
    phi = np.mod(np.arctan2(xyz[..., 1], xyz[..., 0]), 2.0 * np.pi)
    return theta, phi


def assoc_legendre(ell, m, z):
    """Associated Legendre P_l^m(z) = (1-z^2)^{m/2} d^m/dz^m P_l(z).

    Evaluated through the normalized recurrence and rescaled, so it stays
    accurate for large ell as long as the raw value itself is representable.
    Negative m uses P_l^{-m} = (-1)^m (l-m)!/(l+m)! P_l^m.
    """
    ell = int(ell)
    mm = int(m)
    if abs(mm) > ell:
        raise ValueError("|m| must not exceed ell")
    sign = 1.0
    if mm < 0:
        mm = -mm
        sign = (-1.0) ** mm * math.exp(math.lgamma(ell - mm + 1) - math.lgamma(ell + mm + 1))
    z = np.asarray(z, dtype=float)
    if np.any(np.abs(z) > 1.0):
        raise ValueError("z must lie in [-1, 1]")
    s = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    # normalized diagonal seed, then upward in ell
    pmm = np.full_like(z, _k.Y00)
    for k in range(1, mm + 1):
        pmm = math.sqrt((2.0 * k + 1.0) / (2.0 * k)) * s * pmm
    p1 = pmm
    p2 = np.zeros_like(z)
    for ll in range(mm + 1, ell + 1):
        if ll == mm + 1:
            p = math.sqrt(2.0 * mm + 3.0) * z * p1
        else:
            c1 = math.sqrt((2.0 * ll - 1.0) * (2.0 * ll + 1.0) / ((ll - mm) * (ll + mm)))
            c2 = math.sqrt((2.0 * ll + 1.0) * (ll - 1.0 - mm) * (ll - 1.0 + mm)
                           / ((2.0 * ll - 3.0) * (ll - mm) * (ll + mm)))
            p = c1 * z * p1 - c2 * p2
        p2, p1 = p1, p
    # undo the sqrt((2l+1)/(4pi) (l-m)!/(l+m)!) normalization
    lognorm = 0.5 * (math.log((2.0 * ell + 1.0) / (4.0 * math.pi))
                     + math.lgamma(ell - mm + 1) - math.lgamma(ell + mm + 1))
    out = sign * p1 * math.exp(-lognorm)
    return out if out.ndim else float(out)


def sph_harm(ell, m, theta, phi):
    """One Y_l^m with all first and second angular derivatives at one point."""
    ell = int(ell)
    m = int(m)
    if abs(m) > ell:
        raise ValueError("|m| must not exceed ell")
    am = abs(m)
    tabs = _k.coeff_tables(ell)
    P, D, H = _k.point_tables(float(theta), ell, *tabs)
    q = tabs[3][am] + (ell - am)
    e = np.exp(1j * am * phi)
    val = P[q] * e
    dth = D[q] * e
    d2t = H[q] * e
    dph = 1j * am * val
    d2p = -(am * am) * val
    dtp = 1j * am * dth
    if m < 0:
        sgn = (-1.0) ** am
        val, dth, d2t = sgn * val.conjugate(), sgn * dth.conjugate(), sgn * d2t.conjugate()
        dph, d2p, dtp = sgn * dph.conjugate(), sgn * d2p.conjugate(), sgn * dtp.conjugate()
    return HarmonicSample(val, dth, dph, d2t, d2p, dtp)


def _as_angle_arrays(theta, phi):
    theta = np.ascontiguousarray(theta, dtype=np.float64)
    phi = np.ascontiguousarray(phi, dtype=np.float64)
    if theta.shape != phi.shape or theta.ndim != 1:
        raise ValueError("theta and phi must be 1-d arrays of equal length")
    return theta, phi


def synthesis_apply(coeffs, theta, phi):
    """values[i] = sum_{(l,m) in I_t} coeffs[lm] Y_l^m(x_i), matrix-free."""
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    t = int(round(math.sqrt(coeffs.size))) - 1
    if n_coeffs(t) != coeffs.size:
        raise ValueError("coefficient vector length must be a perfect square")
    theta, phi = _as_angle_arrays(theta, phi)
    re, im = _k.synthesis_kernel(theta, phi, np.ascontiguousarray(coeffs.real),
                                 np.ascontiguousarray(coeffs.imag), t, *_k.coeff_tables(t))
    return re + 1j * im


def analysis_apply(values, theta, phi, weights, t):
    """coeffs[lm] = sum_i weights[i] values[i] conj(Y_l^m(x_i)) over I_t."""
    theta, phi = _as_angle_arrays(theta, phi)
    wv = np.asarray(weights, dtype=float) * np.asarray(values, dtype=np.complex128)
    re, im = _k.analysis_kernel(theta, phi, np.ascontiguousarray(wv.real),
                                np.ascontiguousarray(wv.imag), int(t), *_k.coeff_tables(int(t)))
    return re + 1j * im


def harmonic_matrix(theta, phi, t):
    """Dense N x (t+1)^2 matrix Y[i, lm]; guarded by DENSE_MATRIX_MAX_ENTRIES."""
    theta, phi = _as_angle_arrays(theta, phi)
    nc = n_coeffs(t)
    if theta.size * nc > DENSE_MATRIX_MAX_ENTRIES:
        raise ValueError("requested dense harmonic matrix exceeds the size threshold; "
                         "use synthesis_apply/analysis_apply instead")
    Y = np.empty((theta.size, nc), dtype=np.complex128)
    eye = np.eye(nc)
    for idx in range(nc):
        Y[:, idx] = synthesis_apply(eye[idx], theta, phi)
    return Y
