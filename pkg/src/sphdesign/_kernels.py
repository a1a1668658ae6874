"""Low-level numba kernels for spherical harmonic sums.

Everything here works on packed real arrays so the hot loops stay
SIMD-friendly.  Two index layouts are used:

* packed nonnegative orders, loop order m outer / ell inner:
  ``q = offset[m] + (ell - m)`` for ``0 <= m <= ell <= t``,
  ``npairs = (t+1)(t+2)/2``.  Kernels that exploit the conjugation
  symmetry of real-coefficient sums use this layout.
* full index set ``I_t``: ``idx = ell*(ell+1) + m`` for ``-ell <= m <= ell``,
  length ``(t+1)**2``.  Synthesis/analysis use this layout.

The normalized associated Legendre functions

    Pt_l^m(cos th) = sqrt((2l+1)/(4pi) * (l-m)!/(l+m)!) * P_l^m(cos th)

are generated by the standard upward three-term recurrence in ell with a
normalized diagonal seed; the raw factorial form overflows near ell ~ 90,
the normalized recurrence is stable into the thousands.  First and second
theta-derivatives ride along through the differentiated recurrences, so no
division by sin(theta) ever happens and the pole limits come out exact.

Reductions accumulate into NCHUNK ordered partial buffers and are summed
in fixed order, so results are bit-identical for any thread count.
"""

import math

import numpy as np
from numba import njit, prange

# 1/sqrt(4*pi)
Y00 = 0.28209479177387814

# fixed partial-buffer count; summation order never depends on threads
NCHUNK = 16

_coeff_cache = {}


def coeff_tables(t):
    """Recurrence coefficient tables for degree budget t (cached).

    Returns (e1, e2, emm, offset):
      emm[m]   diagonal seed factor sqrt((2m+1)/(2m)), emm[0] unused
      e1[q]    sqrt(2m+3) at ell=m+1, else sqrt((2l-1)(2l+1)/((l-m)(l+m)))
      e2[q]    0 at ell=m+1, else sqrt((2l+1)(l-1-m)(l-1+m)/((2l-3)(l-m)(l+m)))
      offset[m] start of the (m, ell) run in the packed layout
    """
    t = int(t)
    if t in _coeff_cache:
        return _coeff_cache[t]
    npairs = (t + 1) * (t + 2) // 2
    e1 = np.zeros(npairs)
    e2 = np.zeros(npairs)
    emm = np.zeros(t + 1)
    offset = np.zeros(t + 2, dtype=np.int64)
    for m in range(t + 1):
        offset[m + 1] = offset[m] + (t - m + 1)
        if m > 0:
            emm[m] = math.sqrt((2.0 * m + 1.0) / (2.0 * m))
        q = offset[m]
        if m + 1 <= t:
            e1[q + 1] = math.sqrt(2.0 * m + 3.0)
        for ell in range(m + 2, t + 1):
            qq = q + (ell - m)
            e1[qq] = math.sqrt((2.0 * ell - 1.0) * (2.0 * ell + 1.0)
                               / ((ell - m) * (ell + m)))
            e2[qq] = math.sqrt((2.0 * ell + 1.0) * (ell - 1.0 - m) * (ell - 1.0 + m)
                               / ((2.0 * ell - 3.0) * (ell - m) * (ell + m)))
    out = (e1, e2, emm, offset[: t + 1].copy())
    _coeff_cache[t] = out
    return out


@njit(cache=True, parallel=True)
def weyl_kernel(theta, phi, wts, t, e1, e2, emm, offset):
    """Weighted sums  sum_i wts[i] * Y_l^m(x_i)  for m >= 0, packed layout."""
    n = theta.shape[0]
    npairs = (t + 1) * (t + 2) // 2
    part_re = np.zeros((NCHUNK, npairs))
    part_im = np.zeros((NCHUNK, npairs))
    for c in prange(NCHUNK):
        i0 = n * c // NCHUNK
        i1 = n * (c + 1) // NCHUNK
        pre = part_re[c]
        pim = part_im[c]
        for i in range(i0, i1):
            w = wts[i]
            z = math.cos(theta[i])
            s = math.sin(theta[i])
            cp = math.cos(phi[i])
            sp = math.sin(phi[i])
            cm = 1.0
            sm = 0.0
            pmm = Y00
            for m in range(t + 1):
                if m > 0:
                    pmm = emm[m] * s * pmm
                    cm_new = cm * cp - sm * sp
                    sm = sm * cp + cm * sp
                    cm = cm_new
                wc = w * cm
                ws = w * sm
                q = offset[m]
                p2 = 0.0
                p1 = pmm
                pre[q] += wc * p1
                pim[q] += ws * p1
                for ell in range(m + 1, t + 1):
                    q += 1
                    p = e1[q] * z * p1 - e2[q] * p2
                    p2 = p1
                    p1 = p
                    pre[q] += wc * p
                    pim[q] += ws * p
    wre = np.zeros(npairs)
    wim = np.zeros(npairs)
    for c in range(NCHUNK):
        for q in range(npairs):
            wre[q] += part_re[c, q]
            wim[q] += part_im[c, q]
    return wre, wim


@njit(cache=True, parallel=True)
def jacvec_kernel(theta, phi, vt, vp, t, e1, e2, emm, offset):
    """Directional Weyl derivative  p_lm = sum_i vt[i] dY/dth + vp[i] dY/dph."""
    n = theta.shape[0]
    npairs = (t + 1) * (t + 2) // 2
    part_re = np.zeros((NCHUNK, npairs))
    part_im = np.zeros((NCHUNK, npairs))
    for c in prange(NCHUNK):
        i0 = n * c // NCHUNK
        i1 = n * (c + 1) // NCHUNK
        pre = part_re[c]
        pim = part_im[c]
        for i in range(i0, i1):
            a = vt[i]
            b = vp[i]
            if a == 0.0 and b == 0.0:
                continue
            z = math.cos(theta[i])
            s = math.sin(theta[i])
            cp = math.cos(phi[i])
            sp = math.sin(phi[i])
            cm = 1.0
            sm = 0.0
            pmm = Y00
            dpmm = 0.0
            for m in range(t + 1):
                if m > 0:
                    f = emm[m]
                    dpmm_new = f * (z * pmm + s * dpmm)
                    pmm = f * s * pmm
                    dpmm = dpmm_new
                    cm_new = cm * cp - sm * sp
                    sm = sm * cp + cm * sp
                    cm = cm_new
                bm = b * m
                q = offset[m]
                p2 = 0.0
                p1 = pmm
                d2 = 0.0
                d1 = dpmm
                pre[q] += a * d1 * cm - bm * p1 * sm
                pim[q] += a * d1 * sm + bm * p1 * cm
                for ell in range(m + 1, t + 1):
                    q += 1
                    p = e1[q] * z * p1 - e2[q] * p2
                    d = e1[q] * (z * d1 - s * p1) - e2[q] * d2
                    p2 = p1
                    p1 = p
                    d2 = d1
                    d1 = d
                    pre[q] += a * d * cm - bm * p * sm
                    pim[q] += a * d * sm + bm * p * cm
    ore = np.zeros(npairs)
    oim = np.zeros(npairs)
    for c in range(NCHUNK):
        for q in range(npairs):
            ore[q] += part_re[c, q]
            oim[q] += part_im[c, q]
    return ore, oim


@njit(cache=True, parallel=True)
def contract_kernel(theta, phi, wre, wim, t, e1, e2, emm, offset):
    """Per-point contraction  sum_{l>=1,m} kap_m Re[conj(W_lm) dY_lm(x_i)].

    Returns (gt, gp): the theta and phi components for every point.  With
    W = Weyl sums this is the gradient core; with W = jacvec output it is
    the Gauss-Newton Hessian-vector adjoint pass.
    """
    n = theta.shape[0]
    gt = np.zeros(n)
    gp = np.zeros(n)
    for i in prange(n):
        z = math.cos(theta[i])
        s = math.sin(theta[i])
        cp = math.cos(phi[i])
        sp = math.sin(phi[i])
        cm = 1.0
        sm = 0.0
        pmm = Y00
        dpmm = 0.0
        acc_t = 0.0
        acc_p = 0.0
        for m in range(t + 1):
            if m > 0:
                f = emm[m]
                dpmm_new = f * (z * pmm + s * dpmm)
                pmm = f * s * pmm
                dpmm = dpmm_new
                cm_new = cm * cp - sm * sp
                sm = sm * cp + cm * sp
                cm = cm_new
            kap = 2.0 if m > 0 else 1.0
            q = offset[m]
            p2 = 0.0
            p1 = pmm
            d2 = 0.0
            d1 = dpmm
            if m > 0:
                # ell = m term (skipped entirely for m = 0: that is ell = 0)
                wc = wre[q] * cm + wim[q] * sm
                wsx = wim[q] * cm - wre[q] * sm
                acc_t += kap * d1 * wc
                acc_p += kap * m * p1 * wsx
            for ell in range(m + 1, t + 1):
                q += 1
                p = e1[q] * z * p1 - e2[q] * p2
                d = e1[q] * (z * d1 - s * p1) - e2[q] * d2
                p2 = p1
                p1 = p
                d2 = d1
                d1 = d
                wc = wre[q] * cm + wim[q] * sm
                wsx = wim[q] * cm - wre[q] * sm
                acc_t += kap * d * wc
                acc_p += kap * m * p * wsx
        gt[i] = acc_t
        gp[i] = acc_p
    return gt, gp


@njit(cache=True, parallel=True)
def h1_blocks_kernel(theta, phi, wre, wim, t, e1, e2, emm, offset):
    """Per-point 2x2 blocks  sum_{l>=1,m} kap_m Re[conj(W) d2Y]  (tt, tp, pp)."""
    n = theta.shape[0]
    stt = np.zeros(n)
    stp = np.zeros(n)
    spp = np.zeros(n)
    for i in prange(n):
        z = math.cos(theta[i])
        s = math.sin(theta[i])
        cp = math.cos(phi[i])
        sp = math.sin(phi[i])
        cm = 1.0
        sm = 0.0
        pmm = Y00
        dpmm = 0.0
        d2pmm = 0.0
        a_tt = 0.0
        a_tp = 0.0
        a_pp = 0.0
        for m in range(t + 1):
            if m > 0:
                f = emm[m]
                d2_new = f * (2.0 * z * dpmm + s * d2pmm - s * pmm)
                d1_new = f * (z * pmm + s * dpmm)
                pmm = f * s * pmm
                dpmm = d1_new
                d2pmm = d2_new
                cm_new = cm * cp - sm * sp
                sm = sm * cp + cm * sp
                cm = cm_new
            kap = 2.0 if m > 0 else 1.0
            q = offset[m]
            p2 = 0.0
            p1 = pmm
            dq2 = 0.0
            dq1 = dpmm
            h2 = 0.0
            h1 = d2pmm
            if m > 0:
                wc = wre[q] * cm + wim[q] * sm
                wsx = wim[q] * cm - wre[q] * sm
                a_tt += kap * h1 * wc
                a_tp += kap * m * dq1 * wsx
                a_pp -= kap * m * m * p1 * wc
            for ell in range(m + 1, t + 1):
                q += 1
                p = e1[q] * z * p1 - e2[q] * p2
                d = e1[q] * (z * dq1 - s * p1) - e2[q] * dq2
                h = e1[q] * (z * h1 - 2.0 * s * dq1 - z * p1) - e2[q] * h2
                p2 = p1
                p1 = p
                dq2 = dq1
                dq1 = d
                h2 = h1
                h1 = h
                wc = wre[q] * cm + wim[q] * sm
                wsx = wim[q] * cm - wre[q] * sm
                a_tt += kap * h * wc
                a_tp += kap * m * d * wsx
                a_pp -= kap * m * m * p * wc
        stt[i] = a_tt
        stp[i] = a_tp
        spp[i] = a_pp
    return stt, stp, spp


@njit(cache=True, parallel=True)
def synthesis_kernel(theta, phi, cre, cim, t, e1, e2, emm, offset):
    """f(x_i) = sum_{(l,m) in I_t} c_lm Y_lm(x_i); coeffs in l*(l+1)+m layout."""
    n = theta.shape[0]
    out_re = np.zeros(n)
    out_im = np.zeros(n)
    for i in prange(n):
        z = math.cos(theta[i])
        s = math.sin(theta[i])
        cp = math.cos(phi[i])
        sp = math.sin(phi[i])
        cm = 1.0
        sm = 0.0
        pmm = Y00
        fre = 0.0
        fim = 0.0
        sgn = 1.0           # (-1)^m after the per-m flip: Y_{l,-m} = (-1)^m conj(Y_{l,m})
        for m in range(t + 1):
            if m > 0:
                pmm = emm[m] * s * pmm
                cm_new = cm * cp - sm * sp
                sm = sm * cp + cm * sp
                cm = cm_new
                sgn = -sgn
            p2 = 0.0
            p1 = pmm
            for ell in range(m, t + 1):
                if ell > m:
                    q = offset[m] + (ell - m)
                    p = e1[q] * z * p1 - e2[q] * p2
                    p2 = p1
                    p1 = p
                base = ell * (ell + 1)
                are = cre[base + m]
                aim = cim[base + m]
                if m == 0:
                    fre += p1 * are
                    fim += p1 * aim
                else:
                    bre = sgn * cre[base - m]
                    bim = sgn * cim[base - m]
                    fre += p1 * ((are + bre) * cm + (bim - aim) * sm)
                    fim += p1 * ((aim + bim) * cm + (are - bre) * sm)
        out_re[i] = fre
        out_im[i] = fim
    return out_re, out_im


@njit(cache=True, parallel=True)
def analysis_kernel(theta, phi, wvre, wvim, t, e1, e2, emm, offset):
    """c_lm = sum_i (w v)_i conj(Y_lm(x_i)) over the full index set I_t."""
    n = theta.shape[0]
    ncoef = (t + 1) * (t + 1)
    part_re = np.zeros((NCHUNK, ncoef))
    part_im = np.zeros((NCHUNK, ncoef))
    for c in prange(NCHUNK):
        i0 = n * c // NCHUNK
        i1 = n * (c + 1) // NCHUNK
        pre = part_re[c]
        pim = part_im[c]
        for i in range(i0, i1):
            vre = wvre[i]
            vim = wvim[i]
            z = math.cos(theta[i])
            s = math.sin(theta[i])
            cp = math.cos(phi[i])
            sp = math.sin(phi[i])
            cm = 1.0
            sm = 0.0
            pmm = Y00
            sgn = 1.0       # (-1)^m after the per-m flip, matching synthesis
            for m in range(t + 1):
                if m > 0:
                    pmm = emm[m] * s * pmm
                    cm_new = cm * cp - sm * sp
                    sm = sm * cp + cm * sp
                    cm = cm_new
                    sgn = -sgn
                # conj(Y_{l,m})  = Pt (cm - i sm)
                # conj(Y_{l,-m}) = sgn * Pt (cm + i sm)
                re_p = vre * cm + vim * sm
                im_p = vim * cm - vre * sm
                re_n = sgn * (vre * cm - vim * sm)
                im_n = sgn * (vim * cm + vre * sm)
                p2 = 0.0
                p1 = pmm
                for ell in range(m, t + 1):
                    if ell > m:
                        q = offset[m] + (ell - m)
                        p = e1[q] * z * p1 - e2[q] * p2
                        p2 = p1
                        p1 = p
                    base = ell * (ell + 1)
                    pre[base + m] += p1 * re_p
                    pim[base + m] += p1 * im_p
                    if m > 0:
                        pre[base - m] += p1 * re_n
                        pim[base - m] += p1 * im_n
    cre = np.zeros(ncoef)
    cim = np.zeros(ncoef)
    for c in range(NCHUNK):
        for q in range(ncoef):
            cre[q] += part_re[c, q]
            cim[q] += part_im[c, q]
    return cre, cim


@njit(cache=True, parallel=True)
def sq_diag_kernel(theta, t, e1, e2, emm, offset):
    """Per-point sums  sum_{l>=1,m} kap_m (dPt)^2  and  kap_m (m Pt)^2.

    These are the diagonal entries of the Gauss-Newton term (the phase
    factors have unit modulus and the theta/phi cross term is purely
    imaginary, so the 2x2 point blocks of J^H J are diagonal).
    """
    n = theta.shape[0]
    dtt = np.zeros(n)
    dpp = np.zeros(n)
    for i in prange(n):
        z = math.cos(theta[i])
        s = math.sin(theta[i])
        pmm = Y00
        dpmm = 0.0
        a_t = 0.0
        a_p = 0.0
        for m in range(t + 1):
            if m > 0:
                f = emm[m]
                dpmm_new = f * (z * pmm + s * dpmm)
                pmm = f * s * pmm
                dpmm = dpmm_new
            kap = 2.0 if m > 0 else 1.0
            q = offset[m]
            p2 = 0.0
            p1 = pmm
            d2 = 0.0
            d1 = dpmm
            if m > 0:
                a_t += kap * d1 * d1
                a_p += kap * (m * p1) * (m * p1)
            for ell in range(m + 1, t + 1):
                q += 1
                p = e1[q] * z * p1 - e2[q] * p2
                d = e1[q] * (z * d1 - s * p1) - e2[q] * d2
                p2 = p1
                p1 = p
                d2 = d1
                d1 = d
                a_t += kap * d * d
                a_p += kap * (m * p) * (m * p)
        dtt[i] = a_t
        dpp[i] = a_p
    return dtt, dpp


@njit(cache=True)
def point_tables(theta, t, e1, e2, emm, offset):
    """Pt, dPt/dth, d2Pt/dth2 for a single colatitude, packed m >= 0 layout."""
    npairs = (t + 1) * (t + 2) // 2
    P = np.zeros(npairs)
    D = np.zeros(npairs)
    H = np.zeros(npairs)
    z = math.cos(theta)
    s = math.sin(theta)
    pmm = Y00
    dpmm = 0.0
    d2pmm = 0.0
    for m in range(t + 1):
        if m > 0:
            f = emm[m]
            d2_new = f * (2.0 * z * dpmm + s * d2pmm - s * pmm)
            d1_new = f * (z * pmm + s * dpmm)
            pmm = f * s * pmm
            dpmm = d1_new
            d2pmm = d2_new
        q = offset[m]
        P[q] = pmm
        D[q] = dpmm
        H[q] = d2pmm
        p2 = 0.0
        p1 = pmm
        d2 = 0.0
        d1 = dpmm
        h2 = 0.0
        h1 = d2pmm
        for ell in range(m + 1, t + 1):
            q += 1
            p = e1[q] * z * p1 - e2[q] * p2
            d = e1[q] * (z * d1 - s * p1) - e2[q] * d2
            h = e1[q] * (z * h1 - 2.0 * s * d1 - z * p1) - e2[q] * h2
            p2 = p1
            p1 = p
            d2 = d1
            d1 = d
            h2 = h1
            h1 = h
            P[q] = p
            D[q] = d
            H[q] = h
    return P, D, H
