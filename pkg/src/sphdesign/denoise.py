"""Cap-based thresholding of framelet coefficients and the full denoising
pipeline F_thr = f_thr + g_thr.

A noisy signal is split by least-squares projection into a band-limited
part f (degree <= the ladder's frame degree) and a residual g.  f is taken
apart by the framelet transform; its coefficients are normalized by the
atom norms, thresholded, denormalized, and reassembled; g is thresholded
directly in sample space; the sum is the denoised signal.

Noise scales per domain.  With i.i.d. sample noise of standard deviation
sigma on an equal-weight rule of N points, each projected harmonic
coefficient carries noise of variance sigma^2 * 4pi/N, and dividing a
framelet coefficient by its atom's L2 norm makes that per-coefficient
deviation uniform across all blocks.  The pipeline therefore thresholds
normalized coefficients at the equalized scale sigma*sqrt(4pi/N) while
the residual, which lives in sample space, keeps sigma as given.

Four rules, global/local x hard/soft:
  GH  zero below tau = c * sigma, keep otherwise
  GS  zero below tau, shrink kept entries by sigma toward zero
  LH  per-point tau_k = c sigma^2 / sigma_k with sigma_k^2 = max(cap
      average of |coef|^2 - sigma^2, 0); zero cap -> infinite tau
  LS  like LH but shrink kept entries by tau_k

`sigma` is the absolute noise standard deviation (relative level times
max|f|), passed explicitly.  Caps use the cross-product magnitude
||x cross y|| = |sin(angle)|, exactly as stated, so a cap around x also
admits points near the antipode of x.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .approximation import SphericalSignal, project_cg
from .framelets import atom_energies, build_masks, decompose, reconstruct
from .harmonics import synthesis_apply

THRESHOLD_KINDS = ("GH", "GS", "LH", "LS")


@dataclass
class CapNeighborhood:
    """Per-center member index lists under the cross-product metric."""
    mode: str                    # "rnn" | "knn"
    param: float                 # radius r or count k
    indices: list

    @property
    def n(self):
        return len(self.indices)


def _as_xyz(points):
    if hasattr(points, "xyz"):
        return points.xyz
    return np.asarray(points, dtype=float)


def cap_indices(points, mode="knn", k=12, r=None):
    """Cap membership per center: ||x cross y|| <= r, or the k nearest.

    Every center's own index is in its list (self cross product is zero).
    Brute-force over point pairs, blocked to bound memory.
    """
    xyz = _as_xyz(points)
    n = xyz.shape[0]
    if mode == "knn":
        k = int(k)
        if not 1 <= k <= n:
            raise ValueError("knn count must be in 1..N")
    elif mode == "rnn":
        if r is None or not 0.0 < r <= 1.0:
            raise ValueError("rnn radius must lie in (0, 1]")
    else:
        raise ValueError("mode must be 'knn' or 'rnn'")

    indices = []
    block = max(1, min(n, 2_000_000 // max(n, 1)))
    for lo in range(0, n, block):
        dots = xyz[lo:lo + block] @ xyz.T
        cross2 = np.maximum(1.0 - dots * dots, 0.0)   # ||x cross y||^2
        if mode == "rnn":
            for row in cross2:
                indices.append(np.flatnonzero(row <= r * r + 1e-15))
        else:
            for i, row in enumerate(cross2):
                row[lo + i] = -1.0                    # pin the center itself
                sel = np.argpartition(row, k - 1)[:k]
                indices.append(np.sort(sel))
    return CapNeighborhood(mode, float(r) if mode == "rnn" else k, indices)


@dataclass
class ThresholdRule:
    kind: str
    sigma: float                 # absolute noise standard deviation
    c: float = None              # coefficient threshold constant
    c1: float = 3.0              # residual threshold constant
    cap_mode: str = "knn"        # local kinds build caps with these
    cap_k: int = 12
    cap_r: float = None
    threshold_lowpass: bool = True

    def __post_init__(self):
        if self.kind not in THRESHOLD_KINDS:
            raise ValueError(f"kind must be one of {THRESHOLD_KINDS}")
        if self.c is None:
            # defaults: c=2.5 for the hard rules, c=1 for the soft ones
            self.c = 2.5 if self.kind in ("GH", "LH") else 1.0
        if self.c <= 0.0 or self.c1 <= 0.0:
            raise ValueError("threshold constants must be positive")
        if self.sigma < 0.0:
            raise ValueError("sigma must be nonnegative")

    @property
    def is_local(self):
        return self.kind in ("LH", "LS")

    @property
    def is_soft(self):
        return self.kind in ("GS", "LS")

    def build_cap(self, points):
        return cap_indices(points, self.cap_mode, k=self.cap_k, r=self.cap_r)


def _unit_phase(x):
    a = np.abs(x)
    with np.errstate(invalid="ignore", divide="ignore"):
        u = np.where(a > 0.0, x / np.where(a > 0.0, a, 1.0), 0.0)
    return u


def _apply_global(x, tau, sigma, soft):
    keep = np.abs(x) >= tau
    if soft:
        return np.where(keep, x - _unit_phase(x) * sigma, 0.0)
    return np.where(keep, x, 0.0)


def _cap_average(sq, cap):
    out = np.empty(len(cap.indices))
    for i, idx in enumerate(cap.indices):
        out[i] = sq[idx].mean()
    return out


def _apply_local(x, cap, sigma, c, soft):
    bar = _cap_average(np.abs(x) ** 2, cap)
    sig_loc = np.sqrt(np.maximum(bar - sigma * sigma, 0.0))
    with np.errstate(divide="ignore"):
        tau = np.where(sig_loc > 0.0, c * sigma * sigma / sig_loc, np.inf)
    keep = np.abs(x) >= tau
    if soft:
        shrink = np.where(np.isfinite(tau), tau, 0.0)   # inf tau never kept
        return np.where(keep, x - _unit_phase(x) * shrink, 0.0)
    return np.where(keep, x, 0.0)


# ---------------------------------------------------------------------------
# coefficient-domain operations

def normalize_coeffs(coeffs, energies):
    """Divide each block by its atom L2 norms (sqrt of the energy arrays)."""
    low, high = energies
    if np.any(low <= 0.0) or any(np.any(e <= 0.0) for lv in high for e in lv):
        raise ValueError("atom energies must be positive")
    from .framelets import FrameletCoefficients
    v = coeffs.v / np.sqrt(low)
    w = [[arr / np.sqrt(e) for arr, e in zip(level, elevel)]
         for level, elevel in zip(coeffs.w, high)]
    return FrameletCoefficients(v, w)


def denormalize_coeffs(coeffs, energies):
    low, high = energies
    from .framelets import FrameletCoefficients
    v = coeffs.v * np.sqrt(low)
    w = [[arr * np.sqrt(e) for arr, e in zip(level, elevel)]
         for level, elevel in zip(coeffs.w, high)]
    return FrameletCoefficients(v, w)


def threshold_global(coeffs, rule):
    """GH/GS on normalized coefficients with tau = c * sigma."""
    if rule.kind not in ("GH", "GS"):
        raise ValueError("threshold_global handles GH and GS only")
    from .framelets import FrameletCoefficients
    tau = rule.c * rule.sigma
    soft = rule.is_soft
    v = (_apply_global(coeffs.v, tau, rule.sigma, soft)
         if rule.threshold_lowpass else coeffs.v.copy())
    w = [[_apply_global(arr, tau, rule.sigma, soft) for arr in level]
         for level in coeffs.w]
    return FrameletCoefficients(v, w)


def threshold_local(coeffs, rule, caps):
    """LH/LS with per-center cap statistics.

    `caps` holds one CapNeighborhood per ladder rule, coarse to fine: the
    low-pass block averages over caps[0], the level-j high-pass blocks over
    caps[j+1].
    """
    if rule.kind not in ("LH", "LS"):
        raise ValueError("threshold_local handles LH and LS only")
    from .framelets import FrameletCoefficients
    soft = rule.is_soft
    v = (_apply_local(coeffs.v, caps[0], rule.sigma, rule.c, soft)
         if rule.threshold_lowpass else coeffs.v.copy())
    w = []
    for j, level in enumerate(coeffs.w):
        cap = caps[j + 1]
        w.append([_apply_local(arr, cap, rule.sigma, rule.c, soft)
                  for arr in level])
    return FrameletCoefficients(v, w)


def threshold_residual(values, rule, cap=None):
    """The same four rules applied to residual samples with constant c1."""
    values = np.asarray(values)
    if rule.is_local:
        if cap is None:
            raise ValueError("local residual thresholding needs a cap")
        return _apply_local(values, cap, rule.sigma, rule.c1, rule.is_soft)
    tau1 = rule.c1 * rule.sigma
    return _apply_global(values, tau1, rule.sigma, rule.is_soft)


# ---------------------------------------------------------------------------

def snr(truth, estimate):
    """10 log10(||truth|| / ||truth - estimate||), weighted discrete norms."""
    tv = truth.values if isinstance(truth, SphericalSignal) else np.asarray(truth)
    ev = (estimate.values if isinstance(estimate, SphericalSignal)
          else np.asarray(estimate))
    w = truth.pointset.weights if isinstance(truth, SphericalSignal) else 1.0
    tn = math.sqrt(float(np.sum(w * np.abs(tv) ** 2)))
    en = math.sqrt(float(np.sum(w * np.abs(tv - ev) ** 2)))
    if tn == 0.0:
        raise ValueError("truth signal has zero norm")
    if en == 0.0:
        return math.inf
    return 10.0 * math.log10(tn / en)


@dataclass
class DenoiseReport:
    snr_in: float
    snr_out: float
    retained: dict               # block label -> fraction of surviving entries
    config: dict = field(default_factory=dict)


def _retained_fraction(before, after):
    nz = np.abs(before) > 0.0
    total = int(np.count_nonzero(nz))
    if total == 0:
        return 1.0
    return float(np.count_nonzero(np.abs(after)[nz] > 0.0)) / total


def denoise_pipeline(noisy, ladder, bank, rule, T=None, truth=None,
                     k_max=1000, eps=None):
    """Project, decompose, threshold, reconstruct: F_thr = f_thr + g_thr.

    `noisy` should be sampled on the finest ladder rule so the projection
    quadrature is exact.  `truth` (if given) is only used for the SNR
    figures in the report.
    """
    T = ladder.frame_degree if T is None else int(T)
    if T > ladder.frame_degree:
        raise ValueError("projection degree exceeds the frame space")
    proj = project_cg(noisy, T, k_max=k_max, eps=eps)
    f_coeffs = np.zeros((ladder.frame_degree + 1) ** 2, dtype=np.complex128)
    f_coeffs[:proj.coefficients.size] = proj.coefficients
    g = proj.residual

    cascade = build_masks(bank, ladder)
    energies = atom_energies(cascade, ladder)
    raw = decompose(f_coeffs, cascade, ladder)
    normed = normalize_coeffs(raw, energies)
    # noise per normalized coefficient on an equal-weight N-point rule
    sigma_c = rule.sigma * math.sqrt(4.0 * math.pi / noisy.n)
    crule = replace(rule, sigma=sigma_c)
    if rule.is_local:
        caps = [rule.build_cap(ps) for ps in ladder.rules]
        done = threshold_local(normed, crule, caps)
        g_cap = rule.build_cap(noisy.pointset)
    else:
        done = threshold_global(normed, crule)
        g_cap = None
    f_thr_coeffs = reconstruct(denormalize_coeffs(done, energies),
                               cascade, ladder)
    ps = noisy.pointset
    f_thr = synthesis_apply(f_thr_coeffs, ps.theta, ps.phi)
    if not np.iscomplexobj(noisy.values):
        f_thr = f_thr.real
    g_thr = threshold_residual(g.values, rule, g_cap)
    out = SphericalSignal(f_thr + g_thr, ps)

    retained = {"v": _retained_fraction(normed.v, done.v),
                "g": _retained_fraction(g.values, g_thr)}
    for j, (lv_in, lv_out) in enumerate(zip(normed.w, done.w)):
        for s, (before, after) in enumerate(zip(lv_in, lv_out)):
            retained[f"w[{j}][{s}]"] = _retained_fraction(before, after)
    report = DenoiseReport(
        snr_in=snr(truth, noisy) if truth is not None else math.nan,
        snr_out=snr(truth, out) if truth is not None else math.nan,
        retained=retained,
        config={"kind": rule.kind, "c": rule.c, "c1": rule.c1,
                "sigma": rule.sigma, "sigma_coeff": sigma_c,
                "T": T, "bank": bank.name,
                "degrees": list(ladder.degrees),
                "cap": (rule.cap_mode, rule.cap_k if rule.cap_mode == "knn"
                        else rule.cap_r) if rule.is_local else None})
    return out, report
