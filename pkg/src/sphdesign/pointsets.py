"""Point-set generators, quadrature containers, gauge fixing, and file I/O.

A QuadraturePointSet is N points with positive weights summing to 4pi.  When
``declared_degree`` is set the rule claims polynomial exactness up to that
degree, certified by the weighted Weyl-sum check in ``objective.certify``
(the achieved bound is stored in ``certified_tol``).

Generators:
  spiral_points       "SP": generalized spiral, theta_n = arccos((2n-N-1)/N),
                      phi_n = (2n-N-1) * pi / golden ratio
  uniform_random_points  "UD": i.i.d. area-uniform points (PCG64, seeded)
  icosahedral_points  "IV": icosahedron vertices + L rounds of edge-midpoint
                      subdivision projected to the sphere, N = 10*4^L + 2
  gauss_legendre_grid tensor Gauss-Legendre x equispaced-phi rule, exact to
                      the requested degree by construction (non-equal weights)
"""

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .harmonics import cart_to_sph, sph_to_cart

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0
FOUR_PI = 4.0 * math.pi


@dataclass
class QuadraturePointSet:
    theta: np.ndarray
    phi: np.ndarray
    weights: np.ndarray
    declared_degree: int | None = None
    certified_tol: float | None = None
    generator: str = "unknown"
    seed: int | None = None

    def __post_init__(self):
        self.theta = np.ascontiguousarray(self.theta, dtype=np.float64)
        self.phi = np.ascontiguousarray(self.phi, dtype=np.float64)
        self.weights = np.ascontiguousarray(self.weights, dtype=np.float64)
        if not (self.theta.shape == self.phi.shape == self.weights.shape):
            raise ValueError("theta, phi, weights must have identical shapes")
        if self.theta.min(initial=0.0) < 0.0 or self.theta.max(initial=0.0) > math.pi:
            raise ValueError("theta outside [0, pi]")
        if np.any(self.weights <= 0.0):
            raise ValueError("weights must be positive")

    @property
    def n(self):
        return self.theta.size

    @property
    def xyz(self):
        return sph_to_cart(self.theta, self.phi)

    def validate_weight_sum(self, tol=1e-10):
        err = abs(self.weights.sum() - FOUR_PI)
        if err > tol:
            raise ValueError(f"weights sum to 4pi + {err:.3e}, beyond {tol:.1e}")
        return err


def equal_weights(n):
    return np.full(n, FOUR_PI / n)


def spiral_points(n):
    """Generalized spiral point set SP(n)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    k = 2.0 * np.arange(1, n + 1) - (n + 1)
    theta = np.arccos(np.clip(k / n, -1.0, 1.0))
    phi = np.mod(k * (np.pi / GOLDEN), 2.0 * np.pi)
    return QuadraturePointSet(theta, phi, equal_weights(n), generator="spiral")


def uniform_random_points(n, seed):
    """i.i.d. area-uniform random points UD(n); PCG64 stream from `seed`."""
    rng = np.random.Generator(np.random.PCG64(seed))
    theta = np.arccos(1.0 - 2.0 * rng.random(n))
    phi = 2.0 * np.pi * rng.random(n)
    return QuadraturePointSet(theta, phi, equal_weights(n),
                              generator="uniform", seed=seed)


def _icosahedron():
    # vertices of the regular icosahedron on the unit sphere
    p = GOLDEN
    verts = []
    for a in (-1.0, 1.0):
        for b in (-p, p):
            verts += [(0.0, a, b), (a, b, 0.0), (b, 0.0, a)]
    v = np.array(verts) / math.sqrt(1.0 + p * p)
    faces = []
    # faces = all vertex triples that are mutually nearest neighbors
    d2 = ((v[:, None, :] - v[None, :, :]) ** 2).sum(-1)
    edge2 = np.sort(np.unique(np.round(d2, 9)))[1]
    adj = (np.abs(d2 - edge2) < 1e-9)
    nv = len(v)
    for i in range(nv):
        for j in range(i + 1, nv):
            if not adj[i, j]:
                continue
            for k in range(j + 1, nv):
                if adj[i, k] and adj[j, k]:
                    faces.append((i, j, k))
    return v, faces


def icosahedral_points(level):
    """Icosahedral vertex set IV(level): N = 10 * 4**level + 2."""
    if level < 0:
        raise ValueError("level must be >= 0")
    v, faces = _icosahedron()
    verts = [tuple(x) for x in v]
    index = {x: i for i, x in enumerate(verts)}
    for _ in range(level):
        edge_mid = {}

        def midpoint(i, j):
            key = (min(i, j), max(i, j))
            if key in edge_mid:
                return edge_mid[key]
            m = np.array(verts[i]) + np.array(verts[j])
            m /= np.linalg.norm(m)
            tm = tuple(m)
            if tm not in index:
                index[tm] = len(verts)
                verts.append(tm)
            edge_mid[key] = index[tm]
            return edge_mid[key]

        new_faces = []
        for (i, j, k) in faces:
            a, b, c = midpoint(i, j), midpoint(j, k), midpoint(k, i)
            new_faces += [(i, a, c), (a, j, b), (c, b, k), (a, b, c)]
        faces = new_faces
    xyz = np.array(verts)
    theta, phi = cart_to_sph(xyz)
    n = len(verts)
    assert n == 10 * 4 ** level + 2
    return QuadraturePointSet(theta, phi, equal_weights(n), generator="icosahedral")


def gauss_legendre_grid(degree):
    """Tensor rule exact for all spherical polynomials of degree <= `degree`.

    ceil((degree+1)/2) Gauss-Legendre colatitudes x (degree+1) equispaced
    longitudes; serves as the independent quadrature oracle in tests.
    """
    g = (degree + 2) // 2
    m = degree + 1
    zg, wg = np.polynomial.legendre.leggauss(g)
    theta = np.repeat(np.arccos(zg), m)
    phi = np.tile(2.0 * np.pi * np.arange(m) / m, g)
    w = np.repeat(wg, m) * (2.0 * np.pi / m)
    return QuadraturePointSet(theta, phi, w, declared_degree=degree, generator="gl")


def separation_distance(ps):
    """Minimum pairwise Euclidean (chord) distance of the point set."""
    xyz = ps.xyz if isinstance(ps, QuadraturePointSet) else np.asarray(ps)
    n = len(xyz)
    if n < 2:
        return float("inf")
    if n <= 4096:
        d2 = ((xyz[:, None, :] - xyz[None, :, :]) ** 2).sum(-1)
        d2[np.arange(n), np.arange(n)] = np.inf
        return float(np.sqrt(d2.min()))
    from scipy.spatial import cKDTree
    d, _ = cKDTree(xyz).query(xyz, k=2)
    return float(d[:, 1].min())


# ---------------------------------------------------------------------------
# gauge fixing: first point pinned to the north pole, second to phi = 0

@dataclass
class GaugedConfig:
    """Free variables (theta_2..theta_N, phi_3..phi_N) of a gauged point set."""
    vector: np.ndarray
    n_points: int

    def __post_init__(self):
        self.vector = np.ascontiguousarray(self.vector, dtype=np.float64)
        if self.n_points < 2:
            raise ValueError("gauge needs at least 2 points")
        if self.vector.size != 2 * self.n_points - 3:
            raise ValueError("gauge vector must have length 2N - 3")

    @property
    def theta(self):
        n = self.n_points
        return np.concatenate(([0.0], self.vector[: n - 1]))

    @property
    def phi(self):
        n = self.n_points
        return np.concatenate(([0.0, 0.0], self.vector[n - 1:]))


def fix_gauge(ps):
    """Rigidly rotate so x_1 is the north pole and phi_2 = 0; return config.

    The rotation is a pure isometry, so every rotation-invariant functional
    of the set is unchanged.  Degenerate second points (x_2 = +-x_1) fall
    back to an arbitrary meridian.
    """
    xyz = ps.xyz if isinstance(ps, QuadraturePointSet) else np.asarray(ps, dtype=float)
    n = len(xyz)
    e3 = xyz[0] / np.linalg.norm(xyz[0])
    u = xyz[1] - (xyz[1] @ e3) * e3 if n > 1 else np.zeros(3)
    nu = np.linalg.norm(u)
    if nu < 1e-12:
        u = np.array([1.0, 0.0, 0.0]) - e3[0] * e3
        nu = np.linalg.norm(u)
        if nu < 1e-12:
            u = np.array([0.0, 1.0, 0.0]) - e3[1] * e3
            nu = np.linalg.norm(u)
    e1 = u / nu
    e2 = np.cross(e3, e1)
    rot = np.vstack([e1, e2, e3])
    theta, phi = cart_to_sph(xyz @ rot.T)
    vec = np.concatenate([theta[1:], phi[2:]])
    return GaugedConfig(vec, n)


def unfix_gauge(cfg):
    """Angles (theta, phi) of the full point set described by a GaugedConfig."""
    return cfg.theta, cfg.phi


# ---------------------------------------------------------------------------
# serialization: CSV of (theta, phi, weight) + JSON envelope

def _fmt(x):
    return format(float(x), ".17g")


def save_pointset(ps, path, manifest_hash=None):
    """Write `<path>.csv` and `<path>.json`; 17 significant digits round-trip."""
    base = Path(path)
    if base.suffix in (".csv", ".json"):
        base = base.with_suffix("")
    csv_path = base.with_suffix(".csv")
    with open(csv_path, "w") as fh:
        fh.write("theta,phi,weight\n")
        for i in range(ps.n):
            fh.write(f"{_fmt(ps.theta[i])},{_fmt(ps.phi[i])},{_fmt(ps.weights[i])}\n")
        if manifest_hash is not None:
            fh.write(f"# manifest: {manifest_hash}\n")
    env = {
        "n": int(ps.n),
        "declared_degree": ps.declared_degree,
        "certified_tol": ps.certified_tol,
        "generator": ps.generator,
        "seed": ps.seed,
        "csv": csv_path.name,
    }
    if manifest_hash is not None:
        env["manifest_hash"] = manifest_hash
    with open(base.with_suffix(".json"), "w") as fh:
        json.dump(env, fh, indent=1)
        fh.write("\n")
    return csv_path, base.with_suffix(".json")


def load_design(t):
    """Load the certified degree-t design shipped with the package."""
    from importlib import resources
    base = resources.files("sphdesign") / "data" / f"design_t{int(t)}.json"
    if not base.is_file():
        raise FileNotFoundError(f"no shipped design of degree {t}")
    with resources.as_file(base) as p:
        return load_pointset(p)


def load_pointset(path):
    """Load a point set saved by save_pointset (accepts .csv or .json path)."""
    p = Path(path)
    env = {}
    if p.suffix == ".json":
        with open(p) as fh:
            env = json.load(fh)
        csv_path = p.with_name(env["csv"])
    else:
        csv_path = p if p.suffix == ".csv" else p.with_suffix(".csv")
        jp = csv_path.with_suffix(".json")
        if jp.exists():
            with open(jp) as fh:
                env = json.load(fh)
    rows = np.loadtxt(csv_path, delimiter=",", skiprows=1, ndmin=2)
    ps = QuadraturePointSet(
        rows[:, 0], rows[:, 1], rows[:, 2],
        declared_degree=env.get("declared_degree"),
        certified_tol=env.get("certified_tol"),
        generator=env.get("generator", "file"),
        seed=env.get("seed"),
    )
    if "n" in env and env["n"] != ps.n:
        raise ValueError(f"envelope says n={env['n']}, csv has {ps.n} rows")
    return ps
