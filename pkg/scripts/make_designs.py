#!/usr/bin/env python3
"""Generate the certified spherical designs shipped in sphdesign/data.

Small degrees run with the full Hessian; the large ones switch to the
Gauss-Newton Hessian with Jacobi preconditioning, which is what makes
N ~ 1.6e5 tractable on one core.  Progress for each solve is appended to
the log so long runs can be watched with tail -f.

Usage: python3 scripts/make_designs.py [t ...]    (default: 16 32 64 200 400)
"""

import json
import sys
import time
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from sphdesign.optimizers import compute_design  # noqa: E402
from sphdesign.pointsets import save_pointset  # noqa: E402

DATA = ROOT / "src" / "sphdesign" / "data"

# (solver, hessian_mode, precond, eps1, k_max) keyed by "t is big"
SMALL = ("tr-pcg", "full", "identity", 1e-13, 400)
LARGE = ("tr-pcg", "approximation", "diagonal", 1e-12, 400)


def build(t):
    solver, mode, precond, eps1, k_max = SMALL if t <= 100 else LARGE
    t0 = time.time()

    def progress(k, value, ginf):
        sa = value ** 0.5 if value > 0 else 0.0
        print(f"  t={t} k={k:4d}  sqrtA={sa:.3e}  ginf={ginf:.3e}  "
              f"[{time.time() - t0:8.1f}s]", flush=True)

    print(f"== degree {t}: N={(t + 1) ** 2}, {solver}/{mode}/{precond}", flush=True)
    ps, res = compute_design(t, init="spiral", solver=solver, hessian_mode=mode,
                             precond=precond, eps1=eps1, k_max=k_max,
                             callback=progress)
    elapsed = time.time() - t0
    save_pointset(ps, DATA / f"design_t{t}")
    stats = {
        "degree": t,
        "n": ps.n,
        "sqrt_objective": res.sqrt_value,
        "grad_inf": res.grad_inf,
        "iterations": res.iterations,
        "status": res.status,
        "certified_tol": ps.certified_tol,
        "solver": solver,
        "hessian_mode": mode,
        "seconds": round(elapsed, 1),
    }
    with open(DATA / f"design_t{t}.stats.json", "w") as fh:
        json.dump(stats, fh, indent=1)
        fh.write("\n")
    print(f"== degree {t} done: sqrtA={res.sqrt_value:.3e} ginf={res.grad_inf:.3e} "
          f"cert={ps.certified_tol:.3e} status={res.status} ({elapsed:.0f}s)",
          flush=True)


def main():
    DATA.mkdir(parents=True, exist_ok=True)
    degrees = [int(a) for a in sys.argv[1:]] or [16, 32, 64, 200, 400]
    for t in degrees:
        build(t)


if __name__ == "__main__":
    main()
