"""Command-line entry points.

Subcommands
  pointset    generate a point set (spiral / uniform / icosahedral)
  design      solve for a spherical t-design from a chosen start
  certify     check polynomial exactness of a quadrature rule
  project     least-squares projection of a sampled signal onto Pi_T
  sweep       projection error across a range of degrees
  denoise     framelet threshold denoising pipeline
  bank-check  validate the partition-of-unity condition of a filter bank

Config files are plain text, one `key = value` per line, `#` comments.
Every output file records a run-manifest hash computed over the command
name, seed, config text, and the content of all input files, so artifacts
can be traced to the exact invocation that produced them.

Exit codes: 0 success, 2 non-convergence, 3 certification failure,
4 config/usage error.
"""

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from .approximation import (add_noise, degree_sweep, indicator_signal,
                            project_cg, relative_l2_error, wendland_signal)
from .denoise import ThresholdRule, denoise_pipeline
from .framelets import (PUC_TOL, QuadratureLadder, default_bank,
                        load_bank_csv, save_bank_csv)
from .objective import certify
from .optimizers import compute_design
from .pointsets import (icosahedral_points, load_design, load_pointset,
                        save_pointset, spiral_points, uniform_random_points)

OK, NONCONVERGED, CERT_FAIL, CONFIG_ERR = 0, 2, 3, 4


class ConfigError(Exception):
    pass


def parse_config(path):
    """Read `key = value` lines; later keys win; '#' starts a comment."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, val = line.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def _get(cfg, key, default=None, cast=str):
    if key not in cfg:
        if default is None and cast is not str:
            return None
        return default
    try:
        raw = cfg[key]
        if cast is bool:
            return raw.lower() in ("1", "true", "yes", "on")
        return cast(raw)
    except ValueError as exc:
        raise ConfigError(f"config key {key} = {cfg[key]!r}: {exc}") from exc


def run_manifest(command, seed=None, config_text="", input_paths=()):
    """Content hash tying outputs to the inputs that produced them."""
    h = hashlib.sha256()
    h.update(command.encode())
    h.update(f"|seed={seed}|".encode())
    h.update(config_text.encode())
    # hash input bytes, not paths: identical content gives identical runs
    for i, p in enumerate(input_paths):
        h.update(f"|input{i}|".encode())
        try:
            h.update(Path(p).read_bytes())
        except OSError:
            h.update(b"<unreadable>")
    return h.hexdigest()


def _write_json(path, payload, manifest):
    payload = dict(payload)
    payload["manifest"] = manifest
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1, default=float)
        fh.write("\n")
    return path


def _write_csv(path, header, rows, manifest):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(f"{x:.17g}" if isinstance(x, float) else str(x)
                              for x in row) + "\n")
        fh.write(f"# manifest: {manifest}\n")
    return path


def _resolve_rule_source(cfg, inputs):
    """A sampling rule from `pointset = path` or `design = degree`."""
    if "pointset" in cfg:
        inputs.append(cfg["pointset"])
        return load_pointset(cfg["pointset"])
    if "design" in cfg:
        return load_design(_get(cfg, "design", cast=int))
    raise ConfigError("config needs pointset = <path> or design = <degree>")


_FUNCTIONS = {f"f{k}": k for k in range(5)}


def _truth_signal(cfg, ps):
    name = _get(cfg, "function", "f4")
    if name in _FUNCTIONS:
        return wendland_signal(_FUNCTIONS[name], ps)
    if name == "indicator":
        return indicator_signal(ps)
    raise ConfigError(f"unknown function {name!r} (f0..f4 or indicator)")


def _bank_from_name(name, inputs):
    if name.startswith("default-n"):
        return default_bank(int(name[len("default-n"):]))
    inputs.append(name)
    return load_bank_csv(name)


# ---------------------------------------------------------------------------
# subcommands

def cmd_pointset(args):
    seed = args.seed
    if args.gen == "spiral":
        if not args.n:
            raise ConfigError("--gen spiral needs --n")
        ps = spiral_points(args.n)
    elif args.gen == "uniform":
        if not args.n:
            raise ConfigError("--gen uniform needs --n")
        ps = uniform_random_points(args.n, 0 if seed is None else seed)
    elif args.gen == "icosa":
        if args.level is None:
            raise ConfigError("--gen icosa needs --level")
        ps = icosahedral_points(args.level)
    else:
        raise ConfigError(f"unknown generator {args.gen!r}")
    manifest = run_manifest(f"pointset:{args.gen}:{args.n}:{args.level}", seed)
    csv_path, _ = save_pointset(ps, args.out, manifest_hash=manifest)
    print(f"pointset {args.gen} n={ps.n} -> {csv_path}")
    return OK


def cmd_design(args):
    cfg = parse_config(args.config) if args.config else {}
    inputs = [args.config] if args.config else []
    init = args.init
    if init not in ("sp", "ud", "spiral", "uniform"):
        inputs.append(init)
        init = load_pointset(init)
    manifest = run_manifest(f"design:t={args.t}", args.seed,
                            json.dumps(cfg, sort_keys=True), inputs)
    solver = {"lsrcg": "ls-rcg", "trpcg": "tr-pcg"}[args.solver]
    hessian = {"full": "full", "approx": "approximation"}[args.hessian]
    ps, res = compute_design(
        args.t, n=args.n, init=init, seed=args.seed, solver=solver,
        hessian_mode=hessian,
        eps1=_get(cfg, "eps1", 1e-13, float),
        k_max=_get(cfg, "k_max", None, int),
        precond=_get(cfg, "precond", "identity"),
        certify_tol=_get(cfg, "certify_tol", 1e-10, float),
        delta_max=_get(cfg, "delta_max", 10.0, float))
    out = Path(args.out)
    save_pointset(ps, out, manifest_hash=manifest)
    _write_csv(out.parent / (out.stem + ".trace.csv"),
               ["k", "value", "grad_inf"],
               [(k, float(v), float(g)) for k, v, g in res.trace], manifest)
    _write_json(out.parent / (out.stem + ".report.json"),
                {"t": args.t, "n": ps.n, "solver": solver,
                 "hessian_mode": hessian, "status": res.status,
                 "iterations": res.iterations,
                 "sqrt_objective": res.sqrt_value, "grad_inf": res.grad_inf,
                 "certified_tol": ps.certified_tol}, manifest)
    print(f"design t={args.t} n={ps.n}: {res.status} after {res.iterations} "
          f"iterations, sqrt(A)={res.sqrt_value:.3e}, cert={ps.certified_tol:.3e}")
    return OK if res.status == "converged" else NONCONVERGED


def cmd_certify(args):
    ps = load_pointset(args.pointset)
    manifest = run_manifest(f"certify:t={args.t}", None, "", [args.pointset])
    verdict = certify(ps, args.t, tol=args.tol)
    if args.out:
        _write_json(args.out, verdict, manifest)
    print(f"certify t={verdict['degree']} n={verdict['n']}: "
          f"max weighted Weyl sum {verdict['max_weighted_weyl']:.3e} "
          f"(tol {args.tol:.1e}) -> {'pass' if verdict['pass'] else 'FAIL'}")
    return OK if verdict["pass"] else CERT_FAIL


def cmd_project(args):
    cfg = parse_config(args.config)
    inputs = [args.config]
    ps = _resolve_rule_source(cfg, inputs)
    truth = _truth_signal(cfg, ps)
    sigma = _get(cfg, "sigma", 0.0, float)
    seed = args.seed if args.seed is not None else _get(cfg, "seed", 0, int)
    manifest = run_manifest("project", seed, json.dumps(cfg, sort_keys=True),
                            inputs)
    signal = add_noise(truth, sigma, seed=seed) if sigma > 0 else truth
    T = _get(cfg, "T", None, int)
    if T is None:
        raise ConfigError("config needs T = <degree>")
    res = project_cg(signal, T,
                     weight_mode=_get(cfg, "weight_mode", "w"),
                     k_max=_get(cfg, "k_max", 1000, int),
                     eps=_get(cfg, "eps", None, float))
    rel = relative_l2_error(res.projected, truth)
    out = Path(args.out)
    _write_json(out.parent / (out.stem + ".report.json"),
                {"T": T, "n": ps.n, "status": res.status,
                 "cg_iterations": res.cg_iterations,
                 "final_residual_norm": res.final_residual_norm,
                 "relative_error": rel, "sigma": sigma}, manifest)
    _write_csv(out.parent / (out.stem + ".signals.csv"),
               ["theta", "phi", "truth", "input", "projected"],
               zip(ps.theta.tolist(), ps.phi.tolist(), truth.values.tolist(),
                   np.real(signal.values).tolist(),
                   np.real(res.projected.values).tolist()), manifest)
    print(f"project T={T}: {res.status} in {res.cg_iterations} CG steps, "
          f"relative error {rel:.3e}")
    return OK if res.status == "converged" else NONCONVERGED


def cmd_sweep(args):
    cfg = parse_config(args.config)
    inputs = [args.config]
    ps = _resolve_rule_source(cfg, inputs)
    truth = _truth_signal(cfg, ps)
    sigma = _get(cfg, "sigma", 0.05, float)
    seed0 = args.seed if args.seed is not None else _get(cfg, "seed", 0, int)
    n_seeds = _get(cfg, "seeds", 5, int)
    t_lo = _get(cfg, "T_min", 2, int)
    t_hi = _get(cfg, "T_max", 30, int)
    step = _get(cfg, "T_step", 1, int)
    manifest = run_manifest("sweep", seed0, json.dumps(cfg, sort_keys=True),
                            inputs)
    degrees = list(range(t_lo, t_hi + 1, step))
    curves, minima, argmins = [], [], []
    for i in range(n_seeds):
        noisy = add_noise(truth, sigma, seed=seed0 + i)
        sw = degree_sweep(noisy, truth, degrees,
                          weight_mode=_get(cfg, "weight_mode", "w"),
                          k_max=_get(cfg, "k_max", 1000, int))
        curves.append(sw.errors)
        minima.append(sw.best_error)
        argmins.append(sw.best_degree)
    median_curve = np.median(np.array(curves), axis=0)
    out = Path(args.out)
    rows = [(d, *(float(c[j]) for c in curves), float(median_curve[j]))
            for j, d in enumerate(degrees)]
    _write_csv(out.parent / (out.stem + ".curve.csv"),
               ["T", *(f"err_seed{seed0 + i}" for i in range(n_seeds)),
                "err_median"], rows, manifest)
    summary = {"sigma": sigma, "seeds": n_seeds,
               "median_min_error": float(np.median(minima)),
               "median_argmin_degree": float(np.median(argmins)),
               "argmin_of_median_curve": int(degrees[int(np.argmin(median_curve))]),
               "per_seed_min": [float(m) for m in minima],
               "per_seed_argmin": [int(a) for a in argmins]}
    _write_json(out.parent / (out.stem + ".summary.json"), summary, manifest)
    print(f"sweep T={t_lo}..{t_hi}: median min error "
          f"{summary['median_min_error']:.3e} at median argmin degree "
          f"{summary['median_argmin_degree']:.0f}")
    return OK


def cmd_denoise(args):
    cfg = parse_config(args.config)
    inputs = [args.config]
    degrees = tuple(int(s) for s in _get(cfg, "ladder", "16,32,64").split(","))
    ladder = QuadratureLadder([load_design(t) for t in degrees])
    fine = ladder.rules[-1]
    truth = _truth_signal(cfg, fine)
    sigma_rel = _get(cfg, "sigma", 0.05, float)
    sigma_abs = _get(cfg, "sigma_abs", 0.0, float) or \
        sigma_rel * float(np.max(np.abs(truth.values)))
    seed = args.seed if args.seed is not None else _get(cfg, "seed", 0, int)
    bank = _bank_from_name(_get(cfg, "bank", "default-n3"), inputs)
    manifest = run_manifest("denoise", seed, json.dumps(cfg, sort_keys=True),
                            inputs)
    rule = ThresholdRule(
        _get(cfg, "rule", "LS"), sigma=sigma_abs,
        c=_get(cfg, "c", None, float), c1=_get(cfg, "c1", 3.0, float),
        cap_mode=_get(cfg, "cap_mode", "knn"),
        cap_k=_get(cfg, "cap_k", 12, int),
        cap_r=_get(cfg, "cap_r", None, float),
        threshold_lowpass=_get(cfg, "threshold_lowpass", True, bool))
    noisy = add_noise(truth, sigma_rel, seed=seed)
    out_sig, report = denoise_pipeline(
        noisy, ladder, bank, rule, T=_get(cfg, "T", None, int), truth=truth,
        k_max=_get(cfg, "k_max", 1000, int))
    out = Path(args.out)
    _write_json(out.parent / (out.stem + ".report.json"),
                {"snr_in": report.snr_in, "snr_out": report.snr_out,
                 "retained": report.retained, "config": report.config,
                 "seed": seed}, manifest)
    _write_csv(out.parent / (out.stem + ".signals.csv"),
               ["theta", "phi", "truth", "noisy", "denoised"],
               zip(fine.theta.tolist(), fine.phi.tolist(),
                   truth.values.tolist(), noisy.values.tolist(),
                   np.real(out_sig.values).tolist()), manifest)
    print(f"denoise {rule.kind} bank={bank.name}: snr {report.snr_in:.2f} dB "
          f"-> {report.snr_out:.2f} dB")
    return OK


def cmd_bank_check(args):
    inputs = []
    try:
        bank = _bank_from_name(args.bank, inputs)
    except ValueError as exc:
        print(f"bank-check {args.bank}: FAIL ({exc})")
        return CERT_FAIL
    # sampled banks guarantee the identity at their own nodes only
    if bank.xi_grid is not None:
        xi, grid = bank.xi_grid, f"stored-samples({bank.xi_grid.size})"
    else:
        xi, grid = np.linspace(0.0, 1.0, args.grid), args.grid
    dev = bank.puc_deviation(xi)
    verdict = {"bank": bank.name, "n_highpass": bank.n, "grid": grid,
               "max_puc_deviation": float(dev), "tolerance": PUC_TOL,
               "pass": bool(dev <= PUC_TOL)}
    manifest = run_manifest("bank-check", None, "", inputs)
    if args.out:
        _write_json(args.out, verdict, manifest)
    if args.dump:
        save_bank_csv(bank, args.dump)
    print(f"bank-check {bank.name}: PUC deviation {dev:.3e} "
          f"-> {'pass' if verdict['pass'] else 'FAIL'}")
    return OK if verdict["pass"] else CERT_FAIL


# ---------------------------------------------------------------------------

def _build_parser():
    top = argparse.ArgumentParser(
        prog="sphdesign",
        description="Spherical t-designs, projection, framelets, denoising.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--threads", type=int, default=None,
                        help="cap worker threads")
    common.add_argument("--deterministic", action="store_true",
                        help="single-threaded ordered reductions")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pointset", parents=[common],
                       help="generate a point set")
    p.add_argument("--gen", required=True,
                   choices=("spiral", "uniform", "icosa"))
    p.add_argument("--n", type=int)
    p.add_argument("--level", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_pointset)

    p = sub.add_parser("design", parents=[common],
                       help="solve for a spherical t-design")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--init", default="sp",
                   help="sp | ud | path to a saved point set")
    p.add_argument("--solver", choices=("lsrcg", "trpcg"), default="trpcg")
    p.add_argument("--hessian", choices=("full", "approx"), default="full")
    p.add_argument("--config", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_design)

    p = sub.add_parser("certify", parents=[common],
                       help="check polynomial exactness")
    p.add_argument("--pointset", required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_certify)

    for name, fn in (("project", cmd_project), ("sweep", cmd_sweep),
                     ("denoise", cmd_denoise)):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--config", required=True)
        p.add_argument("--out", required=True)
        p.set_defaults(fn=fn)

    p = sub.add_parser("bank-check", parents=[common],
                       help="validate a filter bank")
    p.add_argument("--bank", required=True,
                   help="default-n{1,2,3} or a bank CSV path")
    p.add_argument("--grid", type=int, default=10_001)
    p.add_argument("--out", default=None)
    p.add_argument("--dump", default=None,
                   help="also write the sampled bank as CSV")
    p.set_defaults(fn=cmd_bank_check)
    return top


def _apply_thread_flags(args):
    n = 1 if args.deterministic else args.threads
    if n is None:
        return
    try:
        import numba
        numba.set_num_threads(max(1, int(n)))
    except (ImportError, ValueError):
        pass


def main(argv=None):
    args = _build_parser().parse_args(argv)
    _apply_thread_flags(args)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return CONFIG_ERR
    except (FileNotFoundError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return CONFIG_ERR


if __name__ == "__main__":
    sys.exit(main())
