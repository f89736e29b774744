"""Command-line surface: exact moments, density grids, identity verification,
Monte Carlo sampling, and the semicircle rescaling, all as machine-readable
JSON/CSV artifacts.

Exit codes: 0 success, 1 check failure, 2 usage error.  Every run records a
manifest (command, parameters, seed, version, timestamp); data files carry a
reference to their manifest so reruns with the same seed stay byte-identical.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, moments, sampler, special

DEFAULT_BETA_HATS = ("1/2", "1", "2", "3/7")


# ---------------------------------------------------------------------------
# Manifest and serialization helpers
# ---------------------------------------------------------------------------

def _manifest(command: str, parameters: dict, seed=None) -> dict:
    doc = {
        "command": command,
        "parameters": parameters,
        "tool_version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    if seed is not None:
        doc["seed"] = seed
    return doc


def _json_number(v):
    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 else float(v)
    if isinstance(v, float) and v.is_integer():
        return v
    return v


def _write_json(path: Path, doc: dict) -> None:
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def _write_csv(path: Path, header: str, rows) -> None:
    # locale-independent: dot decimals via repr, newline-terminated
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def _print_json(doc: dict) -> None:
    print(json.dumps(doc, indent=2))


def _symmetric_grid(limit: float, points: int) -> np.ndarray:
    """linspace over [-limit, limit] forced to exact mirror symmetry."""
    g = np.linspace(-limit, limit, points)
    half = points // 2
    g[-half:] = -g[:half][::-1]
    if points % 2:
        g[half] = 0.0
    return g


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("GBE_SPECTRAL_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def _fresh_seed() -> int:
    return int.from_bytes(os.urandom(8), "big") >> 1


# ---------------------------------------------------------------------------
# moments
# ---------------------------------------------------------------------------

def _run_moment_checks(alpha: Fraction, n_max: int) -> dict:
    useq = moments.u_sequence_numeric(alpha, max(n_max, 1)).values
    dyck_ok = all(
        moments.dyck_weight_sum(n, alpha) == useq[n]
        for n in range(min(n_max, 6) + 1)
    )
    duality_ok = all(
        moments.verify_duality(p, Fraction(bh))
        for p in range(min(n_max, moments.DUALITY_MAX_P) + 1)
        for bh in DEFAULT_BETA_HATS
    )
    u_h_ok = all(
        moments.verify_u_h_relation(p)
        for p in range(min(n_max, moments.U_H_MAX_P) + 1)
    )
    return {"duality": duality_ok, "dyck": dyck_ok, "u_h": u_h_ok}


def _cmd_moments(args) -> int:
    try:
        alpha = Fraction(args.alpha)
    except (ValueError, ZeroDivisionError):
        print(f"error: invalid alpha {args.alpha!r}", file=sys.stderr)
        return 2
    if alpha < 0:
        print("error: alpha must be >= 0", file=sys.stderr)
        return 2
    if args.n < 0:
        print("error: n must be >= 0", file=sys.stderr)
        return 2
    seq = moments.u_sequence_numeric(alpha, args.n)
    doc = {
        "alpha": _json_number(alpha),
        "n_max": args.n,
        "u": [_json_number(v) for v in seq.values],
        "checks": None,
        "manifest": _manifest("moments", {"alpha": str(alpha), "n": args.n, "checks": args.checks}),
    }
    ok = True
    if args.checks:
        doc["checks"] = _run_moment_checks(alpha, args.n)
        ok = all(doc["checks"].values())
    _print_json(doc)
    if args.out:
        _write_json(Path(args.out), doc)
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _cmd_verify(args) -> int:
    pmax = args.pmax
    if pmax < 0 or pmax > moments.DUALITY_MAX_P:
        print(f"error: pmax must lie in [0, {moments.DUALITY_MAX_P}]", file=sys.stderr)
        return 2
    beta_hats = [Fraction(s) for s in args.beta_hats.split(",") if s]
    if any(bh <= 0 for bh in beta_hats):
        print("error: beta_hat values must be positive", file=sys.stderr)
        return 2

    duality_failures = [
        {"p": p, "beta_hat": str(bh)}
        for p in range(pmax + 1)
        for bh in beta_hats
        if not moments.verify_duality(p, bh)
    ]
    u_h_failures = [
        {"p": p} for p in range(min(pmax + 2, moments.U_H_MAX_P) + 1)
        if not moments.verify_u_h_relation(p)
    ]

    kappa_failures = []
    grid = [1.0, 10.0, 100.0, 1000.0]
    for p in range(1, pmax + 1):
        devs = moments.verify_kappa_limit(p, N=6, beta_hat_grid=grid)
        # deviation scales like c_p / beta_hat; demand monotone decay and the
        # expected orders of magnitude across the three-decade grid
        if not all(d2 < d1 for d1, d2 in zip(devs, devs[1:])) or devs[-1] > devs[0] / 100.0:
            kappa_failures.append({"p": p, "deviations": devs})

    limit_failures = []
    for p in range(1, pmax + 1):
        for alpha in (1, 2):
            devs = moments.verify_limit_to_u(p, alpha, [16, 32, 64, 128])
            if not all(d2 < d1 for d1, d2 in zip(devs, devs[1:])):
                limit_failures.append({"p": p, "alpha": alpha, "deviations": devs})

    lemma_failures = []
    for alpha in (0, 1, 2):
        a_seq = moments.u_sequence_numeric(alpha, 10).values
        b_seq = moments.lemma_two_step(a_seq, alpha)
        target = moments.u_sequence_numeric(alpha + 1, len(b_seq) - 1).values
        for n, (b, t) in enumerate(zip(b_seq, target)):
            if abs(b - t) > 1e-10 * abs(t):
                lemma_failures.append({"alpha": alpha, "n": n})

    checks = {
        "duality": {"pass": not duality_failures, "failures": duality_failures},
        "u_h_relation": {"pass": not u_h_failures, "failures": u_h_failures},
        "kappa_limit": {"pass": not kappa_failures, "failures": kappa_failures},
        "limit_to_u": {"pass": not limit_failures, "failures": limit_failures},
        "lemma_two_step": {"pass": not lemma_failures, "failures": lemma_failures},
    }
    all_pass = all(c["pass"] for c in checks.values())
    doc = {
        "p_max": pmax,
        "beta_hats": [str(b) for b in beta_hats],
        "checks": checks,
        "all_pass": all_pass,
        "manifest": _manifest("verify", {"pmax": pmax, "beta_hats": args.beta_hats}),
    }
    _print_json(doc)
    if args.out:
        _write_json(Path(args.out), doc)
    return 0 if all_pass else 1


# ---------------------------------------------------------------------------
# density
# ---------------------------------------------------------------------------

def _cmd_density(args) -> int:
    if args.alpha <= 0:
        print("error: alpha must be positive", file=sys.stderr)
        return 2
    if args.points < 2 or args.ymax <= 0:
        print("error: need ymax > 0 and at least two grid points", file=sys.stderr)
        return 2
    params = special.DensityParams(alpha=args.alpha, method=args.method)
    prefix = Path(args.out)
    csv_path = prefix.with_suffix(".csv")
    json_path = prefix.with_suffix(".json")
    manifest_path = prefix.with_suffix(".manifest.json")

    grid = _symmetric_grid(args.ymax, args.points)
    try:
        values = [special.density(float(y), args.alpha, params) for y in grid]
        norm, _ = _normalization(args.alpha, params)
        agreement = _method_agreement(args.alpha, params)
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        _write_json(manifest_path, _manifest("density", vars_of(args), seed=None))
        return 1

    _write_csv(csv_path, "y,density", zip(grid, values))
    sidecar = {
        "alpha": args.alpha,
        "ymax": args.ymax,
        "points": args.points,
        "method": args.method,
        "normalization": norm,
        "method_agreement": agreement,
        "manifest_file": manifest_path.name,
    }
    _write_json(json_path, sidecar)
    manifest = _manifest("density", vars_of(args))
    manifest["outputs"] = [csv_path.name, json_path.name]
    _write_json(manifest_path, manifest)
    return 0


def vars_of(args) -> dict:
    skip = {"func", "out", "threads"}
    return {k: v for k, v in vars(args).items() if k not in skip and not k.startswith("_")}


def _normalization(alpha: float, params) -> tuple:
    from scipy.integrate import quad

    T = math.sqrt(2.0 * math.log(1e16)) + 2.0 * math.sqrt(alpha) + 2.0
    val, err = quad(lambda t: special.density(t, alpha, params), 0.0, T,
                    epsabs=1e-12, epsrel=1e-10, limit=300)
    return 2.0 * val, 2.0 * err

def _method_agreement(alpha: float, params) -> dict:
    lo = math.sqrt(params.x_switch)          # y with y^2/2 = x_switch/2
    hi = math.sqrt(2.0 * params.x_switch)    # y with y^2/2 = x_switch
    probes = [0.5, 1.5, 3.0, lo, 0.5 * (lo + hi), hi]
    worst = 0.0
    for y in probes:
        kval = complex(special.V_R(y, alpha), special.V_I(y, alpha))
        qval = special._f_hat_quadrature(y, alpha)
        worst = max(worst, abs(kval - qval))
    return {"probes": probes, "max_abs_f_hat_diff": worst}


# ---------------------------------------------------------------------------
# sample
# ---------------------------------------------------------------------------

def _cmd_sample(args) -> int:
    if args.alpha <= 0 or args.trunc < 1 or args.samples < 1:
        print("error: need alpha > 0, trunc >= 1, samples >= 1", file=sys.stderr)
        return 2
    if args.trunc < args.pmax + 1:
        print("error: trunc must be at least pmax + 1", file=sys.stderr)
        return 2
    seed = args.seed if args.seed is not None else _fresh_seed()
    threads = _threads(args)
    prefix = Path(args.out)
    manifest_path = prefix.with_suffix(".manifest.json")

    moment_report = sampler.mc_mean_moments(
        args.alpha, args.trunc, args.samples, args.pmax,
        sampler.RngStream(seed, stream_id=0), threads=threads,
    )
    outputs = []
    hist_report = None
    if args.bins > 0:
        hist_report = sampler.mc_histogram(
            args.alpha, args.trunc, args.samples, args.bins, args.ymax,
            sampler.RngStream(seed, stream_id=1), threads=threads,
        )

    report = {
        "alpha": args.alpha,
        "truncation": args.trunc,
        "samples": args.samples,
        "seed": seed,
        "threads": threads,
        "moments": moment_report.to_dict(),
        "histogram": hist_report.to_dict() if hist_report else None,
        "manifest_file": manifest_path.name,
    }
    if args.format == "csv" and hist_report is not None:
        csv_path = prefix.with_suffix(".csv")
        _write_csv(csv_path, "bin_center,mass,std_error", hist_report.histogram)
        outputs.append(csv_path.name)
    json_path = prefix.with_suffix(".json")
    _write_json(json_path, report)
    outputs.append(json_path.name)

    manifest = _manifest("sample", vars_of(args), seed=seed)
    manifest["outputs"] = outputs
    _write_json(manifest_path, manifest)
    print(json.dumps({"seed": seed, "outputs": outputs + [manifest_path.name]}))
    return 0


# ---------------------------------------------------------------------------
# semicircle
# ---------------------------------------------------------------------------

def _cmd_semicircle(args) -> int:
    try:
        alphas = [float(s) for s in args.alphas.split(",") if s]
    except ValueError:
        print(f"error: invalid alpha list {args.alphas!r}", file=sys.stderr)
        return 2
    if not alphas or any(a <= 0 for a in alphas):
        print("error: need positive alphas", file=sys.stderr)
        return 2
    if args.points < 2 or args.xmax <= 0:
        print("error: need xmax > 0 and at least two grid points", file=sys.stderr)
        return 2
    prefix = Path(args.out)
    csv_path = prefix.with_suffix(".csv")
    json_path = prefix.with_suffix(".json")
    manifest_path = prefix.with_suffix(".manifest.json")

    grid = _symmetric_grid(args.xmax, args.points)
    semi = [special.semicircle_density(float(x)) for x in grid]
    columns = {}
    sup_dev = {}
    bulk = min(1.9, args.xmax)
    for alpha in alphas:
        root = math.sqrt(alpha)
        rescaled = [root * special.density(root * float(x), alpha) for x in grid]
        columns[alpha] = rescaled
        sup_dev[str(alpha)] = max(
            abs(r - s) for x, r, s in zip(grid, rescaled, semi) if abs(x) <= bulk
        )

    header = "x,semicircle," + ",".join(f"alpha_{a:g}" for a in alphas)
    rows = (
        (x, s, *(columns[a][i] for a in alphas))
        for i, (x, s) in enumerate(zip(grid, semi))
    )
    _write_csv(csv_path, header, rows)
    sidecar = {
        "alphas": alphas,
        "xmax": args.xmax,
        "points": args.points,
        "bulk_window": bulk,
        "bulk_sup_deviation": sup_dev,
        "manifest_file": manifest_path.name,
    }
    _write_json(json_path, sidecar)
    manifest = _manifest("semicircle", vars_of(args))
    manifest["outputs"] = [csv_path.name, json_path.name]
    _write_json(manifest_path, manifest)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gbe-spectral",
        description="Mean spectral measure toolkit: exact moments, closed-form "
                    "density, identity verification, Monte Carlo sampling.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("moments", help="even moments u_n(alpha) with optional identity checks")
    p.add_argument("--alpha", required=True, help="alpha >= 0 (accepts fractions like 1/2)")
    p.add_argument("--n", type=int, default=8, help="largest moment index")
    p.add_argument("--checks", action="store_true", help="run the identity suite")
    p.add_argument("--out", help="also write the JSON document here")
    p.set_defaults(func=_cmd_moments)

    p = sub.add_parser("verify", help="exact identity report across all moment engines")
    p.add_argument("--pmax", type=int, default=8)
    p.add_argument("--beta-hats", default=",".join(DEFAULT_BETA_HATS), dest="beta_hats")
    p.add_argument("--out", help="also write the JSON report here")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("density", help="density grid as CSV plus JSON diagnostics")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--ymax", type=float, default=6.0)
    p.add_argument("--points", type=int, default=601)
    p.add_argument("--method", choices=("kummer", "quadrature", "auto"), default="auto")
    p.add_argument("--out", default="density", help="output prefix")
    p.set_defaults(func=_cmd_density)

    p = sub.add_parser("sample", help="Monte Carlo moment estimates and weighted eigenvalue histogram")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--trunc", type=int, default=200, help="matrix truncation size")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--pmax", type=int, default=4)
    p.add_argument("--bins", type=int, default=60, help="0 disables the histogram")
    p.add_argument("--ymax", type=float, default=6.0)
    p.add_argument("--seed", type=int, default=None, help="generated and recorded when omitted")
    p.add_argument("--out", default="sample", help="output prefix")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (fallback: GBE_SPECTRAL_THREADS); never changes output bytes")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("semicircle", help="rescaled densities against the semicircle law")
    p.add_argument("--alphas", default="4,16,64")
    p.add_argument("--xmax", type=float, default=2.5)
    p.add_argument("--points", type=int, default=101)
    p.add_argument("--out", default="semicircle", help="output prefix")
    p.set_defaults(func=_cmd_semicircle)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
