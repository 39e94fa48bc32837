"""Command-line front end: ``specmeas {sample,verify,ldp}``.

Every output file starts with the run configuration and the package
version, and contains no timestamps, so a rerun with the same seed writes
the same bytes.  Exit codes: 0 success, 2 bad configuration, 3 numerical
failure, 4 statistical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import SpecMeasError, ZeroHits
from .ldp import TestFunction, mc_tail
from .matrix_models import dual_compose, haar_special_orthogonal, haar_unitary, sample_spectral_measure, spectral_measure
from .opuc import atoms_from_verblunsky, verblunsky_from_atoms
from .samplers import (
    EnsembleSpec,
    cbe_coefficients,
    fold_batch,
    jtilde_coefficients,
    sample_bizth_batch,
    sample_uniform_moments,
    so2n_coefficients,
    sun_coefficients,
)
from .suites import SUITES, run_suite

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_STATISTICAL = 0, 2, 3, 4

SAMPLE_ENSEMBLES = ("cbe", "sun", "so2n", "jtilde", "jacobi", "bizth", "haar", "unif2",
                    "uniform-moments-circle", "uniform-moments-interval")
LDP_ENSEMBLES = ("cbe", "jacobi", "dirichlet-knob")


class ConfigError(ValueError):
    pass


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="specmeas", description="Random spectral measures: sampling, verification, LDP.")
    p.add_argument("--version", action="version", version=f"specmeas {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, required=True)
        sp.add_argument("--samples", type=int, default=10_000)
        sp.add_argument("--out", type=Path, default=None, help="output file (stdout if omitted)")
        sp.add_argument("--beta", type=float, default=2.0)
        sp.add_argument("--a", type=float, default=1.0)
        sp.add_argument("--b", type=float, default=1.0)

    s = sub.add_parser("sample", help="draw random measures")
    common(s)
    s.add_argument("--ensemble", choices=SAMPLE_ENSEMBLES, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--case", type=int, choices=(1, 2, 3, 4), default=1)
    s.add_argument("--format", choices=("json", "csv"), default="json")

    v = sub.add_parser("verify", help="run a statistical suite")
    common(v)
    v.add_argument("--suite", choices=sorted(SUITES), required=True)
    v.add_argument("--n", type=int, default=6)
    v.add_argument("--case", type=int, choices=(1, 2, 3, 4), default=1)
    v.add_argument("--alpha", type=float, default=1e-3)
    v.add_argument("--negative-control", action="store_true",
                   help="sample from a deliberately wrong law; the suite should fail")
    v.add_argument("--format", choices=("json",), default="json")

    l = sub.add_parser("ldp", help="Monte Carlo tail rates for a linear statistic")
    common(l)
    l.add_argument("--ensemble", choices=LDP_ENSEMBLES, default="cbe")
    l.add_argument("--n-list", type=str, required=True, help="comma-separated increasing N values")
    l.add_argument("--x", type=float, default=0.4, help="threshold for the linear statistic")
    l.add_argument("--grid-size", type=int, default=4096)
    l.add_argument("--format", choices=("json",), default="json")
    return p


def _config(args) -> dict:
    # the output path is left out so that identical runs give identical bytes wherever they land
    d = {k: v for k, v in sorted(vars(args).items()) if k != "out"}
    return {"config": d, "version": __version__}


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _complex_list(c):
    return [[float(z.real), float(z.imag)] for z in np.atleast_1d(c)]


def _sample_records(args, rng) -> list[dict]:
    N, m, e = args.n, args.samples, args.ensemble
    if N < 1 or m < 1:
        raise ConfigError("--n and --samples must be positive")
    recs = []
    if e in ("cbe", "sun", "so2n", "jtilde"):
        if e == "cbe":
            c = cbe_coefficients(rng, N, args.beta, m)
        elif e == "sun":
            c = sun_coefficients(rng, N, m)
        elif e == "so2n":
            c = so2n_coefficients(rng, N, m).astype(complex)
        else:
            c = jtilde_coefficients(rng, N, args.beta, args.a, args.b, m).astype(complex)
        th, w = atoms_from_verblunsky(c)
        for i in range(m):
            recs.append({"angles": th[i].tolist(), "weights": w[i].tolist(), "coefficients": _complex_list(c[i])})
    elif e == "jacobi":
        c = jtilde_coefficients(rng, N, args.beta, args.a, args.b, m).astype(complex)
        th, w = atoms_from_verblunsky(c)
        x, wx = fold_batch(th, w)
        for i in range(m):
            recs.append({"points": x[i].tolist(), "weights": wx[i].tolist(),
                         "canonical": ((1.0 + c[i, :-1].real) / 2).tolist()})
    elif e == "bizth":
        for mu in sample_bizth_batch(rng, args.case, N, m):
            recs.append({"points": mu.points.tolist(), "weights": mu.weights.tolist()})
    elif e == "haar":
        for _ in range(m):
            mu, _rej = sample_spectral_measure(lambda: haar_unitary(rng, N))
            c = verblunsky_from_atoms(mu.atoms, mu.weights, N)
            recs.append({"angles": mu.angles.tolist(), "weights": mu.weights.tolist(), "coefficients": _complex_list(c)})
    elif e == "unif2":
        for _ in range(m):
            mu = spectral_measure(dual_compose(haar_special_orthogonal(rng, 2 * N)), merge_tol=1e-6)
            recs.append({"angles": mu.angles.tolist(), "weights": mu.weights.tolist()})
    elif e == "uniform-moments-circle":
        for _ in range(m):
            recs.append({"moments": _complex_list(sample_uniform_moments(rng, "circle", N))})
    else:
        for _ in range(m):
            recs.append({"moments": sample_uniform_moments(rng, "interval", N).tolist()})
    return recs


def _csv_text(header: dict, columns: list[str], rows) -> str:
    buf = io.StringIO()
    buf.write("# " + json.dumps(header, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)
    return buf.getvalue()


def cmd_sample(args) -> int:
    rng = np.random.default_rng(args.seed)
    recs = _sample_records(args, rng)
    header = _config(args)
    if args.format == "json":
        _emit(json.dumps(header | {"records": recs}, sort_keys=True) + "\n", args.out)
        return EXIT_OK
    # long format: one row per atom (or moment)
    rows = []
    for i, r in enumerate(recs):
        if "moments" in r:
            for k, v in enumerate(r["moments"], 1):
                rows.append((i, k, *(v if isinstance(v, list) else (v, 0.0))))
            cols = ["draw", "k", "re", "im"]
        else:
            loc = r.get("angles", r.get("points"))
            for k, (x, wt) in enumerate(zip(loc, r["weights"])):
                rows.append((i, k, repr(x), repr(wt)))
            cols = ["draw", "atom", "angle" if "angles" in r else "point", "weight"]
    _emit(_csv_text(header, cols, rows), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.samples < 100:
        raise ConfigError("--samples must be at least 100")
    rng = np.random.default_rng(args.seed)
    reports = run_suite(args.suite, rng, n=args.n, beta=args.beta, case=args.case, samples=args.samples,
                        alpha=args.alpha, negative=args.negative_control)
    ok = all(r.passed for r in reports)
    doc = _config(args) | {"passed": ok, "reports": [r.to_dict() for r in reports]}
    _emit(json.dumps(doc, sort_keys=True) + "\n", args.out)
    for r in reports:
        print(r.line(), file=sys.stderr)
    return EXIT_OK if ok else EXIT_STATISTICAL


def cmd_ldp(args) -> int:
    try:
        N_list = [int(t) for t in args.n_list.split(",") if t.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --n-list: {exc}") from None
    if not N_list:
        raise ConfigError("--n-list is empty")
    if args.ensemble == "jacobi":
        f = TestFunction(lambda x: x, grid_size=args.grid_size, domain="interval", name="x")
    else:
        f = TestFunction(np.cos, grid_size=args.grid_size, name="Re z")
    spec = EnsembleSpec(args.ensemble, N_list[0], args.beta, args.a, args.b)
    est = mc_tail(np.random.default_rng(args.seed), spec, f, args.x, N_list, args.samples, seed=args.seed)
    doc = _config(args) | {"estimate": est.to_dict()}
    _emit(json.dumps(doc, sort_keys=True) + "\n", args.out)
    csv_path = None if args.out is None else args.out.with_suffix(".csv")
    text = _csv_text(_config(args), ["inv_N", "rate_estimate"], [(repr(a), repr(b)) for a, b in est.csv_rows()])
    if csv_path is not None:
        _emit(text, csv_path)
    lo, hi = est.rate_ci()
    print(f"rate {est.rate:.5g} (95% CI {lo:.5g} .. {hi:.5g}), theory {est.theory}", file=sys.stderr)
    return EXIT_OK


def main(argv=None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)  # exits with 2 on malformed flags
    handler = {"sample": cmd_sample, "verify": cmd_verify, "ldp": cmd_ldp}[args.command]
    try:
        return handler(args)
    except ZeroHits as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigError, KeyError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SpecMeasError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
