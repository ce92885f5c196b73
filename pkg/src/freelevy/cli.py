"""Command-line front end.

Subcommands: ``density``, ``limit <kind>`` (alias ``run``), ``randmat``,
``props`` and ``verify``.  Every file goes under ``--out``; every summary
JSON carries the thresholds next to the values.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import laws
from .acceptance import CRITERIA, run_criterion
from .errors import DomainError, FreeLevyError
from .measures import write_density_csv

DEFAULT_SEED = 42
KINDS = ("boolean-logcauchy", "boolean-logstable", "free-logcauchy", "free-bessel-moments",
         "logfs-moments", "tucci", "unitary-bm", "lambda-wrap", "dt-matrix", "ecalc-props")

# rough single-core cost of each criterion in seconds, used to plan a budget
CRITERION_COST = {1: 0.5, 2: 0.5, 3: 1.0, 4: 0.1, 5: 0.3, 6: 0.1, 7: 0.5, 8: 6.0,
                  9: 5.0, 10: 0.1, 11: 1.0, 12: 0.1}


# ------------------------------------------------------------------ laws

def _pair(a, r):
    return laws.AdmissiblePair(a, r)


_LAWS = {
    "booleanstable": (lambda a, r, s=1.0: laws.BooleanStable(_pair(a, r), s), (2, 3)),
    "freestable": (lambda a, r: laws.FreeStable(_pair(a, r)), (2, 2)),
    "classicalstable": (lambda a, r: laws.ClassicalStable(_pair(a, r)), (2, 2)),
    "lambda": (lambda a, r: laws.LambdaFreeStable(_pair(a, r)), (2, 2)),
    "cauchy": (lambda b=0.0, g=1.0: laws.Cauchy(b, g), (0, 2)),
    "semicircle": (laws.Semicircle, (0, 0)),
    "mp": (laws.MarchenkoPastur, (0, 0)),
    "dh": (lambda r=1.0: laws.DykemaHaagerup(r), (0, 1)),
    "freebessel": (lambda r, s: laws.FreeBessel(r, s), (2, 2)),
    "nu": (lambda a: laws.NuAlpha(a), (1, 1)),
    "mu": (lambda a, b: laws.MuAlphaBeta(a, b), (2, 2)),
    "point": (lambda a: laws.PointMass(a), (1, 1)),
    "twopoint": (lambda a, b, w=0.5: laws.TwoPoint(a, b, w), (2, 3)),
    "cusp": (lambda a=0.5: laws.CuspLaw(a), (0, 1)),
}


def parse_law(spec: str):
    """Law from ``name[:p1,p2,...]``, e.g. ``freebessel:1,2`` or ``twopoint:2,0.5``.

    Raises
    ------
    DomainError
        For unknown names, wrong parameter counts and parameters outside the
        admissible range (the message states the range).
    """
    name, _, rest = spec.strip().partition(":")
    name = name.lower()
    if name not in _LAWS:
        raise DomainError(f"unknown law {name!r}; known: {', '.join(sorted(_LAWS))}")
    ctor, (lo, hi) = _LAWS[name]
    try:
        params = [float(p) for p in rest.split(",")] if rest.strip() else []
    except ValueError as exc:
        raise DomainError(f"law parameters must be numbers: {rest!r}") from exc
    if not (lo <= len(params) <= hi):
        raise DomainError(f"{name} takes {lo}..{hi} parameters, got {len(params)}")
    return ctor(*params)


def _floats(text):
    return [float(v) for v in str(text).split(",") if v.strip()]


def _interval(text):
    v = _floats(text)
    if len(v) != 2:
        raise DomainError(f"interval must be 'a,b', got {text!r}")
    return (v[0], v[1])


# ------------------------------------------------------------ experiments

def _write_summary(out: Path, name: str, payload: dict) -> None:
    with open(out / name, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=float)


def _decreasing_along(ts, ds):
    order = np.argsort(ts)
    return bool(np.all(np.diff(np.asarray(ds)[order]) > 0))


def run_kind(kind: str, args, out: Path) -> bool:
    """Run one experiment kind; returns whether its pass criteria hold."""
    from . import boolean_small_time as bst
    from . import circle_wrap as cw
    from . import free_small_time as fst
    from . import mellin_moments as mm

    if kind == "boolean-logcauchy":
        law = parse_law(args.law or "twopoint:2,0.5")
        K = _interval(args.K or "0.2,5")
        tab = bst.log_cauchy_limit_check(law, _floats(args.t_list or "1e-2,1e-3"), K)
        bst.write_distance_csv(tab, out / "distances.csv")
        ok = tab.decreasing and tab.distance[int(np.argmin(tab.t))] < args.threshold
        _write_summary(out, "summary.json", {"kind": kind, "t": tab.t, "sup_distance": tab.distance,
                                             **tab.params, "threshold": args.threshold,
                                             "decreasing": tab.decreasing, "passed": ok})
        return ok
    if kind == "boolean-logstable":
        alpha = args.alpha if args.alpha is not None else 0.5
        tab = bst.log_boolean_stable_limit_check(alpha, _interval(args.K_plus or "1.2,4"),
                                                 _interval(args.K_minus or "0.25,0.85"),
                                                 _floats(args.t_list or "1e-2,1e-3"))
        bst.write_distance_csv(tab, out / "distances.csv")
        ok = tab.decreasing and tab.distance[int(np.argmin(tab.t))] < args.threshold
        _write_summary(out, "summary.json", {"kind": kind, "t": tab.t, "sup_distance": tab.distance,
                                             **tab.params, "threshold": args.threshold,
                                             "decreasing": tab.decreasing, "passed": ok})
        return ok
    if kind == "free-logcauchy":
        law = parse_law(args.law or "booleanstable:0.5,1,1")
        ts = _floats(args.t_list or "1e-2,1e-3")
        tab = fst.log_cauchy_free_limit_check(law, ts, _interval(args.K or "0.3,3"))
        bst.write_distance_csv(tab, out / "distances.csv")
        dec = _decreasing_along(tab.t, tab.distance)
        ok = dec and tab.distance[int(np.argmin(tab.t))] < args.threshold
        _write_summary(out, "summary.json", {"kind": kind, **tab.as_dict(), "threshold": args.threshold,
                                             "decreasing": dec, "passed": ok})
        return ok
    if kind == "free-bessel-moments":
        r = args.r if args.r is not None else 1.0
        s = args.s if args.s is not None else 2.0
        tab = mm.free_bessel_table(r, s, args.t or 1e-4, _floats(args.gammas or "1,2,3"))
        mm.write_moment_csv([tab], out / "moments.csv")
        ok = max(tab.rel_err) < args.threshold
        _write_summary(out, "summary.json", {"kind": kind, "r": r, "s": s, "t": tab.t,
                                             "gammas": tab.gammas, "values": tab.values,
                                             "limits": tab.limit_values, "abs_err": tab.abs_err,
                                             "rel_err": tab.rel_err, "threshold": args.threshold,
                                             "passed": ok})
        return ok
    if kind == "logfs-moments":
        alpha = args.alpha if args.alpha is not None else 2.0
        tab = mm.nu_alpha_table(alpha, args.t or 1e-6, _floats(args.gammas or "1,2"))
        mm.write_moment_csv([tab], out / "moments.csv")
        ok = max(tab.rel_err) < args.threshold
        _write_summary(out, "summary.json", {"kind": kind, "alpha": alpha, "t": tab.t,
                                             "gammas": tab.gammas, "values": tab.values,
                                             "limits": tab.limit_values, "rel_err": tab.rel_err,
                                             "threshold": args.threshold, "passed": ok})
        return ok
    if kind == "tucci":
        law = parse_law(args.law or "mp")
        ts = _floats(args.t_list or "8,16,32,64")
        tab = fst.tucci_convergence_check(law, ts)
        bst.write_distance_csv(tab, out / "distances.csv")
        dec = bool(np.all(np.diff(tab.distance) < 0))
        ok = dec and tab.distance[-1] < args.threshold
        _write_summary(out, "summary.json", {"kind": kind, **tab.as_dict(), "threshold": args.threshold,
                                             "decreasing": dec, "passed": ok})
        return ok
    if kind == "unitary-bm":
        ts = _floats(args.t_list or "1e-2,1e-4")
        rows = cw.unitary_bm_limit_check(ts)
        cw.write_unitary_csv(rows, out / "unitary_bm.csv")
        smallest = min(ts)
        ok = all(r.abs_err < args.threshold for r in rows if r.t == smallest)
        _write_summary(out, "summary.json", {"kind": kind, "rows": [[r.t, r.n, r.value, r.limit, r.abs_err]
                                                                    for r in rows],
                                             "threshold": args.threshold, "passed": ok})
        return ok
    if kind == "lambda-wrap":
        alpha = args.alpha if args.alpha is not None else 2.0
        rho = args.rho if args.rho is not None else 0.5
        ts = _floats(args.t_list or "1e-2,1e-4,1e-6")
        res = cw.lambda_voiculescu_convergence(alpha, rho, ts)
        final = dict(res)[min(ts)]
        ok = final < args.threshold
        _write_summary(out, "summary.json", {"kind": kind, "alpha": alpha, "rho": rho,
                                             "t": [r[0] for r in res], "residual": [r[1] for r in res],
                                             "threshold": args.threshold, "passed": ok})
        return ok
    if kind == "dt-matrix":
        return run_randmat(args, out)
    if kind == "ecalc-props":
        return run_props(args, out)
    raise DomainError(f"unknown experiment kind {kind!r}")


def run_randmat(args, out: Path) -> bool:
    from .dt_randmat import (SimConfig, log_spectrum_vs_f1, sample_dt, spectral_moment_check,
                             write_histogram, write_moment_rows)
    cfg = SimConfig(N=args.n, trials=args.trials, seed=args.seed)
    spectra = sample_dt(cfg, args.jobs)
    rows = spectral_moment_check(cfg, spectra)
    hist = log_spectrum_vs_f1(cfg, spectra=spectra)
    write_moment_rows(rows, out / "moments.csv")
    write_histogram(hist, out / "log_spectrum.csv")
    ok = all(r.rel_err < 0.05 for r in rows) and hist.sup_distance < 0.05 and hist.max_log_eig < 1.1
    _write_summary(out, "summary.json", {
        "kind": "dt-matrix", "N": cfg.N, "trials": cfg.trials, "seed": cfg.seed,
        "moments": [[r.n, r.empirical, r.stderr, r.theory] for r in rows],
        "sup_distance": hist.sup_distance, "max_log_eig": hist.max_log_eig,
        "dropped": hist.dropped, "total": hist.total,
        "thresholds": {"moment_rel_err": 0.05, "sup_distance": 0.05, "max_log_eig": 1.1}, "passed": ok})
    return ok


def run_props(args, out: Path) -> bool:
    from .acceptance import ecalc_residuals
    res = ecalc_residuals()
    ok = all(v < 1e-8 for k in ("mp", "b_half") for v in res[k].values()) and res["key_identity"] < 1e-6
    _write_summary(out, "summary.json", {"kind": "ecalc-props", "residuals": res,
                                         "thresholds": {"powers_commutation": 1e-8, "key_identity": 1e-6},
                                         "passed": ok})
    return ok


def run_density(args, out: Path) -> bool:
    from .boolean_small_time import BooleanPowerDensityRequest, boolean_power_density
    from .free_small_time import free_power_density
    law = parse_law(args.law)
    K = _interval(args.K)
    exponent = args.exponent if args.exponent is not None else 1.0
    if args.convolution == "boolean":
        dens = boolean_power_density(BooleanPowerDensityRequest(law, args.t, exponent, K, args.grid))
    else:
        dens = free_power_density(law, args.t, exponent, K, args.grid)
    write_density_csv(dens, out / "density.csv")
    _write_summary(out, "summary.json", {"law": args.law, "t": args.t, "exponent": exponent,
                                         "K": list(K), "convolution": args.convolution,
                                         "mass_on_K": dens.mass})
    return True


# ----------------------------------------------------------------- verify

def _criterion_worker(n, seed):
    kwargs = {"seed": seed} if n == 9 else {}
    return run_criterion(n, **kwargs).as_dict()


def verify_all(budget: float = 300.0, seed: int = DEFAULT_SEED, jobs: int = 1, only=None) -> dict:
    """Run the acceptance criteria within ``budget`` seconds.

    Criteria whose usual cost does not fit in the remaining budget are
    skipped and listed; the report is then flagged incomplete.
    """
    numbers = sorted(only) if only else sorted(CRITERIA)
    start = time.perf_counter()
    results, skipped = [], []
    planned = []
    spent = 0.0
    for n in numbers:
        cost = CRITERION_COST[n]
        if spent + cost > budget:
            skipped.append(n)
            continue
        planned.append(n)
        spent += cost if jobs <= 1 else 0.0
    if jobs > 1 and len(planned) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_criterion_worker, planned, [seed] * len(planned)))
    else:
        for n in planned:
            if time.perf_counter() - start + CRITERION_COST[n] > budget:
                skipped.append(n)
                continue
            results.append(_criterion_worker(n, seed))
    elapsed = time.perf_counter() - start
    return {"budget": budget, "elapsed": elapsed, "seed": seed, "complete": not skipped,
            "skipped": sorted(skipped), "results": results,
            "all_passed": all(r["passed"] for r in results)}


def _result_line(r: dict) -> str:
    failed = [k for k, ok in r["checks"].items() if not ok]
    extra = f" (failed: {', '.join(failed)})" if failed else ""
    return f"{'PASS' if r['passed'] else 'FAIL'} criterion {r['number']}: {r['title']}{extra}"


# ------------------------------------------------------------------ parser

def _load_config(path) -> list:
    """Flat ``key=value`` file turned into ``--key value`` tokens."""
    tokens = []
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise DomainError(f"config line without '=': {raw.strip()!r}")
            tokens += [f"--{key.strip().replace('_', '-')}", value.strip()]
    return tokens


def _env_seed() -> int:
    env = os.environ.get("FREELEVY_SEED")
    return int(env) if env else DEFAULT_SEED


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--config", help="key=value file; command-line flags win")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--seed", type=int, default=_env_seed())

    p = argparse.ArgumentParser(prog="freelevy", description="Free and Boolean Levy process experiments")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("density", parents=[common], help="density of a power of a law on an interval")
    d.add_argument("--law", required=True)
    d.add_argument("--t", type=float, required=True)
    d.add_argument("--exponent", type=float)
    d.add_argument("--K", required=True, help="interval a,b")
    d.add_argument("--convolution", choices=("boolean", "free"), default="boolean")
    d.add_argument("--grid", type=int, default=512)

    for name in ("limit", "run"):
        lp = sub.add_parser(name, parents=[common], help="run one limit experiment")
        lp.add_argument("kind", choices=KINDS)
        lp.add_argument("--law")
        lp.add_argument("--t-list", dest="t_list")
        lp.add_argument("--t", type=float)
        lp.add_argument("--K")
        lp.add_argument("--K-plus", dest="K_plus")
        lp.add_argument("--K-minus", dest="K_minus")
        lp.add_argument("--alpha", type=float)
        lp.add_argument("--rho", type=float)
        lp.add_argument("--r", type=float)
        lp.add_argument("--s", type=float)
        lp.add_argument("--gammas")
        lp.add_argument("--n", type=int, default=400)
        lp.add_argument("--trials", type=int, default=10)
        lp.add_argument("--threshold", type=float, default=None)

    rm = sub.add_parser("randmat", parents=[common], help="upper-triangular Gaussian matrix spectra")
    rm.add_argument("--n", type=int, default=400)
    rm.add_argument("--trials", type=int, default=10)

    sub.add_parser("props", parents=[common], help="eta-calculus identity residuals")

    v = sub.add_parser("verify", parents=[common], help="run the acceptance suite")
    v.add_argument("--budget", type=float, default=300.0)
    v.add_argument("--only", help="comma-separated criterion numbers")
    return p


DEFAULT_THRESHOLDS = {"boolean-logcauchy": 5e-2, "boolean-logstable": 8e-2, "free-logcauchy": 5e-2,
                      "free-bessel-moments": 1e-2, "logfs-moments": 1e-2, "tucci": 5e-2,
                      "unitary-bm": 1e-2, "lambda-wrap": 1e-2}


def _expand_config(argv):
    argv = list(argv)
    if "--config" in argv:
        i = argv.index("--config")
        if i + 1 >= len(argv):
            raise DomainError("--config needs a path")
        extra = _load_config(argv[i + 1])
        # config values go right after the subcommand so later flags override them
        pos = 2 if len(argv) > 1 and argv[0] in ("limit", "run") else 1
        argv = argv[:pos] + extra + argv[pos:]
    return argv


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = build_parser().parse_args(_expand_config(argv))
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "verify":
            only = [int(v) for v in args.only.split(",")] if args.only else None
            report = verify_all(args.budget, args.seed, args.jobs, only)
            for r in report["results"]:
                print(_result_line(r))
            for n in report["skipped"]:
                print(f"SKIP criterion {n}: not enough budget")
            _write_summary(out, "verify_report.json", report)
            return 0 if report["all_passed"] else 1
        if args.command in ("limit", "run"):
            if args.threshold is None:
                args.threshold = DEFAULT_THRESHOLDS.get(args.kind, math.inf)
            ok = run_kind(args.kind, args, out)
        elif args.command == "randmat":
            ok = run_randmat(args, out)
        elif args.command == "props":
            ok = run_props(args, out)
        else:
            ok = run_density(args, out)
        print("PASS" if ok else "FAIL")
        return 0 if ok else 1
    except (FreeLevyError, ValueError, ArithmeticError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
