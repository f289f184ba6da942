"""Command line front end.

Every command writes one JSON document (or CSV for sweeps) whose header
records the version, seed and full parameters. ``--no-timestamp`` drops the
only non-reproducible field. Exit codes: 0 success, 1 violated proven
inequality, 2 usage error, 3 capability error.
"""
import argparse
import datetime
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, entropy, gradients, inequalities as ineqs, io, quotient, suite, symgroup
from .errors import ArgumentError, CapabilityError, InequalityViolation, NumericalError
from .gradients import GradientTermConfig
from .norms import OrliczGauge, TargetNorm, lp_norm, orlicz_norm
from .rng import make_rng
from .sampling import random_function, random_perm_function
from .search import SearchConfig, default_threads, extremize

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_CAPABILITY = 0, 1, 2, 3

# proven with constant 1 for scalar p = 2; everything else is an empirical ratio
_PROVEN_UNIT = {("poincare-lp", 2.0), ("ivv-poincare", 2.0)}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ArgumentError(message)


def _target(value):
    return math.inf if value in ("inf", "infinity") else float(value)


def _add_common(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o", default="-")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--no-timestamp", action="store_true")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: CUBELSI_THREADS or 1)")


def _add_function(p, d=True):
    p.add_argument("--function", help="function file; otherwise a random function is drawn")
    p.add_argument("--n", type=int, default=4)
    if d:
        p.add_argument("--d", type=int, default=1)
    p.add_argument("--q", type=_target, default=2.0, help="target l_q norm (number or inf)")


def build_parser():
    ap = _Parser(prog="cubelsi", description="Vector-valued log-Sobolev inequalities on the Hamming cube")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("norm", help="L_p(log L)^alpha norm of a function")
    _add_common(p); _add_function(p)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--alpha", type=float, default=None, help="default p/2")

    p = sub.add_parser("entropy", help="entropies and the Orlicz/entropy comparison")
    _add_common(p); _add_function(p)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--alpha", type=float, default=1.0)

    p = sub.add_parser("gradient", help="Rademacher gradient term G_p")
    _add_common(p); _add_function(p)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--mode", choices=("exact", "monte-carlo"), default="exact")
    p.add_argument("--samples", type=int, default=4096)

    p = sub.add_parser("verify", help="evaluate an inequality on random or given functions")
    _add_common(p); _add_function(p)
    p.add_argument("--ineq", required=True)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--q-beckner", type=float, default=None)
    p.add_argument("--random", type=int, default=100, help="number of random functions")

    p = sub.add_parser("extremize", help="search for the largest ratio")
    _add_common(p)
    p.add_argument("--ineq", required=True)
    p.add_argument("--n", type=int, nargs="+", default=[3])
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--q", type=_target, default=2.0)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--budget", type=int, default=10_000)
    p.add_argument("--witness-dir", default=None)

    p = sub.add_parser("quotient", help="distortion lower bound for a cube quotient")
    _add_common(p)
    p.add_argument("--relation", default="diag",
                   help="diag | antipodal | coord | random | path to a relation file")
    p.add_argument("--coords", type=int, nargs="*", default=[1], help="directions for 'coord'")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=None, help="default p/2")
    p.add_argument("--type-const", type=float, default=1.0)
    p.add_argument("--mode", choices=("auto", "product", "classes"), default="auto")

    p = sub.add_parser("symgroup", help="inequalities on the symmetric group")
    _add_common(p)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--random", type=int, default=100)
    p.add_argument("--function", default=None)

    p = sub.add_parser("semigroup", help="heat semigroup gradient bound at p = 2")
    _add_common(p)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--t", type=float, nargs="+", default=list(suite.RIESZ_TS))

    p = sub.add_parser("suite", help="run the verification battery")
    _add_common(p)
    p.add_argument("--quick", action="store_true")
    p.add_argument("--only", nargs="*", default=None)
    return ap


def _header(args, params):
    h = {"command": args.command, "version": __version__, "seed": args.seed, "params": params}
    if not args.no_timestamp:
        h["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    return h


def _params(args, *names):
    return {k: getattr(args, k.replace("-", "_")) for k in names}


def _load_or_draw(args, key):
    if args.function:
        return io.load_function(args.function)
    return random_function(make_rng(args.seed, key), args.n, getattr(args, "d", 1))


def _emit(args, doc, rows=None):
    if args.format == "csv":
        if rows is None:
            raise ArgumentError(f"csv output is only available for sweeps, not '{args.command}'")
        if args.output == "-":
            import csv as _csv
            fields = sorted({k for r in rows for k in r})
            w = _csv.DictWriter(sys.stdout, fieldnames=fields, lineterminator="\n")
            w.writeheader()
            for r in rows:
                w.writerow(io._plain(r))
        else:
            io.write_csv(args.output, rows)
        return
    text = io.to_json(doc)
    if args.output == "-":
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)


def cmd_norm(args):
    f = _load_or_draw(args, "norm")
    tn = TargetNorm(args.q)
    alpha = args.p / 2 if args.alpha is None else args.alpha
    res = {"orlicz_norm": orlicz_norm(f, OrliczGauge(args.p, alpha), tn, tol=1e-12),
           "lp_norm": lp_norm(f, args.p, tn), "n": f.n, "d": f.d}
    _emit(args, {"header": _header(args, dict(_params(args, "n", "p", "q", "function"), alpha=alpha)),
                 "result": res})
    return EXIT_OK


def cmd_entropy(args):
    f = _load_or_draw(args, "entropy")
    tn = TargetNorm(args.q)
    a = gradients.norm_function(f, tn).scalar()
    chk = entropy.check_orlicz_entropy_equivalence(f, args.p, args.alpha, tn)
    consts = entropy.entropy_bounds_constants(args.p, args.alpha)
    res = {"ent_norm_sq": entropy.ent(a ** 2), "ent_alpha": chk.ent_alpha, "lp_p": chk.lp_p,
           "orlicz_p": chk.middle, "lower": chk.lower, "upper": chk.upper, "holds": chk.holds,
           "constants": {"c_alpha": consts.c_alpha, "K_alpha": consts.K_alpha,
                         "C_alpha": consts.C_alpha, "B": consts.B}}
    _emit(args, {"header": _header(args, _params(args, "n", "d", "p", "alpha", "q", "function")),
                 "result": res})
    return EXIT_OK if chk.holds else EXIT_VIOLATION


def cmd_gradient(args):
    f = _load_or_draw(args, "gradient")
    cfg = GradientTermConfig(args.mode, args.samples, args.seed)
    est = gradients.estimate_rademacher_gradient(f, args.p, TargetNorm(args.q), cfg)
    res = {"G_p": est.value, "stderr": est.stderr, "samples": est.samples}
    _emit(args, {"header": _header(args, _params(args, "n", "d", "p", "q", "mode", "samples", "function")),
                 "result": res})
    return EXIT_OK


def _verify_one(args, k):
    if args.function:
        f = io.load_function(args.function)
    else:
        f = random_function(make_rng(args.seed, "verify", args.ineq, k), args.n, args.d)
    return ineqs.evaluate(args.ineq, f, TargetNorm(args.q), p=args.p, alpha=args.alpha,
                          q=args.q_beckner, t=args.t)


def cmd_verify(args):
    ineq = ineqs.InequalityId.parse(args.ineq)
    count = 1 if args.function else args.random
    if count < 1:
        raise ArgumentError("--random must be positive")
    threads = args.threads or default_threads()
    reports = suite._map(lambda k: _verify_one(args, k), range(count), threads)
    ratios = [r.ratio for r in reports]
    worst = int(np.argmax(ratios))
    proven = (ineq.value, float(args.p)) in _PROVEN_UNIT and (args.d == 1 or args.q == 2.0)
    violations = sum(1 for r in ratios if r > 1 + 1e-9) if proven else 0
    res = {"id": ineq.value, "count": count, "max_ratio": ratios[worst], "mean_ratio": float(np.mean(ratios)),
           "proven_unit_constant": proven, "violations": violations,
           "worst": io.report_record(reports[worst], seed=args.seed)}
    params = _params(args, "ineq", "n", "d", "p", "q", "alpha", "t", "q_beckner", "random", "function")
    rows = [dict(io.report_record(r, seed=args.seed), trial=k) for k, r in enumerate(reports)]
    for row in rows:
        row.pop("params")
        row.pop("witness_path")
    _emit(args, {"header": _header(args, params), "result": res}, rows)
    return EXIT_VIOLATION if violations else EXIT_OK


def cmd_extremize(args):
    threads = args.threads or default_threads()
    cfg = SearchConfig(budget=args.budget, seed=args.seed, threads=threads)
    tn = TargetNorm(args.q)
    out, rows, prev = [], [], None
    for n in sorted(args.n):
        warm = () if prev is None else (prev.report.witness.values,)
        prev = extremize(args.ineq, n, args.d, tn, cfg, warm_starts=warm, p=args.p)
        wpath = None
        if args.witness_dir:
            wdir = Path(args.witness_dir)
            wdir.mkdir(parents=True, exist_ok=True)
            wpath = io.save_function(prev.report.witness, wdir / f"{prev.report.id.value}-n{n}-s{args.seed}.json")
        rec = io.report_record(prev.report, seed=args.seed, witness_path=wpath)
        rec["best_restart"] = prev.best_restart
        rec["evaluations"] = prev.evaluations
        out.append(rec)
        rows.append({"id": rec["id"], "n": n, "d": args.d, "seed": args.seed, "ratio": rec["ratio"],
                     "lhs": rec["lhs"], "rhs_unit": rec["rhs_unit"]})
    params = _params(args, "ineq", "n", "d", "p", "q", "budget")
    _emit(args, {"header": _header(args, params), "result": out}, rows)
    return EXIT_OK


def _relation(args):
    name = args.relation
    if name in ("diag", "diagonal"):
        return quotient.diagonal_relation(args.n)
    if name == "antipodal":
        return quotient.antipodal_relation(args.n)
    if name == "coord":
        return quotient.coordinate_quotient(args.n, args.coords)
    if name == "random":
        return quotient.random_relation(make_rng(args.seed, "quotient", args.n), args.n)
    path = Path(name)
    if not path.exists():
        raise ArgumentError(f"unknown relation {name!r}")
    return io.load_relation(path)


def cmd_quotient(args):
    rel = _relation(args)
    if args.mode == "product" and rel.n > quotient.MAX_N_PRODUCT:
        raise CapabilityError(f"product-space mode supports n <= {quotient.MAX_N_PRODUCT}")
    b = quotient.distortion_lower_bound(rel, args.p, args.alpha, args.type_const, args.mode)
    res = dict(b.as_dict(), n=rel.n, classes=rel.m,
               boundary_measures=quotient.boundary_measures(rel))
    params = _params(args, "relation", "n", "p", "alpha", "type_const", "mode")
    if args.relation == "coord":
        params["coords"] = args.coords
    _emit(args, {"header": _header(args, params), "result": res})
    return EXIT_OK


def cmd_symgroup(args):
    if args.function:
        fs = [io.load_perm_function(args.function)]
    else:
        fs = [random_perm_function(make_rng(args.seed, "symgroup", args.n, k), args.n, args.d)
              for k in range(args.random)]
    rows = []
    for k, f in enumerate(fs):
        row = {"trial": k, "dirichlet": symgroup.transposition_dirichlet(f),
               "kn": symgroup.evaluate_kn(f).ratio, "sym_lsi": symgroup.evaluate_sym_lsi(f).ratio}
        if f.d == 1:
            row["dsc"] = symgroup.evaluate_dsc(f).ratio
        rows.append(row)
    viol = sum(1 for r in rows if r["kn"] > 1 + 1e-9 or r.get("dsc", 0.0) > 1 + 1e-9)
    res = {"count": len(rows), "violations": viol,
           "max": {key: max(r[key] for r in rows) for key in ("kn", "sym_lsi", "dsc") if key in rows[0]},
           "pipeline_constant": symgroup.sym_lsi_pipeline_constant(fs[0].n)}
    _emit(args, {"header": _header(args, _params(args, "n", "d", "random", "function")), "result": res}, rows)
    return EXIT_VIOLATION if viol else EXIT_OK


def cmd_semigroup(args):
    rows = []
    for t in args.t:
        r = ineqs.riesz_p2_bound(t, args.n, seed=args.seed)
        rows.append({"t": t, "n": r.n, "closed_form": r.closed_form, "power_iteration": r.power_iteration,
                     "product": r.product, "iterations": r.iterations})
    _emit(args, {"header": _header(args, _params(args, "n", "t")), "result": rows}, rows)
    return EXIT_OK


def cmd_suite(args):
    threads = args.threads or default_threads()
    results = suite.run_suite(args.seed, args.quick, threads, args.only)
    ok = all(r.ok for r in results)
    doc = {"header": _header(args, _params(args, "quick", "only")),
           "result": {"ok": ok, "checks": [r.as_dict() for r in results]}}
    rows = [{k: v for k, v in r.as_dict().items() if k != "details"} for r in results]
    _emit(args, doc, rows)
    return EXIT_OK if ok else EXIT_VIOLATION


COMMANDS = {"norm": cmd_norm, "entropy": cmd_entropy, "gradient": cmd_gradient, "verify": cmd_verify,
            "extremize": cmd_extremize, "quotient": cmd_quotient, "symgroup": cmd_symgroup,
            "semigroup": cmd_semigroup, "suite": cmd_suite}


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except (ArgumentError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except CapabilityError as exc:
        print(f"capability error: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY
    except InequalityViolation as exc:
        print(f"violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
