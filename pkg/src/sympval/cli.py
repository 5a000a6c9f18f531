"""Command-line entry point.

Tables are CSV with one leading "# {json}" line holding the full config and
seed. Pair indices on the command line are 1-based.
"""

import argparse
import csv
import io
import json
import math
import sys
import time

import numpy as np

from .errors import FormatError, SympvalError

EXIT_OK, EXIT_INVALID, EXIT_CAPACITY = 0, 2, 3


def _float_list(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _interval(text):
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(f"interval needs i,j,a,b, got {text!r}")
    try:
        return int(parts[0]), int(parts[1]), float(parts[2]), float(parts[3])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad interval {text!r}") from None


def _intervals(args):
    if args.interval_all is not None and args.interval:
        raise FormatError("use either --interval or --interval-all")
    if args.interval_all is not None:
        return tuple(args.interval_all)
    if not args.interval:
        raise FormatError("one of --interval or --interval-all is required")
    out = {}
    for i, j, a, b in args.interval:
        if not 1 <= i < j <= args.k:
            raise FormatError(f"interval pair ({i},{j}) is outside 1 <= i < j <= k")
        out[(i - 1, j - 1)] = (a, b)
    return out


def _json_arg(text):
    text = text.strip()
    if text.startswith("{") or text.startswith("["):
        return json.loads(text)
    with open(text) as fh:
        return json.load(fh)


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (tuple, list)):
        return " ".join(_cell(x) for x in v)
    return str(v)


def render_csv(config, rows, columns=None):
    if columns is None:
        columns = []
        for r in rows:
            columns.extend(c for c in r if c not in columns)
    buf = io.StringIO()
    buf.write("# " + json.dumps(config, sort_keys=True, default=str) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def _emit(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _config(args):
    cfg = {k: v for k, v in vars(args).items() if k not in ("func", "out")}
    return cfg


def _set_threads(threads):
    if threads is None:
        return
    import numba

    if not 1 <= threads <= numba.config.NUMBA_NUM_THREADS:
        raise FormatError(f"--threads must be in [1, {numba.config.NUMBA_NUM_THREADS}]")
    numba.set_num_threads(threads)


def cmd_count(args):
    from .enumeration import count_tuples, main_term
    from .forms import form_from_json
    from .volume import estimate_cg

    form = form_from_json(args.form)
    iv = _intervals(args)
    _set_threads(args.threads)
    cg = args.cg
    if cg is None and args.k >= 2:
        cg = estimate_cg(form, args.k, args.cg_samples, rng=args.seed).value
    rows = []
    for T in args.T_list:
        t0 = time.perf_counter()
        c = count_tuples(form, args.k, T, iv, cls=args.cls, v0=args.v0, modulus=args.modulus, threads=args.threads)
        el = time.perf_counter() - t0
        mt = main_term(cg, args.k, iv, T, form.n) if cg is not None else None
        rows.append({"T": T, "count": c, "main_term": mt, "ratio": c / mt if mt else None,
                     "elapsed_s": round(el, 3) if args.timing else None})
    _emit(render_csv(_config(args), rows, ["T", "count", "main_term", "ratio", "elapsed_s"]), args.out)
    return EXIT_OK


def cmd_volume(args):
    from .forms import form_from_json
    from .volume import direct_volume, estimate_cg, main_volume

    form = form_from_json(args.form)
    iv = _intervals(args)
    rng = np.random.default_rng(args.seed)
    cg = None
    if args.mode in ("cg", "both"):
        cg = estimate_cg(form, args.k, args.samples, rng=rng)
    rows = []
    for T in args.T_list:
        row = {"T": T, "cg": cg.value if cg else None, "cg_stderr": cg.stderr if cg else None}
        row["main_term"] = main_volume(cg.value, form.n, args.k, iv, T) if cg else None
        if args.mode in ("direct", "both"):
            est = direct_volume(form, args.k, iv, T, args.samples, rng)
            row["direct"], row["direct_stderr"] = est.value, est.stderr
            if cg:
                row["ratio"] = est.value / row["main_term"]
        rows.append(row)
    cols = ["T", "cg", "cg_stderr", "main_term", "direct", "direct_stderr", "ratio"]
    _emit(render_csv(_config(args), rows, cols), args.out)
    return EXIT_OK


def cmd_rogers(args):
    from .rogers import congruence_admissible, enum_rref_terms, primitive_admissible_search, weight_cd

    rows = []
    for q in range(1, args.q_max + 1):
        for t in enum_rref_terms(args.k, args.r, q, args.entry_bound):
            row = {"r": t.r, "q": q, "D": [x for row in t.D for x in row]}
            if args.emit in ("weights", "admissibility"):
                w = weight_cd(t.D, q, args.d)
                row.update(index=w.index, cD_num=1, cD_den_exponent=args.d)
            if args.emit == "admissibility":
                if args.modulus is not None:
                    row["cong_admissible"] = congruence_admissible(t.D, q, args.modulus).admissible
                cert = primitive_admissible_search(t.D, q, args.d, args.height_bound)
                row["prim_witness"] = "unknown" if cert is None else [x for v in cert.x for x in v]
            rows.append(row)
    cols = ["r", "q", "D", "index", "cD_num", "cD_den_exponent", "cong_admissible", "prim_witness"]
    _emit(render_csv(_config(args), rows, cols), args.out)
    return EXIT_OK


def cmd_sample(args):
    from .randlat import sample_transform
    from .regions import region_from_json

    region = region_from_json(_json_arg(args.region_json), k=args.k)
    s = sample_transform(args.dim, args.mode, args.trials, region, args.k, args.cls, args.v0, args.modulus,
                         rng=args.seed)
    rows = [{"trial": i, "value": int(v)} for i, v in enumerate(s.values)]
    var = float(s.values.var(ddof=1)) if args.trials > 1 else 0.0
    rows += [{"trial": "mean", "value": s.mean}, {"trial": "var", "value": var},
             {"trial": "stderr", "value": s.stderr}]
    _emit(render_csv(_config(args), rows, ["trial", "value"]), args.out)
    return EXIT_OK


def _parse_targets(obj):
    out = {}
    for key, v in obj.items():
        parts = key.strip().strip("()").split(",")
        if len(parts) != 2:
            raise FormatError(f"target key {key!r} is not of the form (i,j)")
        i, j = int(parts[0]), int(parts[1])
        if not 1 <= i < j:
            raise FormatError(f"target key {key!r} needs 1 <= i < j")
        out[(i - 1, j - 1)] = float(v)
    return out


def cmd_density(args):
    from .density import integer_approx_search
    from .forms import form_from_json, pair_values

    form = form_from_json(args.form)
    targets = _parse_targets(_json_arg(args.targets))
    r = integer_approx_search(form, targets, args.eps, args.budget, rng=args.seed)
    report = {"config": _config(args), "status": r.status, "nodes": r.nodes,
              "witness": r.witness, "residual": None if math.isinf(r.residual) else r.residual,
              "best_residual": None if math.isinf(r.best_residual) else r.best_residual}
    if r.witness is not None:
        P = pair_values(form, r.witness)
        report["residuals"] = {f"({i + 1},{j + 1})": float(abs(P[i, j] - v)) for (i, j), v in sorted(targets.items())}
    _emit(json.dumps(report, indent=2, sort_keys=True) + "\n", args.out)
    return EXIT_OK if r.found else EXIT_CAPACITY


def cmd_lie(args):
    from . import lie

    want = set(("roots", "weights", "brackets", "invariance", "irreducible")) if args.checks == "all" else {args.checks}
    report = {"config": _config(args)}
    ok = True
    if want & {"roots", "weights"}:
        dec = lie.verify_decomposition(args.n)
        spaces = set()
        if "roots" in want:
            spaces |= {"sp_root", "sp", "sl"}
        if "weights" in want:
            spaces |= {"W_weight", "W_zero", "W", "sl"}
        fails = [f for f in dec.failures if f["space"] in spaces]
        report["decomposition"] = {"ok": not fails, "failures": fails, "counts": dec.counts}
        ok &= not fails
    if "brackets" in want:
        ids = lie.bracket_identities(args.n)
        bad = [{"name": i.name, "indices": list(i.indices)} for i in ids if not i.holds]
        report["brackets"] = {"checked": len(ids), "failures": bad}
        ok &= not bad
    if want & {"invariance", "irreducible"}:
        irr = lie.verify_irreducible(args.n)
        if "invariance" in want:
            report["invariance"] = {"ok": irr.invariant, "rank": irr.invariance_rank}
            ok &= irr.invariant
        if "irreducible" in want:
            report["irreducible"] = {"ok": not irr.failures, "reached": irr.reached, "failures": irr.failures}
            ok &= not irr.failures
    report["ok"] = ok
    _emit(json.dumps(report, indent=2, sort_keys=True, default=str) + "\n", args.out)
    return EXIT_OK


RECIPE_ARGS = {
    "growth": lambda a: {"threads": a.threads},
    "volume": lambda a: {"seed": a.seed},
    "closed-form": lambda a: {"seed": a.seed},
    "primitive": lambda a: {"seed": a.seed, "threads": a.threads},
    "congruence": lambda a: {"seed": a.seed, "threads": a.threads},
    "rogers": lambda a: {"seed": a.seed},
    "siegel2d": lambda a: {"seed": a.seed},
    "discrepancy": lambda a: {"seed": a.seed},
    "window": lambda a: {},
    "density": lambda a: {"seed": a.seed},
    "lie": lambda a: {"seed": a.seed},
    "enumeration": lambda a: {"seed": a.seed},
}


def cmd_recipe(args):
    from .experiments import RECIPES

    _set_threads(args.threads)
    res = RECIPES[args.name](**RECIPE_ARGS[args.name](args))
    for line in res.lines:
        sys.stderr.write(line + "\n")
    sys.stderr.write(f"{res.name}: {'PASS' if res.passed else 'FAIL'}\n")
    cfg = dict(_config(args), verdict="PASS" if res.passed else "FAIL")
    _emit(render_csv(cfg, res.rows), args.out)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="sympval", description="Values of symplectic forms on integer tuples.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=True):
        sp.add_argument("--out", default=None, help="output path (stdout when omitted)")
        if seed:
            sp.add_argument("--seed", type=int, default=0)

    def intervals(sp):
        sp.add_argument("--k", type=int, required=True)
        sp.add_argument("--interval", type=_interval, action="append", default=[], metavar="i,j,a,b")
        sp.add_argument("--interval-all", type=float, nargs=2, default=None, metavar=("A", "B"))
        sp.add_argument("--T-list", type=_float_list, required=True)

    c = sub.add_parser("count", help="count integer tuples")
    c.add_argument("--form", required=True)
    intervals(c)
    c.add_argument("--class", dest="cls", choices=["all", "primitive", "congruence"], default="all")
    c.add_argument("--v0", type=_int_list, default=None)
    c.add_argument("--modulus", type=int, default=None)
    c.add_argument("--threads", type=int, default=None)
    c.add_argument("--cg", type=float, default=None, help="main-term coefficient; estimated when omitted")
    c.add_argument("--cg-samples", type=int, default=10 ** 6)
    c.add_argument("--timing", action="store_true", help="fill elapsed_s (breaks byte reproducibility)")
    common(c)
    c.set_defaults(func=cmd_count)

    v = sub.add_parser("volume", help="cone coefficient and direct volumes")
    v.add_argument("--form", required=True)
    intervals(v)
    v.add_argument("--samples", type=int, default=10 ** 6)
    v.add_argument("--mode", choices=["cg", "direct", "both"], default="both")
    common(v)
    v.set_defaults(func=cmd_volume)

    r = sub.add_parser("rogers", help="canonical RREF terms and weights")
    r.add_argument("--k", type=int, required=True)
    r.add_argument("--r", type=int, required=True)
    r.add_argument("--q-max", type=int, default=4)
    r.add_argument("--entry-bound", type=int, default=4)
    r.add_argument("--d", type=int, default=4)
    r.add_argument("--modulus", type=int, default=None)
    r.add_argument("--height-bound", type=int, default=3)
    r.add_argument("--emit", choices=["terms", "weights", "admissibility"], default="weights")
    common(r, seed=False)
    r.set_defaults(func=cmd_rogers)

    s = sub.add_parser("sample", help="Siegel transforms on random lattices")
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--mode", choices=["exact2d", "siegel"], default="exact2d")
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--region-json", required=True)
    s.add_argument("--k", type=int, default=1)
    s.add_argument("--class", dest="cls", choices=["all", "primitive", "congruence"], default="all")
    s.add_argument("--v0", type=_int_list, default=None)
    s.add_argument("--modulus", type=int, default=None)
    common(s)
    s.set_defaults(func=cmd_sample)

    d = sub.add_parser("density", help="integer tuples approximating target values")
    d.add_argument("--form", required=True)
    d.add_argument("--targets", required=True, help='JSON such as {"(1,2)": 0.5}, or a path')
    d.add_argument("--eps", type=float, required=True)
    d.add_argument("--budget", type=int, default=10 ** 6)
    common(d)
    d.set_defaults(func=cmd_density)

    lp = sub.add_parser("lie", help="exact checks on sp(2n) inside sl(2n)")
    lp.add_argument("--n", type=int, required=True)
    lp.add_argument("--checks", choices=["roots", "weights", "brackets", "invariance", "irreducible", "all"],
                    default="all")
    common(lp, seed=False)
    lp.set_defaults(func=cmd_lie)

    rc = sub.add_parser("recipe", help="canned experiments")
    rc.add_argument("name", choices=sorted(RECIPE_ARGS))
    rc.add_argument("--threads", type=int, default=None)
    common(rc)
    rc.set_defaults(func=cmd_recipe)
    return p


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INVALID if e.code else EXIT_OK
    try:
        return args.func(args)
    except SympvalError as e:
        sys.stderr.write(f"error: {e}\n")
        return e.exit_code
    except (ValueError, KeyError, json.JSONDecodeError, OSError) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INVALID


def main():
    sys.exit(run())
