"""dimspec command line: generate samples, estimate dimensions, sweep spectra,
compare sweeps with closed forms and run the inequality checks.

Exit codes: 0 pass, 1 comparison failed, 2 usage or input error, 3 no
admissible scales.
"""

import argparse
import csv
import io
import json
import math
import re
import sys

from . import estimator as est
from . import generators as gen
from . import oracle
from .geometry import (MoranParams, ScaleSchedule, SequenceDescriptor, SpiralParams, ThetaGrid,
                       Winding, default_schedule)
from .pointfile import PointFileError, read_points, write_points

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_SCALES = 0, 1, 2, 3
SWEEP_HEADER = ["theta", "kind", "value", "slope_fit", "admissible_rungs", "witness_R"]
COMPARE_HEADER = ["theta", "estimated", "oracle", "abs_error", "within_band"]


class InputError(Exception):
    pass


def _num(v):
    """Shortest round-trip text for finite floats, empty for nan."""
    if isinstance(v, float) and not math.isfinite(v):
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _json_num(v):
    return v if math.isfinite(v) else None


def _emit(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from None


def _load(path):
    try:
        return read_points(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    except PointFileError as exc:
        raise InputError(f"{path}: {exc}") from None


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise InputError(f"family {args.family} needs {flags}")


def _generate(args):
    fam = args.family
    if fam in ("power", "exp_sqrt", "exponential"):
        _need(args, "delta")
        if fam == "power":
            _need(args, "lam")
            desc = SequenceDescriptor("power", args.lam)
        elif fam == "exponential":
            _need(args, "c")
            desc = SequenceDescriptor("exponential", args.c)
        else:
            desc = SequenceDescriptor("exp_sqrt")
        return gen.gen_sequence(desc, args.delta, compact=args.compact)
    if fam == "interval":
        _need(args, "delta")
        return gen.gen_interval(args.delta)
    if fam == "spiral":
        _need(args, "delta", "winding", "param")
        w = Winding(args.winding, args.param)
        a_max = args.alpha_max if args.alpha_max is not None else gen.spiral_alpha_max(w, args.delta)
        return gen.gen_spiral(SpiralParams(w, a_max), args.delta, compact=args.compact)
    if fam == "moran":
        _need(args, "L", "alpha", "beta", "depth")
        return gen.gen_moran(MoranParams(args.L, args.alpha, args.beta, args.depth))
    if fam in ("product", "union"):
        _need(args, "input", "input2")
        a, b = _load(args.input), _load(args.input2)
        return gen.gen_product(a, b) if fam == "product" else gen.gen_union(a, b)
    if fam == "holder":
        _need(args, "input", "exponent")
        return gen.gen_holder_image(_load(args.input), args.exponent)
    if fam == "shift":
        _need(args, "input", "offset")
        return gen.translate(_load(args.input), args.offset)
    raise InputError(f"unknown family {fam}")


def cmd_generate(args):
    F = _generate(args)
    out = args.output or f"{args.family}.pts"
    try:
        write_points(F, out)
    except OSError as exc:
        raise InputError(f"cannot write {out}: {exc}") from None
    print(f"points={len(F)} delta={F.resolution:.17g} diameter={F.diameter:.17g} file={out}")
    return EXIT_OK


_MORAN_LABEL = re.compile(r"moran:L=([^:]+):alpha=([^:]+):beta=([^:]+):depth=(\d+)")


def schedule_for(F, args):
    """Schedule from the command-line overrides; ``--schedule moran`` reads the label."""
    if args.schedule == "moran":
        m = _MORAN_LABEL.search(F.label)
        if not m:
            raise InputError("--schedule moran needs a Moran sample (label moran:L=...)")
        p = MoranParams(float(m[1]), float(m[2]), float(m[3]), int(m[4]))
        return est.moran_schedule(p, F, args.tail_fraction or 0.5)
    base = default_schedule(F, rho=args.rho or 2 ** -0.5,
                            tail_fraction=args.tail_fraction or 0.5,
                            floor_factor=args.floor_factor or 10.0)
    r_max = args.r_max or base.r_max
    count = args.count
    if count is None:
        floor = base.floor_factor * F.resolution
        count = base.count if args.r_max is None else max(
            1, int(math.floor(math.log(floor / r_max) / math.log(base.rho) + 1e-9)) + 1)
    return ScaleSchedule(base.rho, r_max, count, base.tail_fraction,
                         floor_factor=base.floor_factor)


def _grid(args):
    try:
        return ThetaGrid.arange(args.start, args.stop, args.step)
    except ValueError as exc:
        raise InputError(f"bad theta grid: {exc}") from None


def cmd_estimate(args):
    F = _load(args.input)
    sched = schedule_for(F, args)
    what = args.what
    if what in ("assouad_spectrum", "lower_spectrum"):
        if args.theta is None:
            raise InputError(f"{what} needs --theta")
        fn = est.assouad_spectrum_at if what == "assouad_spectrum" else est.lower_spectrum_at
        res = fn(F, args.theta, sched)
        record = {"what": what, "theta": res.theta, "value": res.value,
                  "slope_fit": _json_num(res.slope_fit), "admissible_rungs": res.admissible_rungs,
                  "witness_R": _json_num(res.witness_R),
                  "trace": [{"R": t.R, "r": t.r, "count": t.count,
                             "local_exponent": t.local_exponent} for t in res.trace]}
    else:
        fn = {"upper_box": est.upper_box_dim, "lower_box": est.lower_box_dim,
              "assouad_dim": est.assouad_dim_estimate, "lower_dim": est.lower_dim_estimate}[what]
        res = fn(F, sched)
        record = {"what": what, "value": res.value, "admissible": res.admissible,
                  "trace": [{"R": t.R, "r": t.r, "count": t.count,
                             "local_exponent": t.local_exponent} for t in res.trace]}
    if args.format == "json":
        text = json.dumps(record, indent=2) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["what", "theta", "value"])
        w.writerow([what, _num(record.get("theta", float("nan"))), _num(record["value"])])
        text = buf.getvalue()
    _emit(text, args.output)
    return EXIT_OK


def sweep_rows(F, grid, sched, kinds, skipped):
    rows = []
    results = {}
    for kind in kinds:
        try:
            results[kind] = {e.theta: e for e in est.spectrum_sweep(F, grid, sched, kind, skipped)}
        except est.TooFewScales:
            results[kind] = {}
    for theta in grid:
        for kind in kinds:
            e = results[kind].get(theta)
            if e is not None:
                rows.append([_num(e.theta), kind, _num(e.value), _num(e.slope_fit),
                             str(e.admissible_rungs), _num(e.witness_R)])
    return rows


def cmd_sweep(args):
    F = _load(args.input)
    sched = schedule_for(F, args)
    kinds = [k for k in ("assouad", "lower") if k in args.kinds.split(",")]
    if not kinds:
        raise InputError("--kinds must name assouad and/or lower")
    skipped = []
    rows = sweep_rows(F, _grid(args), sched, kinds, skipped)
    if not rows:
        for theta, msg in skipped:
            print(f"skipped theta={theta:g}: {msg}", file=sys.stderr)
        return EXIT_SCALES
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    w.writerows(rows)
    _emit(buf.getvalue(), args.output)
    return EXIT_OK


def _curve(args):
    fam = args.oracle
    try:
        if fam == "f_lambda":
            _need_oracle(args, "lam")
            return oracle.OracleCurve("f_lambda", (args.lam,))
        if fam in ("sequence", "spiral", "constant"):
            _need_oracle(args, "B")
            return oracle.OracleCurve(fam, (args.B,))
        if fam == "moran":
            _need_oracle(args, "alpha", "beta")
            return oracle.OracleCurve("moran", (args.alpha, args.beta))
    except ValueError as exc:
        raise InputError(str(exc)) from None
    raise InputError(f"unknown oracle family {fam}")


def _need_oracle(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise InputError(f"oracle {args.oracle} needs " + ", ".join("--" + n for n in missing))


def _read_sweep(path, kind):
    try:
        with open(path, encoding="ascii") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != SWEEP_HEADER:
                raise InputError(f"{path} is not a sweep file")
            rows = [r for r in reader if r["kind"] == kind]
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    if not rows:
        raise InputError(f"{path} has no {kind} rows")
    try:
        return [(float(r["theta"]), float(r["value"])) for r in rows]
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


def cmd_compare(args):
    curve = _curve(args)
    rows = _read_sweep(args.input, args.kind)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COMPARE_HEADER)
    n_ok = 0
    worst = 0.0
    for theta, value in rows:
        try:
            ref = curve(theta) if args.kind == "assouad" else curve.lower(theta)
        except ValueError as exc:
            raise InputError(f"theta={theta:g}: {exc}") from None
        err = abs(value - ref)
        ok = err <= args.band
        n_ok += ok
        worst = max(worst, err)
        w.writerow([_num(theta), _num(value), _num(ref), _num(err), "true" if ok else "false"])
    summary = (f"# summary: rows={len(rows)} within_band={n_ok} band={args.band:g} "
               f"max_abs_error={worst:.6g}")
    buf.write(summary + "\n")
    _emit(buf.getvalue(), args.output)
    if args.output not in (None, "-"):
        print(summary)
    return EXIT_OK if n_ok == len(rows) else EXIT_FAIL


def validate_report(F, sched, grid, slack_chain=0.05, slack_band=0.1):
    """Run the inequality suite on one sample; returns a list of check records."""
    checks = []

    def add(name, value, lo, hi, slack, theta=None):
        margin = min(value - (lo - slack), (hi + slack) - value)
        rec = {"check": name, "value": value, "lo": lo, "hi": hi, "slack": slack,
               "margin": margin, "pass": bool(margin >= 0)}
        if theta is not None:
            rec["theta"] = theta
        checks.append(rec)

    ld = est.lower_dim_estimate(F, sched).value
    lb = est.lower_box_dim(F, sched).value
    ub = est.upper_box_dim(F, sched).value
    ad = est.assouad_dim_estimate(F, sched).value
    add("chain lower_dim <= lower_box", lb - ld, 0.0, math.inf, slack_chain)
    add("chain lower_box <= upper_box", ub - lb, 0.0, math.inf, slack_chain)
    add("chain upper_box <= assouad_dim", ad - ub, 0.0, math.inf, slack_chain)
    thetas = list(grid)
    extra = sorted({round(math.sqrt(t), 12) for t in thetas} - set(thetas))
    a_vals = {}
    l_vals = {}
    for theta in thetas + extra:
        try:
            a_vals[theta] = est.assouad_spectrum_at(F, theta, sched).value
        except est.TooFewScales:
            continue
        if theta in extra:
            continue
        l_vals[theta] = est.lower_spectrum_at(F, theta, sched).value
    for theta in thetas:
        if theta not in a_vals:
            continue
        a = a_vals[theta]
        add("general bounds", a, ub, min(ub / (1 - theta), ad), slack_band, theta)
        add("lower bounds", l_vals[theta], ld, lb, slack_band, theta)
        root = round(math.sqrt(theta), 12)
        if root in a_vals:
            add("quasi-monotone", a_vals[root] - a, 0.0, math.inf, slack_band, theta)
    return checks, {"lower_dim": ld, "lower_box": lb, "upper_box": ub, "assouad_dim": ad}


def cmd_validate(args):
    F = _load(args.input)
    sched = schedule_for(F, args)
    checks, dims = validate_report(F, sched, _grid(args))
    for c in checks:
        for key in ("value", "lo", "hi", "margin"):
            c[key] = _json_num(c[key])
    ok = all(c["pass"] for c in checks)
    report = {"label": F.label, "points": len(F), "dimensions": dims, "checks": checks,
              "pass": ok}
    _emit(json.dumps(report, indent=2) + "\n", args.output)
    return EXIT_OK if ok else EXIT_FAIL


def _schedule_flags(p):
    p.add_argument("--rho", type=float)
    p.add_argument("--r-max", type=float)
    p.add_argument("--count", type=int)
    p.add_argument("--tail-fraction", type=float)
    p.add_argument("--floor-factor", type=float)
    p.add_argument("--schedule", choices=["geometric", "moran"], default="geometric")


def _grid_flags(p, start=0.05, stop=0.95, step=0.05):
    p.add_argument("--start", type=float, default=start)
    p.add_argument("--stop", type=float, default=stop)
    p.add_argument("--step", type=float, default=step)


def build_parser():
    parser = argparse.ArgumentParser(prog="dimspec", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a sample of one of the model sets")
    g.add_argument("--family", required=True,
                   choices=["power", "exp_sqrt", "exponential", "interval", "spiral", "moran",
                            "product", "union", "holder", "shift"])
    g.add_argument("--lambda", dest="lam", type=float)
    g.add_argument("--c", type=float)
    g.add_argument("--delta", type=float)
    g.add_argument("--compact", action="store_true")
    g.add_argument("--winding", choices=["power", "exponential"])
    g.add_argument("--param", type=float)
    g.add_argument("--alpha-max", type=float)
    g.add_argument("--L", type=float)
    g.add_argument("--alpha", type=float)
    g.add_argument("--beta", type=float)
    g.add_argument("--depth", type=int)
    g.add_argument("--input")
    g.add_argument("--input2")
    g.add_argument("--exponent", type=float)
    g.add_argument("--offset", type=float, nargs="+")
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_generate)

    e = sub.add_parser("estimate", help="one dimension or spectrum value")
    e.add_argument("input")
    e.add_argument("--what", required=True,
                   choices=["upper_box", "lower_box", "assouad_dim", "lower_dim",
                            "assouad_spectrum", "lower_spectrum"])
    e.add_argument("--theta", type=float)
    e.add_argument("--format", choices=["csv", "json"], default="json")
    e.add_argument("-o", "--output")
    _schedule_flags(e)
    e.set_defaults(func=cmd_estimate)

    s = sub.add_parser("sweep", help="spectra over a theta grid, as CSV")
    s.add_argument("input")
    s.add_argument("--kinds", default="assouad,lower")
    s.add_argument("-o", "--output")
    _schedule_flags(s)
    _grid_flags(s)
    s.set_defaults(func=cmd_sweep)

    c = sub.add_parser("compare", help="compare a sweep file with a closed-form spectrum")
    c.add_argument("input")
    c.add_argument("--oracle", required=True,
                   choices=["f_lambda", "sequence", "spiral", "moran", "constant"])
    c.add_argument("--lambda", dest="lam", type=float)
    c.add_argument("--B", type=float)
    c.add_argument("--alpha", type=float)
    c.add_argument("--beta", type=float)
    c.add_argument("--kind", choices=["assouad", "lower"], default="assouad")
    c.add_argument("--band", type=float, default=0.1)
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_compare)

    v = sub.add_parser("validate", help="inequality checks on one sample, as JSON")
    v.add_argument("input")
    v.add_argument("-o", "--output")
    _schedule_flags(v)
    _grid_flags(v)
    v.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except est.TooFewScales as exc:
        print(f"dimspec: {exc}", file=sys.stderr)
        return EXIT_SCALES
    except InputError as exc:
        print(f"dimspec: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"dimspec: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
