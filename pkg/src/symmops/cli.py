"""Command-line front end.

    symmops ladder   --model ttw --p 1 --q 1 --alpha 1/3 --beta 1/4 --omega 1 --kappa 0
    symmops algebra  --model pvz --p 1 --q 2 ...
    symmops spectrum --model ttw ... [--oracle]
    symmops sweep    [--seed 0] [--count 5]

Exit codes: 0 pass, 1 verification failure, 2 usage or configuration error.
Reports are JSON with sorted keys and rationals written as "a/b".
"""

import argparse
import json
import os
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from .models import Params, param_tuples

SCHEMA_VERSION = "1"
SWEEP_PAIRS = ((1, 1), (1, 2), (2, 1), (3, 2), (2, 3))
EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

_RAT = re.compile(r"^(-?)(\d+)(?:/(\d+))?$")


class ConfigError(ValueError):
    pass


def parse_rational(text, name, allow_negative=False):
    m = _RAT.match(text.strip())
    if not m:
        raise ConfigError("%s: expected an integer or a/b, got %r" % (name, text))
    sign, num, den = m.groups()
    if den is not None and int(den) == 0:
        raise ConfigError("%s: zero denominator" % name)
    if sign and not allow_negative:
        raise ConfigError("%s must be nonnegative" % name)
    return Fraction(int(sign + num), int(den or 1))


def params_from_args(args):
    if args.p <= 0 or args.q <= 0:
        raise ConfigError("p and q must be positive")
    from math import gcd
    if gcd(args.p, args.q) != 1:
        raise ConfigError("p and q must be coprime")
    a = parse_rational(args.alpha, "alpha")
    b = parse_rational(args.beta, "beta")
    w = parse_rational(args.omega, "omega")
    kap = parse_rational(args.kappa, "kappa", allow_negative=True)
    if w <= 0:
        raise ConfigError("omega must be positive")
    return Params(args.p, args.q, a, b, w, kap)


def threads():
    raw = os.environ.get("SYMMOPS_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError("SYMMOPS_THREADS must be an integer")
    if n < 1:
        raise ConfigError("SYMMOPS_THREADS must be positive")
    return n


def run_tasks(fn, items):
    """Map fn over items, in a process pool when SYMMOPS_THREADS > 1.

    Results come back in input order, so reports do not depend on scheduling.
    """
    n = threads()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


# ------------------------------------------------------------ suites

def _timed(fn, *args):
    t = time.perf_counter()
    out = fn(*args)
    return out, round(time.perf_counter() - t, 3)


def ladder_suite(model, params, u_max=None):
    from .ladder import ladder_report
    return ladder_report(model, params, u_max)


def algebra_suite(model, params):
    from .symalg import build_generators, relation_report
    return relation_report(build_generators(params, model))


def spectrum_suite(model, params, n_max=3, oracle=False):
    from .oscillator import compare_spectra
    from .symalg import CentralData
    rep = compare_spectra(CentralData(params, model), n_max=n_max)
    if oracle:
        from .oracle import oracle_report
        o = oracle_report(params)
        rep["oracle"] = o
        rep["pass"] = rep["pass"] and o["pass"]
    return rep


def _sweep_task(item):
    model, params, timing = item
    lad, tl = _timed(ladder_suite, model, params)
    alg, ta = _timed(algebra_suite, model, params)
    out = {"model": model, "params": params.to_json(),
           "ladder_pass": lad["pass"], "algebra_pass": alg["pass"],
           "failed": [c["name"] for c in lad["checks"] if not c["pass"]] +
                     [r["name"] for r in alg["relations"]
                      if not r["pass"] and not r.get("informational")],
           "skipped": lad["skipped"], "sigma_fit": alg["sigma_fit"],
           "pass": lad["pass"] and alg["pass"]}
    if timing:
        out["seconds"] = {"ladder": tl, "algebra": ta}
    return out


def sweep_suite(seed=0, count=5, pairs=SWEEP_PAIRS, models=("ttw", "pvz"), timing=False):
    items = []
    for p, q in pairs:
        for P in param_tuples(p, q, count=count, seed=seed):
            for model in models:
                items.append((model, P, timing))
    runs = run_tasks(_sweep_task, items)
    return {"seed": seed, "count": count, "pairs": [list(x) for x in pairs],
            "runs": runs, "pass": all(r["pass"] for r in runs)}


# ------------------------------------------------------------ output

def to_json(report):
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def _flatten(obj, prefix, out):
    if isinstance(obj, dict):
        for key in sorted(obj):
            _flatten(obj[key], "%s.%s" % (prefix, key) if prefix else str(key), out)
    elif isinstance(obj, list):
        if not obj:
            out.append("%s = []" % prefix)
        for i, x in enumerate(obj):
            _flatten(x, "%s[%d]" % (prefix, i), out)
    else:
        out.append("%s = %s" % (prefix, json.dumps(obj)))


def to_text(report):
    """One 'path = value' line per leaf; together they determine the JSON."""
    lines = []
    _flatten(report, "", lines)
    return "\n".join(lines) + "\n"


def build_parser():
    ap = argparse.ArgumentParser(prog="symmops", description="Exact ladder and symmetry-algebra verification")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, params=True):
        if params:
            sp.add_argument("--model", choices=("ttw", "pvz"), required=True)
            sp.add_argument("--p", type=int, required=True)
            sp.add_argument("--q", type=int, required=True)
            sp.add_argument("--alpha", required=True)
            sp.add_argument("--beta", required=True)
            sp.add_argument("--omega", default="1")
            sp.add_argument("--kappa", default="0")
        sp.add_argument("--format", choices=("json", "text"), default="json")
        sp.add_argument("--output", help="write the report here instead of stdout")
        sp.add_argument("--timing", action="store_true", help="include wall times (breaks byte-identity)")

    sp = sub.add_parser("ladder", help="certify ladder operators and structure functions")
    common(sp)
    sp.add_argument("--u-max", type=int, default=None)
    sp = sub.add_parser("algebra", help="verify symmetry-algebra relations and the Casimir")
    common(sp)
    sp = sub.add_parser("spectrum", help="finite irreps against the analytic spectrum")
    common(sp)
    sp.add_argument("--n-max", type=int, default=3)
    sp.add_argument("--oracle", action="store_true", help="append floating-point eigen checks")
    sp = sub.add_parser("sweep", help="ladder and algebra suites over seeded random tuples")
    common(sp, params=False)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=5)
    sp.add_argument("--pairs", default=None, help='e.g. "1,1;1,2" (default: the built-in list)')
    return ap


def _pairs(text):
    if text is None:
        return SWEEP_PAIRS
    out = []
    try:
        for chunk in text.split(";"):
            p, q = (int(x) for x in chunk.split(","))
            out.append((p, q))
    except ValueError:
        raise ConfigError("--pairs: expected p,q;p,q")
    from math import gcd
    for p, q in out:
        if p <= 0 or q <= 0 or gcd(p, q) != 1:
            raise ConfigError("--pairs: (%d,%d) is not a coprime positive pair" % (p, q))
    return tuple(out)


def run(args):
    cmd = args.command
    t0 = time.perf_counter()
    if cmd == "sweep":
        if args.count < 1:
            raise ConfigError("--count must be positive")
        body = sweep_suite(args.seed, args.count, _pairs(args.pairs), timing=args.timing)
        config = {"seed": args.seed, "count": args.count}
    else:
        params = params_from_args(args)
        config = {"model": args.model, **params.to_json()}
        if cmd == "ladder":
            if args.u_max is not None and args.u_max < 1:
                raise ConfigError("--u-max must be positive")
            body = ladder_suite(args.model, params, args.u_max)
        elif cmd == "algebra":
            body = algebra_suite(args.model, params)
        else:
            if args.n_max < 0:
                raise ConfigError("--n-max must be nonnegative")
            body = spectrum_suite(args.model, params, args.n_max, args.oracle)
    report = {"schema": SCHEMA_VERSION, "command": cmd, "config": config,
              "report": body, "pass": bool(body["pass"])}
    if args.timing:
        report["seconds"] = round(time.perf_counter() - t0, 3)
    return report


_VALUE_FLAGS = ("--alpha", "--beta", "--omega", "--kappa")


def _glue_values(argv):
    """Turn '--kappa -1/3' into '--kappa=-1/3' so argparse does not read a flag."""
    out = []
    i = 0
    while i < len(argv):
        a = argv[i]
        if a in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append("%s=%s" % (a, argv[i + 1]))
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def main(argv=None):
    ap = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = ap.parse_args(_glue_values(argv))
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        report = run(args)
    except ConfigError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    text = to_json(report) if args.format == "json" else to_text(report)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_PASS if report["pass"] else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
