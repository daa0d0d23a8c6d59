"""Command line entry point: ``plancherel {expect,seq,validate,profile,simulate}``.

Exit status: 0 success, 1 validation failure or cross-mode mismatch,
2 usage error, 3 precision or resource exhaustion.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

import mpmath

from . import asymptotics, constants, formulas, holonomic, identities, oracle, rsk
from .formulas import PrecisionError
from .oracle import EnumerationCapError

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3
PRECISION_ENV = "PLANCHEREL_PRECISION"
PROFILE_PRESETS = {"fig4a": 1573, "fig4b": 6230, "fig4c": 24798, "fig4d": 98943, "fig5": 200415, "fig6": 200767}
SEQUENCES = ("u", "exy", "durfee", "omega:<a>", "z", "aep")


class UsageError(Exception):
    pass


class ValidationFailure(Exception):
    pass


def default_precision() -> int:
    raw = os.environ.get(PRECISION_ENV)
    if not raw:
        return 256
    try:
        bits = int(raw)
    except ValueError:
        raise UsageError(f"{PRECISION_ENV} must be an integer, got {raw!r}") from None
    return bits


def _check_precision(bits: int) -> int:
    if bits < 64:
        raise UsageError("precision must be at least 64 bits")
    return bits


# ----------------------------------------------------------- formatting


def fmt_exact(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def fmt_decimal(value, error=0, max_digits: int = 20) -> str:
    """Decimal with as many significant digits as ``error`` certifies."""
    if isinstance(value, Fraction):
        with mpmath.workprec(256):
            return mpmath.nstr(mpmath.mpf(value.numerator) / value.denominator, max_digits, strip_zeros=False)
    with mpmath.workprec(max(mpmath.mp.prec, 256)):
        value = mpmath.mpf(value)
        if value == 0:
            return "0.0"
        digits = max_digits
        if error:
            digits = int(mpmath.floor(mpmath.log10(abs(value) / mpmath.mpf(error))))
            digits = min(max(digits, 1), max_digits)
        return mpmath.nstr(value, digits, strip_zeros=False)


def _emit(text: str, output: str | None):
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- expect


def cmd_expect(args) -> int:
    n, fn = args.n, args.functional
    kw = {"cap": args.cap, "workers": args.workers}
    decimal = None
    if fn == "log_prob":
        comb = oracle.expect_log_prob_exact(n, cap=args.cap)
        exact = oracle.format_log_combination(comb)
        decimal = fmt_decimal(oracle.eval_log_combination(comb, 128), mpmath.ldexp(1, -100))
    elif fn == "log_hook_sum":
        comb = oracle.expect_log_hooks_exact(n, cap=args.cap)
        exact = oracle.format_log_combination(comb)
        decimal = fmt_decimal(oracle.eval_log_combination(comb, 128), mpmath.ldexp(1, -100))
    elif fn == "cov_growth":
        value = oracle.growth_covariance(n, cap=args.cap)
    elif fn.startswith("var:"):
        value = oracle.variance_exact(n, fn[4:], **kw)
    else:
        value = oracle.expect_exact(n, fn, **kw)
    if decimal is None:
        exact, decimal = fmt_exact(value), fmt_decimal(value)
    if args.format == "json":
        _emit(json.dumps({"n": n, "functional": fn, "exact": exact, "decimal": decimal}) + "\n", args.output)
    else:
        _emit(f"{exact}\t{decimal}\n", args.output)
    return EXIT_OK


# ------------------------------------------------------------------- seq


def _parse_name(name: str) -> tuple[str, int | None]:
    if name.startswith("omega:"):
        try:
            a = int(name.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad sequence name {name!r}") from None
        if a < 0:
            raise UsageError("omega needs a >= 0")
        return "omega", a
    if name in ("u", "exy", "durfee", "z", "aep"):
        return name, None
    raise UsageError(f"unknown sequence {name!r}; choose from {', '.join(SEQUENCES)}")


def _recurrence_values(kind, a, ns, arith, precision):
    rec = holonomic.builtin("u" if kind == "exy" else kind, a)
    seq = holonomic.eval(rec, max(ns), arith, precision)
    out = {}
    for n in ns:
        v = seq[n] if n >= seq.start else Fraction(0)
        err = seq.error(n) if n >= seq.start else 0
        if kind == "exy":
            v = v - n
        out[n] = (v, err or 0)
    return out


def _sum_values(kind, a, ns, precision):
    out = {}
    for n in ns:
        if kind == "u":
            out[n] = (formulas.u_sum(n), 0)
        elif kind == "exy":
            out[n] = (formulas.u_sum(n) - n, 0)
        elif kind == "durfee":
            out[n] = (formulas.d_sum(n), 0)
        elif kind == "omega":
            out[n] = (formulas.omega_sum(a, n), 0)
        else:
            rep = formulas.z_sum(n, precision)
            if kind == "z":
                out[n] = (rep.value, rep.error_bound)
            else:
                with mpmath.workprec(rep.precision_bits):
                    root = mpmath.sqrt(n)
                    value = (2 * rep.value - mpmath.loggamma(n + 1)) / root
                    err = 2 * rep.error_bound / root + abs(value) * mpmath.ldexp(1, 8 - rep.precision_bits)
                out[n] = (value, err)
    return out


def _oracle_values(kind, a, ns, cap, workers):
    out = {}
    for n in ns:
        if kind in ("u", "exy"):
            v = oracle.expect_exact(n, "x_plus_y", cap=cap, workers=workers)
            out[n] = (v + n if kind == "u" else v, 0)
        elif kind == "durfee":
            out[n] = (oracle.expect_exact(n, "durfee", cap=cap, workers=workers), 0)
        elif kind == "omega":
            out[n] = (oracle.expect_exact(n, f"phi:{a}", cap=cap, workers=workers), 0)
        else:
            with mpmath.workprec(192):
                z = oracle.eval_log_combination(oracle.expect_log_hooks_exact(n, cap=cap), 192)
                err = mpmath.ldexp(abs(z) + 1, -150)
                if kind == "z":
                    out[n] = (z, err)
                else:
                    root = mpmath.sqrt(n) if n else mpmath.mpf(1)
                    out[n] = ((2 * z - mpmath.loggamma(n + 1)) / root, 4 * err)
    return out


def _agree(x, ex, y, ey) -> bool:
    if isinstance(x, Fraction) and isinstance(y, Fraction):
        return x == y
    with mpmath.workprec(512):
        fx = mpmath.mpf(x.numerator) / x.denominator if isinstance(x, Fraction) else mpmath.mpf(x)
        fy = mpmath.mpf(y.numerator) / y.denominator if isinstance(y, Fraction) else mpmath.mpf(y)
        return abs(fx - fy) <= mpmath.mpf(ex) + mpmath.mpf(ey) + mpmath.ldexp(abs(fx) + 1, -200)


def sequence_values(name: str, ns: list[int], mode: str, *, precision=None, arith="exact", cap=None, workers=1):
    kind, a = _parse_name(name)
    if mode == "recurrence":
        if kind in ("z", "aep"):
            raise UsageError(f"{name} has no recurrence mode")
        prec = _check_precision(precision or default_precision())
        return _recurrence_values(kind, a, ns, arith, prec)
    if mode == "sum":
        return _sum_values(kind, a, ns, precision)
    if mode == "oracle":
        return _oracle_values(kind, a, ns, cap, workers)
    raise UsageError(f"unknown mode {mode!r}")


def _parse_ns(args) -> list[int]:
    if args.ns:
        try:
            ns = sorted({int(t) for t in args.ns.split(",") if t.strip()})
        except ValueError:
            raise UsageError("--ns must be a comma separated list of integers") from None
    else:
        if args.n_max is None:
            raise UsageError("give --n-max or --ns")
        ns = list(range(args.n_min, args.n_max + 1))
    if not ns or ns[0] < 0:
        raise UsageError("indices must be non-negative")
    return ns


def cmd_seq(args) -> int:
    ns = _parse_ns(args)
    modes = [m.strip() for m in args.mode.split(",") if m.strip()]
    if not modes:
        raise UsageError("empty --mode")
    results = {
        m: sequence_values(
            args.name, ns, m, precision=args.precision, arith="float" if args.float else "exact", cap=args.cap,
            workers=args.workers,
        )
        for m in modes
    }
    primary = results[modes[0]]
    for other in modes[1:]:
        for n in ns:
            (x, ex), (y, ey) = primary[n], results[other][n]
            if not _agree(x, ex, y, ey):
                raise ValidationFailure(f"{args.name}: modes {modes[0]} and {other} disagree at n={n}")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "value"])
    for n in ns:
        v, err = primary[n]
        w.writerow([n, fmt_exact(v) if isinstance(v, Fraction) else fmt_decimal(v, err, args.digits)])
    _emit(buf.getvalue(), args.output)
    return EXIT_OK


# -------------------------------------------------------------- validate


def _check(name, ok, **detail):
    return {"check": name, "pass": bool(ok), **{k: (str(v) if not isinstance(v, (int, float, bool, type(None))) else v) for k, v in detail.items()}}


def suite_identities(args) -> list[dict]:
    out = []
    for rep in identities.verify_all(workers=args.workers):
        s = rep.summary()
        out.append(_check(s["identity"], s["pass"], cases=s["cases"], first_violation=s["first_violation"]))
    return out


def suite_oracle_vs_formulas(args) -> list[dict]:
    n_max = args.n_max or 20
    out = []
    for n in range(1, n_max + 1):
        out.append(_check(f"exy n={n}", oracle.expect_exact(n, "x_plus_y", workers=args.workers) == formulas.u_sum(n) - n))
        out.append(_check(f"durfee n={n}", oracle.expect_exact(n, "durfee", workers=args.workers) == formulas.d_sum(n)))
        for a in range(0, 6):
            out.append(
                _check(f"omega a={a} n={n}", oracle.expect_exact(n, f"phi:{a}", workers=args.workers) == formulas.omega_sum(a, n))
            )
        if n >= 2 and n <= 16:
            rep = formulas.z_sum(n)
            est = oracle.expect_numeric(n, "log_hook_sum", 192)
            gap = abs(rep.value - est.value)
            out.append(_check(f"z n={n}", gap <= rep.error_bound + est.error_bound, gap=mpmath.nstr(gap, 5)))
    return out


def suite_recurrences(args) -> list[dict]:
    top = args.n_max or 300
    out = []
    recs = [holonomic.builtin("u"), holonomic.builtin("durfee")] + [holonomic.builtin("omega", a) for a in range(6)]
    for rec in recs:
        res = holonomic.cross_check(rec, range_=range(0, top + 1))
        out.append(_check(f"{rec.name} exact vs sum", res["pass"], first_divergence=res["first_divergence"]))
        fv = holonomic.float_vs_exact(rec, min(top, 500))
        out.append(_check(f"{rec.name} float estimate", fv["estimate_covers"], max_rel_deviation=mpmath.nstr(fv["max_rel_deviation"], 3)))
    omega0 = holonomic.eval(holonomic.builtin("omega", 0), 100)
    out.append(_check("omega:0 equals durfee up to 100", all(omega0[n] == formulas.d_sum(n) for n in range(0, 101))))
    return out


def suite_constants(args) -> list[dict]:
    prec = _check_precision(args.precision or default_precision())
    H = constants.constant_H(prec)
    hp = constants.constant_hprime0(prec)
    hh = constants.constant_h_half(prec)
    with mpmath.workprec(prec):
        cross = constants.h_from_h_half(hh.value, prec)
        second = constants.second_order_constant(prec, hp.value)
        aep = asymptotics.aep_model().evaluate(2048, prec)
        return [
            _check("H", abs(H.value - mpmath.mpf("1.87702830628")) < 1e-10, value=mpmath.nstr(H.value, 20), tail_bound=mpmath.nstr(H.tail_bound, 3)),
            _check("h'(0)", abs(hp.value - mpmath.mpf("0.001562493")) < 1e-8, value=mpmath.nstr(hp.value, 20)),
            _check("H from h(1/2)", abs(cross - H.value) < 1e-10, gap=mpmath.nstr(abs(cross - H.value), 3)),
            _check("second order constant", abs(second - mpmath.mpf("1.792693")) < 1e-6, value=mpmath.nstr(second, 20)),
            _check("aep model at 2048", abs(aep - mpmath.mpf("1.746154")) < 1e-5, value=mpmath.nstr(aep, 15)),
        ]


SUITES = {
    "identities": suite_identities,
    "oracle-vs-formulas": suite_oracle_vs_formulas,
    "recurrences": suite_recurrences,
    "constants": suite_constants,
}


def cmd_validate(args) -> int:
    checks = SUITES[args.suite](args)
    failed = [c for c in checks if not c["pass"]]
    report = {"suite": args.suite, "pass": not failed, "checks": checks, "first_failure": failed[0]["check"] if failed else None}
    _emit(json.dumps(report, indent=2) + "\n", args.output)
    return EXIT_OK if not failed else EXIT_FAIL


# --------------------------------------------------------------- profile


def _profile_text(n, a_max, method, precision) -> str:
    if a_max is None:
        a_max = asymptotics.max_profile_a(n)
    rows = asymptotics.tilde_omega_profile(n, a_max, method, precision)
    return asymptotics.profile_csv(rows)


def cmd_profile(args) -> int:
    precision = _check_precision(args.precision or default_precision())
    if args.preset:
        names = list(PROFILE_PRESETS) if args.preset == "all" else [args.preset]
        if len(names) > 1 and not args.output_dir:
            raise UsageError("--preset all needs --output-dir")
        for name in names:
            text = _profile_text(PROFILE_PRESETS[name], args.a_max, args.method, precision)
            if args.output_dir:
                Path(args.output_dir).mkdir(parents=True, exist_ok=True)
                (Path(args.output_dir) / f"profile_{PROFILE_PRESETS[name]}.csv").write_text(text)
            else:
                _emit(text, args.output)
        return EXIT_OK
    if args.n is None:
        raise UsageError("give --n or --preset")
    if args.n < 1:
        raise UsageError("n must be positive")
    _emit(_profile_text(args.n, args.a_max, args.method, precision), args.output)
    return EXIT_OK


# -------------------------------------------------------------- simulate


def reference_value(statistic: str, n: int):
    """Exact (or recurrence) mean of a Monte Carlo statistic, when known."""
    if statistic == "x_minus_y":
        return Fraction(0)
    arith = "exact" if n <= 3000 else "float"
    if statistic in ("x_plus_y", "bump_total"):
        u = holonomic.eval(holonomic.builtin("u"), n, arith)[n]
        return (u - n) if statistic == "x_plus_y" else (u - n) / 2
    if statistic == "durfee":
        return holonomic.eval(holonomic.builtin("durfee"), n, arith)[n]
    if statistic.startswith("profile:"):
        a = int(statistic.split(":", 1)[1])
        if n <= a:
            return Fraction(0)
        return holonomic.eval(holonomic.builtin("omega", a), n, arith)[n]
    return None


def cmd_simulate(args) -> int:
    stats = [s.strip() for s in args.statistics.split(",") if s.strip()]
    try:
        records = rsk.monte_carlo(args.n, args.trials, args.seed, stats, args.workers)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    lines = []
    for rec in records:
        row = rec.__dict__.copy()
        if args.compare:
            ref = reference_value(rec.statistic, args.n)
            if ref is not None:
                ref_f = float(ref)
                row["reference"] = ref_f
                row["z_score"] = (rec.mean - ref_f) / rec.stderr if rec.stderr > 0 else (0.0 if rec.mean == ref_f else math.inf)
        lines.append(json.dumps(row))
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


# ----------------------------------------------------------------- parser


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="plancherel", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("expect", help="exact Plancherel average of a diagram functional")
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--functional", required=True, help="x_plus_y, x_minus_y, durfee, phi:a, log_prob, var:<id>, cov_growth, ...")
    e.add_argument("--cap", type=int, default=None, help="largest n the enumeration may visit")
    e.add_argument("--format", choices=("text", "json"), default="text")
    e.set_defaults(func=cmd_expect)

    s = sub.add_parser("seq", help="sequence values as CSV")
    s.add_argument("--name", required=True, help="u, exy, durfee, omega:a, z or aep")
    s.add_argument("--n-max", type=int)
    s.add_argument("--n-min", type=int, default=1)
    s.add_argument("--ns", help="comma separated indices instead of a range")
    s.add_argument("--mode", default="sum", help="sum, recurrence or oracle; a comma list cross-checks against the first")
    s.add_argument("--float", action="store_true", help="recurrence in floating point instead of exact rationals")
    s.add_argument("--precision", type=int, default=None, help=f"working bits (default ${PRECISION_ENV} or 256; z uses 4.2n+64)")
    s.add_argument("--digits", type=int, default=20, help="largest number of significant digits printed")
    s.add_argument("--cap", type=int, default=None)
    s.set_defaults(func=cmd_seq)

    v = sub.add_parser("validate", help="run a validation battery, JSON report")
    v.add_argument("--suite", choices=sorted(SUITES), required=True)
    v.add_argument("--n-max", type=int, default=None)
    v.add_argument("--precision", type=int, default=None)
    v.set_defaults(func=cmd_validate)

    pr = sub.add_parser("profile", help="rescaled omega profile against the limit shape, CSV")
    pr.add_argument("--n", type=int)
    pr.add_argument("--preset", choices=sorted(PROFILE_PRESETS) + ["all"])
    pr.add_argument("--a-max", type=int, default=None)
    pr.add_argument("--method", choices=("auto", "exact", "mp", "fast"), default="auto")
    pr.add_argument("--precision", type=int, default=None)
    pr.add_argument("--output-dir")
    pr.set_defaults(func=cmd_profile)

    m = sub.add_parser("simulate", help="Monte Carlo over uniform permutations via RSK, JSON lines")
    m.add_argument("--n", type=_positive, required=True)
    m.add_argument("--trials", type=_positive, required=True)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--statistics", default="x_plus_y")
    m.add_argument("--no-compare", dest="compare", action="store_false")
    m.set_defaults(func=cmd_simulate)

    for sp in (e, s, v, pr, m):
        sp.add_argument("--workers", type=_positive, default=1)
        sp.add_argument("--output", help="write here instead of stdout")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (PrecisionError, EnumerationCapError, holonomic.RecurrenceError, MemoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (UsageError, KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
