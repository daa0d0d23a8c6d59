"""Linear recurrences with polynomial coefficients for u_n, d_n and omega_{a,n}.

A recurrence of order k is stored as polynomials ``P_0, ..., P_k`` with

    P_0(n) x_{n+k} = P_1(n) x_{n+k-1} + ... + P_k(n) x_n ,    n >= valid_from.

Exact mode iterates with Fractions.  Float mode runs mpmath twice, at the
working precision and at a shadow precision 32 bits lower; the gap between
the two runs, scaled back by 2^-32, is the running error estimate.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import mpmath

from .formulas import PrecisionError, d_sum, omega_sum, u_sum

Poly = tuple  # ascending integer / Fraction coefficients

SHADOW_BITS = 32
_SAFETY = 16


class RecurrenceError(ArithmeticError):
    """Leading coefficient vanished at an index the recurrence must cross."""


def _pmul(*polys: Sequence) -> Poly:
    out = [1]
    for p in polys:
        res = [0] * (len(out) + len(p) - 1)
        for i, a in enumerate(out):
            for j, b in enumerate(p):
                res[i + j] += a * b
        out = res
    return tuple(out)


def _pscale(c, p: Sequence) -> Poly:
    return tuple(c * x for x in p)


def peval(p: Sequence, n: int):
    acc = 0
    for c in reversed(p):
        acc = acc * n + c
    return acc


@dataclass(frozen=True)
class HolonomicRecurrence:
    name: str
    coefficients: tuple  # (P_0 leading, P_1, ..., P_k)
    initial_values: tuple  # values at offset, offset+1, ...
    valid_from: int
    offset: int = 0
    params: dict = field(default_factory=dict)

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be positive")
        if len(self.initial_values) < self.order:
            raise ValueError("need at least `order` initial values")
        first_computed = self.offset + len(self.initial_values)
        if first_computed - self.order < self.valid_from:
            raise ValueError("initial segment ends before the recurrence is valid")


def builtin(name: str, a: int | None = None) -> HolonomicRecurrence:
    """The recurrences for ``u``, ``durfee`` and ``omega`` (the latter needs ``a``)."""
    if name == "u":
        lead = _pmul((3, 1), (4, 1), (4, 1))
        c1 = (78, 63, 23, 4)
        c2 = _pscale(-1, _pmul((3, 1), (-1, 2), (2, 3)))
        c3 = _pmul((3, 1), (-7, 4), (2, 1))
        c4 = _pscale(-1, _pmul((3, 1), (1, 1), (2, 1)))
        inits = (Fraction(0), Fraction(1), Fraction(3), Fraction(16, 3))
        return HolonomicRecurrence("u", (lead, c1, c2, c3, c4), inits, valid_from=0)
    if name == "durfee":
        lead = _pmul((2, 1), (3, 1))
        c1 = (8, 9, 3)
        c2 = _pscale(-1, _pmul((1, 3), (2, 1)))
        c3 = _pmul((1, 1), (2, 1))
        inits = (Fraction(0), Fraction(1), Fraction(1))
        return HolonomicRecurrence("durfee", (lead, c1, c2, c3), inits, valid_from=0)
    if name == "omega":
        if a is None or a < 0:
            raise ValueError("omega needs a >= 0")
        a2 = a * a
        lead = _pmul((4, 1), (a + 3, 1), (3 - a, 1))
        c1 = (78 - 7 * a2, 86 - 2 * a2, 32, 4)
        c2 = _pscale(-1, _pmul((3, 1), (20 - a2, 22, 6)))
        n123 = _pmul((1, 1), (2, 1), (3, 1))
        c3 = _pscale(4, n123)
        c4 = _pscale(-1, n123)
        offset = min(0, a - 2)
        inits = tuple([Fraction(0)] * (a + 1 - offset)) + (Fraction(1, math.factorial(a + 1)),)
        return HolonomicRecurrence(
            f"omega:{a}", (lead, c1, c2, c3, c4), inits, valid_from=a - 2, offset=offset, params={"a": a}
        )
    raise KeyError(f"unknown recurrence {name!r}")


@dataclass
class SequenceValues:
    """Values x_start .. x_{start+len-1}; ``errors`` only in float mode."""

    start: int
    values: list
    errors: list | None = None
    precision_bits: int | None = None

    def __getitem__(self, n: int):
        if n < self.start:
            raise IndexError(n)
        return self.values[n - self.start]

    def error(self, n: int):
        return None if self.errors is None else self.errors[n - self.start]

    @property
    def stop(self) -> int:
        return self.start + len(self.values)

    def indices(self) -> range:
        return range(self.start, self.stop)

    def to_csv(self, first: int | None = None, digits: int | None = None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "value"])
        lo = self.start if first is None else max(first, self.start)
        if self.precision_bits is not None and digits is None:
            digits = max(1, int(self.precision_bits * 0.30103) - 8)
        for n in range(lo, self.stop):
            v = self[n]
            w.writerow([n, str(v) if isinstance(v, Fraction) else mpmath.nstr(v, digits, strip_zeros=False)])
        return buf.getvalue()


def _run(rec: HolonomicRecurrence, n_max: int, convert: Callable, divide: Callable):
    k = rec.order
    vals = [convert(v) for v in rec.initial_values]
    m = rec.offset + len(vals)
    while m <= n_max:
        n = m - k
        lead = peval(rec.coefficients[0], n)
        if lead == 0:
            raise RecurrenceError(f"{rec.name}: leading coefficient vanishes at n={n}")
        acc = 0
        for j in range(1, k + 1):
            c = peval(rec.coefficients[j], n)
            if c:
                acc += c * vals[-j]
        vals.append(divide(acc, lead))
        m += 1
    return vals[: n_max - rec.offset + 1]


def eval(
    rec: HolonomicRecurrence,
    n_max: int,
    mode: str = "exact",
    precision: int = 256,
    max_rel_error: float = 1e-6,
) -> SequenceValues:  # noqa: A001 - mirrors the operation name
    """Forward iteration up to index ``n_max``.

    ``mode="exact"`` returns Fractions; ``mode="float"`` returns mpf values at
    ``precision`` bits together with a per-term error estimate and raises
    :class:`PrecisionError` when the estimated relative error of any term
    exceeds ``max_rel_error``.
    """
    if n_max < rec.offset:
        raise ValueError("n_max precedes the initial segment")
    if mode == "exact":
        vals = _run(rec, n_max, Fraction, lambda acc, lead: Fraction(acc) / lead)
        return SequenceValues(rec.offset, vals)
    if mode != "float":
        raise ValueError(f"unknown mode {mode!r}")
    if precision < 64:
        raise ValueError("precision must be at least 64 bits")

    def mp(v):
        return mpmath.mpf(v.numerator) / v.denominator

    def div(acc, lead):
        return acc / lead

    with mpmath.workprec(precision):
        main = _run(rec, n_max, mp, div)
    with mpmath.workprec(precision - SHADOW_BITS):
        shadow = _run(rec, n_max, mp, div)
    with mpmath.workprec(precision):
        errors = []
        scale = mpmath.mpf(0)
        worst = mpmath.mpf(0)
        ulp = mpmath.ldexp(1, -precision)
        shrink = mpmath.ldexp(_SAFETY, -SHADOW_BITS)
        for v, s in zip(main, shadow):
            scale = max(scale, abs(v))
            if scale:
                worst = max(worst, abs(v - s) / scale)
            rel = worst * shrink + 4 * ulp
            if rel > max_rel_error:
                raise PrecisionError(f"{rec.name}: relative error estimate {rel} exceeds {max_rel_error}")
            errors.append(rel * scale)
    return SequenceValues(rec.offset, main, errors, precision)


_CLOSED_FORMS = {"u": lambda rec: u_sum, "durfee": lambda rec: d_sum}


def cross_check(rec: HolonomicRecurrence, closed_form: Callable | None = None, range_=None) -> dict:
    """Compare exact recurrence output with a closed-form sum on ``range_``.

    Returns ``{"pass": bool, "first_divergence": n | None, "checked": count}``.
    """
    if closed_form is None:
        if rec.name.startswith("omega:"):
            a = rec.params["a"]
            closed_form = lambda n: omega_sum(a, n)
        else:
            closed_form = _CLOSED_FORMS[rec.name](rec)
    if range_ is None:
        range_ = range(0, 301)
    lo = max(min(range_), 0)
    seq = eval(rec, max(range_), "exact")
    for n in range_:
        if n < lo:
            continue
        if seq[n] != closed_form(n):
            return {"pass": False, "first_divergence": n, "checked": n - lo}
    return {"pass": True, "first_divergence": None, "checked": len([n for n in range_ if n >= lo])}


def float_vs_exact(rec: HolonomicRecurrence, n_max: int, precision: int = 256) -> dict:
    """Dual-mode comparison: largest relative deviation and whether the error
    estimate covered every observed gap."""
    exact = eval(rec, n_max, "exact")
    approx = eval(rec, n_max, "float", precision)
    worst = mpmath.mpf(0)
    covered = True
    with mpmath.workprec(precision):
        for n in exact.indices():
            e = exact[n]
            ev = mpmath.mpf(e.numerator) / e.denominator
            gap = abs(approx[n] - ev)
            if gap > approx.error(n):
                covered = False
            if ev:
                worst = max(worst, gap / abs(ev))
    return {"max_rel_deviation": worst, "estimate_covers": covered, "n_max": n_max}
