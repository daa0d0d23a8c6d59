"""Partition-free binomial-convolution representations of Plancherel averages.

Each expectation is written as ``sum_r c_r * C(n, r)`` with explicit
coefficients; exact sums use :class:`fractions.Fraction`, the log-weighted
sum for ``z_n`` runs in mpmath at a precision large enough to absorb the
cancellation between alternating terms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath


class PrecisionError(ArithmeticError):
    """Working precision too small for the cancellation encountered."""


def p_poly(x: int, r: int) -> int:
    """prod_{i=1}^{r} (x^2 - i^2)"""
    x2 = x * x
    out = 1
    for i in range(1, r + 1):
        out *= x2 - i * i
        if out == 0:
            return 0
    return out


def q_poly(x: int, r: int) -> int:
    """prod_{i=0}^{r-1} (x^2 - i^2); equals x^2 p(x, r-1) for r >= 1."""
    if r == 0:
        return 1
    return x * x * p_poly(x, r - 1)


@lru_cache(maxsize=None)
def kr_constant(r: int) -> Fraction:
    if r < 1:
        raise ValueError("r must be positive")
    f = math.factorial
    return Fraction(f(2 * r) * f(2 * r + 1), f(r + 1) ** 2 * f(r))


# ----------------------------------------------------------- exact sequences


def u_sum(n: int) -> Fraction:
    """u_n, with E(X_n + Y_n) = u_n - n."""
    if n < 0:
        raise ValueError("n must be non-negative")
    total = Fraction(0)
    f = math.factorial
    for r in range(1, n + 1):
        c = math.comb(2 * r - 2, r - 1) ** 2
        total += Fraction((-1) ** r * c * math.comb(n, r), (2 * r * r - 3 * r) * f(r))
    return total


def d_sum(n: int) -> Fraction:
    """Expected Durfee square side length under Pl^(n)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    f = math.factorial
    total = Fraction(0)
    for r in range(1, n + 1):
        total += Fraction((-1) ** (r + 1) * f(2 * r - 2) * math.comb(n, r), f(r - 1) ** 2 * f(r))
    return total


def omega_sum(a: int, n: int) -> Fraction:
    """omega_{a,n} = E Phi_lambda(a) under Pl^(n)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    a = abs(a)
    f = math.factorial
    total = Fraction(0)
    for r in range(a + 1, n + 1):
        num = (-1) ** (r + a + 1) * f(2 * r - 2) * math.comb(n, r)
        total += Fraction(num, f(r - 1 + a) * f(r - 1 - a) * f(r))
    return total


# ------------------------------------------------------------------- z_n


def g_eval(r: int, precision: int = 128) -> mpmath.mpf:
    """g(r) = sum_{l=2}^{r} (-1)^l l^2 log l / ((r+l)! (r-l)!)."""
    if r < 2:
        raise ValueError("r must be at least 2")
    with mpmath.workprec(precision + 16):
        inner = mpmath.fsum(
            (-1) ** ell * ell * ell * math.comb(2 * r, r - ell) * mpmath.log(ell) for ell in range(2, r + 1)
        )
        value = inner / math.factorial(2 * r)
    with mpmath.workprec(precision):
        return +value


@dataclass(frozen=True)
class SumReport:
    value: mpmath.mpf
    error_bound: mpmath.mpf
    precision_bits: int
    cancellation_bits: float


def default_z_precision(n: int) -> int:
    return math.ceil(4.2 * n) + 64


def z_sum(n: int, precision: int | None = None, min_correct_bits: int = 53) -> SumReport:
    """z_n = E sum_u log h_u via ``2 sum_r (-1)^r g(r) K_{r-1} C(n, r)``.

    The error bound is the classical worst case: every multiply and add
    contributes one relative rounding of the running absolute sum, which is
    what the alternating signs leave exposed.  Raises :class:`PrecisionError`
    if fewer than ``min_correct_bits`` bits of the result survive.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    prec = default_z_precision(n) if precision is None else int(precision)
    if n < 2:
        return SumReport(mpmath.mpf(0), mpmath.mpf(0), prec, 0.0)
    f = math.factorial
    with mpmath.workprec(prec):
        logs = [mpmath.mpf(0), mpmath.mpf(0)] + [mpmath.log(ell) for ell in range(2, n + 1)]
        total = mpmath.mpf(0)
        absolute = mpmath.mpf(0)
        for r in range(2, n + 1):
            # 2 K_{r-1} C(n, r) / (2r)!, simplified to integers
            num = f(2 * r - 2) * math.comb(n, r)
            den = r * f(r) ** 2 * f(r - 1)
            inner = mpmath.mpf(0)
            inner_abs = mpmath.mpf(0)
            binoms = _central_row(r)
            for ell in range(2, r + 1):
                t = ell * ell * binoms[ell] * logs[ell]
                if ell & 1:
                    inner -= t
                else:
                    inner += t
                inner_abs += t
            c = mpmath.mpf(num) / den
            term = c * inner
            total = total - term if r & 1 else total + term
            absolute += c * inner_abs
        bound = absolute * (n + 8) * mpmath.ldexp(1, 1 - prec)
        value = +total
    lost = float(mpmath.log(absolute / abs(value), 2)) if value else float("inf")
    if bound > abs(value) * mpmath.ldexp(1, -min_correct_bits):
        raise PrecisionError(
            f"z_{n}: {prec} bits leave fewer than {min_correct_bits} correct bits "
            f"(cancellation ~{lost:.0f} bits)"
        )
    return SumReport(value=value, error_bound=bound, precision_bits=prec, cancellation_bits=lost)


def _central_row(r: int) -> list[int]:
    """binoms[l] = C(2r, r - l) for 0 <= l <= r, via the ratio recurrence."""
    out = [0] * (r + 1)
    b = math.comb(2 * r, r)
    out[0] = b
    for ell in range(1, r + 1):
        b = b * (r - ell + 1) // (r + ell)
        out[ell] = b
    return out


def aep_term(n: int, precision: int | None = None) -> mpmath.mpf:
    """(2 z_n - log n!) / sqrt(n), the sequence that approaches the AEP constant."""
    rep = z_sum(n, precision)
    with mpmath.workprec(max(rep.precision_bits, 128)):
        return (2 * rep.value - mpmath.loggamma(n + 1)) / mpmath.sqrt(n)
