"""The AEP constant H, h'(0) and h(1/2) as tail-corrected series.

All three series have summands built from ``E_m(l) = sum_{k>=m} B_{2k}/(2k l^{2k})``,
the remainder of the asymptotic expansion of ``log l - H_l + gamma + 1/(2l)``.
We sum ``l = 2..L`` explicitly and replace the tail by the same expansion
integrated against Hurwitz zeta values.  The truncation bound uses the fact
that this Bernoulli series is enveloping: its error is smaller than the
first omitted term.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import mpmath

DEFAULT_TERMS = 1000
_K = 16  # Bernoulli terms in the tail expansion
_J = 16  # terms of the 1/(4l^2 - 1) geometric expansion


@dataclass(frozen=True)
class ConstantReport:
    name: str
    value: mpmath.mpf
    precision_bits: int
    terms_used: int
    tail_bound: mpmath.mpf

    def to_json(self) -> str:
        d = asdict(self)
        d["value"] = mpmath.nstr(self.value, max(15, int(self.precision_bits * 0.30103) - 3), strip_zeros=False)
        d["tail_bound"] = mpmath.nstr(self.tail_bound, 5)
        return json.dumps(d)


def _check(precision):
    if precision < 64:
        raise ValueError("precision must be at least 64 bits")


def _bern(k):
    return mpmath.bernoulli(2 * k) / (2 * k)


def _explicit(L, weight, shift):
    """sum_{l=2}^{L} weight(l) * (log l - H_l + gamma + 1/(2l) - shift/(12 l^2))."""
    gamma = mpmath.euler
    harmonic = mpmath.mpf(1)
    total = mpmath.mpf(0)
    for ell in range(2, L + 1):
        harmonic += mpmath.mpf(1) / ell
        e = mpmath.log(ell) - harmonic + gamma + mpmath.mpf(1) / (2 * ell)
        if shift:
            e -= mpmath.mpf(1) / (12 * ell * ell)
        total += weight(ell) * e
    return total


def _quarter_geometric_tail(L, m):
    """sum_{l>L} l^2/(4l^2-1) E_m(l) and its truncation bound."""
    a = L + 1
    tail = mpmath.mpf(0)
    for k in range(m, _K + 1):
        for j in range(_J + 1):
            tail += _bern(k) * mpmath.mpf(4) ** (-j - 1) * mpmath.zeta(2 * k + 2 * j, a)
    # omitted Bernoulli terms, weight <= 1/4 * 1/(1 - 1/(4a^2))
    wmax = mpmath.mpf(1) / 4 / (1 - mpmath.mpf(1) / (4 * a * a))
    bound = wmax * abs(_bern(_K + 1)) * mpmath.zeta(2 * _K + 2, a)
    # omitted geometric terms; |E_m(l)| <= |B_{2m}|/(2m) l^{-2m}
    bound += abs(_bern(m)) * mpmath.mpf(4) ** (-_J - 2) * mpmath.zeta(2 * m + 2 * _J + 2, a) * 4 / 3
    return tail, bound


def _series_S(terms):
    """S = sum_{l>=2} l^2/(4l^2-1) (log l - H_l + gamma + 1/(2l))."""
    explicit = _explicit(terms, lambda ell: mpmath.mpf(ell * ell) / (4 * ell * ell - 1), shift=False)
    tail, bound = _quarter_geometric_tail(terms, 1)
    return explicit + tail, bound


def constant_H(precision: int = 256, terms: int = DEFAULT_TERMS) -> ConstantReport:
    """H = 16/(3 pi^2) (4 gamma + 1) + 64/pi^2 * S."""
    _check(precision)
    with mpmath.workprec(precision + 32):
        s, bound = _series_S(terms)
        pi2 = mpmath.pi**2
        value = 16 / (3 * pi2) * (4 * mpmath.euler + 1) + 64 / pi2 * s
        tail_bound = 64 / pi2 * bound + mpmath.ldexp(terms, -precision)
    with mpmath.workprec(precision):
        return ConstantReport("H", +value, precision, terms - 1, +tail_bound)


def constant_hprime0(precision: int = 256, terms: int = DEFAULT_TERMS) -> ConstantReport:
    """h'(0) = sum_{l>=2} l (H_l - log l - gamma - 1/(2l) + 1/(12 l^2))."""
    _check(precision)
    with mpmath.workprec(precision + 32):
        # summand is -l * E_2(l)
        explicit = _explicit(terms, lambda ell: -ell, shift=True)
        a = terms + 1
        tail = -mpmath.fsum(_bern(k) * mpmath.zeta(2 * k - 1, a) for k in range(2, _K + 1))
        bound = abs(_bern(_K + 1)) * mpmath.zeta(2 * _K + 1, a) + mpmath.ldexp(terms, -precision)
        value = explicit + tail
    with mpmath.workprec(precision):
        return ConstantReport("h'(0)", +value, precision, terms - 1, +bound)


def constant_h_half(precision: int = 256, terms: int = DEFAULT_TERMS) -> ConstantReport:
    """h(1/2) from its defining series.

    The explicit part evaluates ``Gamma(3/2 + l) Gamma(3/2 - l)`` directly; only
    the tail uses the closed form ``(-1)^(l+1) (pi/4) (4 l^2 - 1)`` of that product.
    """
    _check(precision)
    with mpmath.workprec(precision + 32):
        half = mpmath.mpf(1) / 2

        def weight(ell):
            sign = 1 if ell % 2 == 0 else -1
            return sign * ell * ell / (mpmath.gamma(half + ell + 1) * mpmath.gamma(half - ell + 1))

        explicit = _explicit(terms, weight, shift=True)
        tail, bound = _quarter_geometric_tail(terms, 2)
        c = -4 / mpmath.pi
        value = explicit + c * tail
        bound = abs(c) * bound + mpmath.ldexp(terms, -precision)
    with mpmath.workprec(precision):
        return ConstantReport("h(1/2)", +value, precision, terms - 1, +bound)


def h_from_h_half(h_half, precision: int = 256):
    """(8 / (9 pi^2)) (24 gamma + 7 - 18 pi h(1/2))"""
    with mpmath.workprec(precision):
        return 8 / (9 * mpmath.pi**2) * (24 * mpmath.euler + 7 - 18 * mpmath.pi * h_half)


def second_order_constant(precision: int = 256, hprime0=None):
    """13 gamma / 12 + log sqrt(2 pi) + 1/4 - h'(0)"""
    if hprime0 is None:
        hprime0 = constant_hprime0(precision).value
    with mpmath.workprec(precision):
        return 13 * mpmath.euler / 12 + mpmath.log(mpmath.sqrt(2 * mpmath.pi)) + mpmath.mpf(1) / 4 - hprime0
