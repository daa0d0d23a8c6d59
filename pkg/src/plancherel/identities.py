"""Exact checks of the rational identities behind the convolution formulas.

Every identity here is an equality of rationals on integer arguments, and
the infinite sums terminate because ``p(n, r)`` and ``q(n, r)`` vanish once
``r`` reaches ``n``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

from . import oracle
from .formulas import kr_constant, p_poly, q_poly

f = math.factorial


@dataclass
class IdentityReport:
    identity: str
    cases: list[dict] = field(default_factory=list)

    @property
    def violations(self) -> list[dict]:
        return [c for c in self.cases if not c["pass"]]

    @property
    def passed(self) -> bool:
        return not self.violations

    def add(self, args: dict, lhs: Fraction, rhs: Fraction):
        self.cases.append({**args, "lhs": str(lhs), "rhs": str(rhs), "pass": lhs == rhs})

    def summary(self) -> dict:
        bad = self.violations
        return {
            "identity": self.identity,
            "pass": not bad,
            "cases": len(self.cases),
            "violations": len(bad),
            "first_violation": bad[0] if bad else None,
        }

    def to_json(self, detail: bool = True) -> str:
        out = self.summary()
        if detail:
            out["results"] = self.cases
        return json.dumps(out)


def x_expansion(x: int) -> Fraction:
    """1 + sum_r C(2r, r) (-1)^r / ((1 - 2r) (2r+1)!) p(x, r); equals x for x >= 1."""
    total = Fraction(1)
    for r in range(1, x):
        total += Fraction(math.comb(2 * r, r) * (-1) ** r * p_poly(x, r), (1 - 2 * r) * f(2 * r + 1))
    return total


def kron_hooks(ell: int, n: int) -> Fraction:
    """sum_{r >= ell-1} (-1)^(ell+r+1) 2 ell^2 / ((r+ell+1)! (r-ell+1)!) p(n, r)"""
    total = Fraction(0)
    for r in range(max(ell - 1, 0), n):
        total += Fraction((-1) ** (ell + r + 1) * 2 * ell * ell * p_poly(n, r), f(r + ell + 1) * f(r - ell + 1))
    return total


def kron_contents(ell: int, n: int) -> Fraction:
    """sum_{r >= ell} (-1)^(ell+r) (2 - [n = 0]) / ((r+ell)! (r-ell)!) q(n, r)"""
    c = 1 if n == 0 else 2
    total = Fraction(0)
    for r in range(ell, n + 1):
        total += Fraction((-1) ** (ell + r) * c * q_poly(n, r), f(r + ell) * f(r - ell))
    return total


def _alternating(r: int, weight: Callable[[int], Fraction]) -> Fraction:
    return sum(
        (Fraction((-1) ** ell, f(r + ell) * f(r - ell)) * weight(ell) for ell in range(2, r + 1)),
        Fraction(0),
    )


def _harmonic(m: int) -> Fraction:
    return sum((Fraction(1, k) for k in range(1, m + 1)), Fraction(0))


_SUMS = {
    "sumA": (lambda ell: ell * ell, lambda r: Fraction(1, f(r - 1) * f(r + 1))),
    "sumB": (lambda ell: ell, lambda r: Fraction(3 * (r - 1), 2 * (2 * r - 1) * f(r - 1) * f(r + 1))),
    "sumC": (lambda ell: 1, lambda r: Fraction(r - 1, 2 * r * f(r - 1) * f(r + 1))),
    "sumD": (
        lambda ell: ell * ell * (_harmonic(ell) - 1),
        lambda r: Fraction(1, 4 * (r - 1) * (2 * r - 1) * f(r - 1) ** 2),
    ),
}

IDENTITIES = ("x-expansion", "kron-hooks", "kron-contents", "sumA", "sumB", "sumC", "sumD", "pan", "fuj")

DEFAULT_RANGES = {
    "x-expansion": range(1, 51),
    "kron-hooks": range(1, 41),
    "kron-contents": range(0, 41),
    "sumA": range(2, 41),
    "sumB": range(2, 41),
    "sumC": range(2, 41),
    "sumD": range(2, 41),
    "pan": (range(1, 21), range(1, 7)),
    "fuj": (range(1, 21), range(0, 7)),
}


def verify_identity(identity: str, range_=None, *, workers: int = 1) -> IdentityReport:
    """Evaluate ``identity`` exactly over ``range_`` (see ``DEFAULT_RANGES``).

    For the two Kronecker-delta identities the range applies to both
    ``ell`` and ``n``; for ``pan`` and ``fuj`` it is a pair ``(n_range, r_range)``
    and the left side is the Plancherel average from the enumeration oracle.
    """
    if identity not in IDENTITIES:
        raise KeyError(f"unknown identity {identity!r}; choose from {', '.join(IDENTITIES)}")
    rng = DEFAULT_RANGES[identity] if range_ is None else range_
    report = IdentityReport(identity)
    if identity == "x-expansion":
        for x in rng:
            report.add({"x": x}, x_expansion(x), Fraction(x))
    elif identity in ("kron-hooks", "kron-contents"):
        fn = kron_hooks if identity == "kron-hooks" else kron_contents
        values = list(rng)
        for ell in values:
            for n in values:
                report.add({"l": ell, "n": n}, fn(ell, n), Fraction(int(ell == n)))
    elif identity in _SUMS:
        weight, closed = _SUMS[identity]
        for r in rng:
            report.add({"r": r}, _alternating(r, weight), closed(r))
    else:
        n_range, r_range = rng
        for n in n_range:
            for r in r_range:
                if identity == "pan":
                    lhs = oracle.expect_exact(n, f"hook_p:{r}", workers=workers)
                    rhs = kr_constant(r) * math.comb(n, r + 1) if r >= 1 else Fraction(n)
                else:
                    lhs = oracle.expect_exact(n, f"content_q:{r}", workers=workers)
                    rhs = Fraction(f(2 * r), f(r + 1)) * math.comb(n, r + 1)
                report.add({"n": n, "r": r}, lhs, rhs)
    return report


def verify_all(identities: Iterable[str] = IDENTITIES, workers: int = 1) -> list[IdentityReport]:
    return [verify_identity(i, workers=workers) for i in identities]
