"""Brute-force Plancherel averages over the full set of partitions of n.

Every expectation here is a literal weighted sum over ``lambda |- n`` with
weights ``f_lambda^2 / n!``.  Sums are accumulated as integers against the
common denominator ``n!`` and reduced once at the end, so results are exact
and independent of chunking or worker count.
"""
from __future__ import annotations

import json
import math
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Callable, Union

import mpmath

from . import partitions as pc
from .formulas import p_poly, q_poly

DEFAULT_CAP = 60

Functional = Union[str, Callable]


class EnumerationCapError(ValueError):
    """Requested n exceeds the configured enumeration cap."""


# --------------------------------------------------------------- functionals


def _x_plus_y(parts):
    return pc.y_bump(parts) + pc.y_bump(pc._conjugate_parts(parts))


def _x_minus_y(parts):
    return pc.y_bump(pc._conjugate_parts(parts)) - pc.y_bump(parts)


def _make_phi(a):
    return lambda parts: pc.phi(parts, a)


def _make_psi(a):
    return lambda parts: pc.psi(parts, a)


def _make_hook_p(r):
    return lambda parts: sum(p_poly(h, r) for h in pc._hooks(parts))


def _make_content_q(r):
    def f(parts):
        return sum(q_poly(j - i, r) for i, row in enumerate(parts) for j in range(row))

    return f


def _make_hook_count(ell):
    return lambda parts: sum(1 for h in pc._hooks(parts) if h == ell)


_SIMPLE = {
    "x_plus_y": _x_plus_y,
    "x_minus_y": _x_minus_y,
    "y_bump": pc.y_bump,
    "bump_total": pc.y_bump,  # RSK bumping steps equal Y of the shape
    "x_bump": lambda parts: pc.y_bump(pc._conjugate_parts(parts)),
    "durfee": pc.durfee,
    "one": lambda parts: 1,
}

_PARAMETRIC = {
    "phi": _make_phi,
    "psi": _make_psi,
    "hook_p": _make_hook_p,
    "content_q": _make_content_q,
    "hook_count": _make_hook_count,
}


def functional_ids() -> list[str]:
    return sorted(_SIMPLE) + [f"{k}:<int>" for k in sorted(_PARAMETRIC)]


@lru_cache(maxsize=None)
def _lookup(name: str) -> Callable:
    if name in _SIMPLE:
        return _SIMPLE[name]
    head, sep, arg = name.partition(":")
    if sep and head in _PARAMETRIC:
        try:
            value = int(arg)
        except ValueError:
            raise KeyError(name) from None
        return _PARAMETRIC[head](value)
    raise KeyError(f"unknown functional {name!r}")


def resolve(functional: Functional) -> tuple[str | None, Callable]:
    if callable(functional):
        return None, functional
    return functional, _lookup(functional)


# ----------------------------------------------------------------- reductions


def _check_cap(n: int, cap: int | None):
    if n < 0:
        raise ValueError("n must be non-negative")
    limit = DEFAULT_CAP if cap is None else cap
    if n > limit:
        raise EnumerationCapError(f"n={n} exceeds enumeration cap {limit}")


def _chunk_moments(n: int, first_part: int, name_or_fn, orders: tuple[int, ...]):
    fn = _lookup(name_or_fn) if isinstance(name_or_fn, str) else name_or_fn
    nfact = math.factorial(n)
    sums = [0] * len(orders)
    for parts in pc.iter_parts(n, first_part):
        f = nfact // math.prod(pc._hooks(parts))
        w = f * f
        value = fn(parts)
        for k, order in enumerate(orders):
            sums[k] += w * value**order
    return sums


def _reduce(n, functional, orders, workers):
    name, fn = resolve(functional)
    keys = pc.chunk_keys(n)
    if workers > 1 and name is not None and len(keys) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts_sums = list(
                pool.map(_chunk_moments, [n] * len(keys), keys, [name] * len(keys), [orders] * len(keys))
            )
    else:
        parts_sums = [_chunk_moments(n, key, fn, orders) for key in keys]
    nfact = math.factorial(n)
    totals = [sum(col) for col in zip(*parts_sums)]
    return [Fraction(t) / nfact for t in totals]


def moments_exact(
    n: int, functional: Functional, orders=(1, 2), *, cap: int | None = None, workers: int = 1
) -> list[Fraction]:
    """Exact ``E[F^k]`` for each k in ``orders`` in a single enumeration pass."""
    _check_cap(n, cap)
    return _reduce(n, functional, tuple(orders), workers)


def expect_exact(
    n: int,
    functional: Functional,
    *,
    cap: int | None = None,
    workers: int = 1,
    cache: "OracleCache | None" = None,
) -> Fraction:
    _check_cap(n, cap)
    name, _ = resolve(functional)
    if cache is not None and name is not None:
        hit = cache.get(name, n)
        if hit is not None:
            return hit
    (value,) = _reduce(n, functional, (1,), workers)
    if cache is not None and name is not None:
        cache.put(name, n, value)
    return value


def variance_exact(
    n: int,
    functional: Functional,
    *,
    cap: int | None = None,
    workers: int = 1,
    cache: "OracleCache | None" = None,
) -> Fraction:
    _check_cap(n, cap)
    name, _ = resolve(functional)
    key = f"var:{name}" if name is not None else None
    if cache is not None and key is not None:
        hit = cache.get(key, n)
        if hit is not None:
            return hit
    m1, m2 = _reduce(n, functional, (1, 2), workers)
    value = m2 - m1 * m1
    if cache is not None and key is not None:
        cache.put(key, n, value)
    return value


# ------------------------------------------------------------ numeric / logs


@dataclass(frozen=True)
class NumericEstimate:
    value: mpmath.mpf
    error_bound: mpmath.mpf
    precision_bits: int


def expect_numeric(
    n: int,
    functional: Functional | str = "log_hook_sum",
    precision: int = 128,
    *,
    cap: int | None = None,
) -> NumericEstimate:
    """Weighted sum of a real-valued functional carried out at ``precision`` bits.

    ``functional`` is ``"log_hook_sum"`` or a callable ``parts -> number``.
    The error bound charges a few ulps per accumulated term against the sum
    of absolute contributions.
    """
    _check_cap(n, cap)
    if functional == "log_hook_sum":
        fn = lambda parts: mpmath.log(math.prod(pc._hooks(parts))) if parts else mpmath.mpf(0)
    elif callable(functional):
        fn = functional
    else:
        raise KeyError(f"unknown real functional {functional!r}")
    nfact = math.factorial(n)
    with mpmath.workprec(precision):
        total = mpmath.mpf(0)
        absolute = mpmath.mpf(0)
        count = 0
        for parts in pc.iter_parts(n):
            f = nfact // math.prod(pc._hooks(parts))
            term = mpmath.mpf(f * f) * fn(parts)
            total += term
            absolute += abs(term)
            count += 1
        value = total / nfact
        bound = absolute / nfact * (4 * count + 8) * mpmath.ldexp(1, -precision)
    return NumericEstimate(value=value, error_bound=bound, precision_bits=precision)


def hook_length_counts(n: int, *, cap: int | None = None) -> dict[int, Fraction]:
    """Exact expected number of boxes with hook length l, for every l."""
    _check_cap(n, cap)
    nfact = math.factorial(n)
    acc: Counter = Counter()
    for parts in pc.iter_parts(n):
        hooks = pc._hooks(parts)
        f = nfact // math.prod(hooks)
        w = f * f
        for h, c in Counter(hooks).items():
            acc[h] += w * c
    return {h: Fraction(v, nfact) for h, v in sorted(acc.items())}


def _factorize(m: int) -> Counter:
    out: Counter = Counter()
    p = 2
    while p * p <= m:
        while m % p == 0:
            out[p] += 1
            m //= p
        p += 1
    if m > 1:
        out[m] += 1
    return out


def log_combination(weights: dict[int, Fraction]) -> dict[int, Fraction]:
    """Rewrite ``sum_l w_l log l`` as ``sum_p c_p log p`` over primes."""
    out: Counter = Counter()
    for ell, w in weights.items():
        for p, e in _factorize(ell).items():
            out[p] += w * e
    return {p: Fraction(c) for p, c in sorted(out.items()) if c}


def expect_log_hooks_exact(n: int, *, cap: int | None = None) -> dict[int, Fraction]:
    """``E sum_u log h_u`` as an exact rational combination of logs of primes."""
    return log_combination(hook_length_counts(n, cap=cap))


def expect_log_prob_exact(n: int, *, cap: int | None = None) -> dict[int, Fraction]:
    """``E log Pl(lambda) = log n! - 2 E sum_u log h_u`` over logs of primes."""
    out = Counter(log_combination({k: Fraction(1) for k in range(2, n + 1)}))
    for p, c in expect_log_hooks_exact(n, cap=cap).items():
        out[p] -= 2 * c
    return {p: c for p, c in sorted(out.items()) if c}


def eval_log_combination(comb: dict[int, Fraction], precision: int = 128) -> mpmath.mpf:
    with mpmath.workprec(precision):
        return mpmath.fsum(mpmath.mpf(c.numerator) / c.denominator * mpmath.log(p) for p, c in comb.items())


def format_log_combination(comb: dict[int, Fraction]) -> str:
    if not comb:
        return "0"
    return " + ".join(f"{c}*log({p})" for p, c in comb.items()).replace("+ -", "- ")


# -------------------------------------------------------------------- growth


@lru_cache(maxsize=65536)
def _f(parts: tuple[int, ...]) -> int:
    return pc.syt_count(parts)


def growth_transitions(parts) -> list[tuple[tuple[int, ...], int, int]]:
    """Covers of ``parts`` as ``(mu, f_mu, added_row)``; the transition
    probability to ``mu`` is ``f_mu / ((n+1) f_lambda)``."""
    parts = tuple(parts)
    return [(pc.add_cell(parts, i), _f(pc.add_cell(parts, i)), i) for i, _ in pc.addable_cells(parts)]


def growth_normalization_holds(parts) -> bool:
    parts = tuple(parts)
    n = sum(parts)
    return sum(f for _, f, _ in growth_transitions(parts)) == (n + 1) * _f(parts)


def growth_covariance(n: int, *, cap: int | None = None) -> Fraction:
    """Exact Cov(L_n - L_{n-1}, L_{n-1}) along the Plancherel growth process, L = X + Y.

    The joint weight of the covering pair (lambda, mu) is
    ``f_lambda f_mu / n!``; the box added at 0-based (i, j) raises L by i + j.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    _check_cap(n, cap)
    m = n - 1
    mfact = math.factorial(m)
    nfact = math.factorial(n)
    s_l = 0  # sum f_lambda^2 L_lambda
    s_d = 0  # sum f_lambda f_mu dL
    s_dl = 0  # sum f_lambda f_mu dL L_lambda
    for parts in pc.iter_parts(m):
        f_lam = mfact // math.prod(pc._hooks(parts))
        big_l = _x_plus_y(parts)
        s_l += f_lam * f_lam * big_l
        for i, j in pc.addable_cells(parts):
            f_mu = _f(pc.add_cell(parts, i))
            w = f_lam * f_mu
            s_d += w * (i + j)
            s_dl += w * (i + j) * big_l
    e_l = Fraction(s_l, mfact)
    e_d = Fraction(s_d, nfact)
    return Fraction(s_dl, nfact) - e_d * e_l


# --------------------------------------------------------------------- cache


class OracleCache:
    """JSON-lines store of exact oracle values keyed by (functional, n)."""

    def __init__(self, path: str | os.PathLike):
        self.path = Path(path)
        self._data: dict[tuple[str, int], Fraction] = {}
        if self.path.exists():
            with self.path.open() as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        rec = json.loads(line)
                        self._data[(rec["functional"], int(rec["n"]))] = Fraction(rec["value"])

    def get(self, functional: str, n: int) -> Fraction | None:
        return self._data.get((functional, n))

    def put(self, functional: str, n: int, value: Fraction):
        if (functional, n) in self._data:
            return
        self._data[(functional, n)] = value
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("a") as fh:
            fh.write(json.dumps({"functional": functional, "n": n, "value": str(value)}) + "\n")

    def __len__(self):
        return len(self._data)
