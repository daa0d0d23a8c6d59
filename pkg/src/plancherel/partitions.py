"""Integer partitions, cell statistics and the diagram functionals averaged
under Plancherel measure.

Partitions are stored as part lists.  English (matrix) convention: box
``(i, j)`` sits in row ``i`` and column ``j``, both 1-based; its content is
``j - i`` and its hook length is ``(lambda_i - j) + (lambda'_j - i) + 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

import mpmath

DEFAULT_LOG_PRECISION = 128


@dataclass(frozen=True, slots=True)
class Partition:
    parts: tuple[int, ...] = ()

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        for a, b in zip(parts, parts[1:]):
            if a < b:
                raise ValueError(f"parts must be weakly decreasing: {parts}")
        if parts and parts[-1] < 1:
            raise ValueError(f"parts must be positive: {parts}")
        object.__setattr__(self, "parts", parts)

    @property
    def n(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __str__(self) -> str:
        return ",".join(map(str, self.parts))

    @classmethod
    def parse(cls, text: str) -> "Partition":
        """Parse the comma separated text form; the empty string is the empty partition."""
        text = text.strip()
        if not text:
            return cls(())
        return cls(tuple(int(tok) for tok in text.split(",")))


@dataclass(frozen=True, slots=True)
class CellStats:
    hooks: tuple[int, ...]
    contents: tuple[int, ...]


@dataclass(frozen=True, slots=True)
class DiagramFunctionals:
    y_bump: int
    x_bump: int
    x_plus_y: int
    x_minus_y: int
    durfee: int
    log_hook_sum: mpmath.mpf


def _as_parts(lam) -> tuple[int, ...]:
    if isinstance(lam, Partition):
        return lam.parts
    return tuple(lam)


# ---------------------------------------------------------------- enumeration


def _desc_parts(n: int, max_part: int) -> Iterator[tuple[int, ...]]:
    """Partitions of ``n`` with parts <= ``max_part``, descending lexicographic."""
    if n == 0:
        yield ()
        return
    if max_part <= 0:
        return
    m = min(n, max_part)
    a = [m] * (n // m)
    if n % m:
        a.append(n % m)
    while True:
        yield tuple(a)
        # rightmost part exceeding 1
        i = len(a) - 1
        while i >= 0 and a[i] == 1:
            i -= 1
        if i < 0:
            return
        rem = len(a) - i  # trailing ones plus the unit taken from a[i]
        x = a[i] - 1
        del a[i:]
        a.append(x)
        q, r = divmod(rem, x)
        a.extend([x] * q)
        if r:
            a.append(r)


def enumerate_partitions(n: int, first_part: int | None = None) -> Iterator[Partition]:
    """Yield every partition of ``n`` once, in descending lexicographic order.

    With ``first_part`` only partitions whose largest part equals it are
    produced; the chunks ``first_part = n, n-1, ..., 1`` concatenate to the
    full enumeration, which is how work is split for parallel reductions.
    """
    for parts in iter_parts(n, first_part):
        yield Partition(parts)


def iter_parts(n: int, first_part: int | None = None) -> Iterator[tuple[int, ...]]:
    """Same as :func:`enumerate_partitions` but yields bare tuples (hot loops)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if first_part is None:
        yield from _desc_parts(n, n)
        return
    if n == 0:
        if first_part == 0:
            yield ()
        return
    if not 1 <= first_part <= n:
        return
    head = (first_part,)
    for tail in _desc_parts(n - first_part, first_part):
        yield head + tail


def chunk_keys(n: int) -> list[int]:
    """Deterministic chunk identifiers (largest parts) covering all partitions of n."""
    return [0] if n == 0 else list(range(n, 0, -1))


@lru_cache(maxsize=None)
def partition_count(n: int) -> int:
    """p(n) by the generating-function recurrence over parts."""
    table = [1] + [0] * n
    for k in range(1, n + 1):
        for m in range(k, n + 1):
            table[m] += table[m - k]
    return table[n]


# ------------------------------------------------------------ cell statistics


def conjugate(lam) -> Partition:
    parts = _as_parts(lam)
    return Partition(_conjugate_parts(parts))


def _conjugate_parts(parts: Sequence[int]) -> tuple[int, ...]:
    if not parts:
        return ()
    k = len(parts)
    out = []
    i = k
    for j in range(1, parts[0] + 1):
        while i > 0 and parts[i - 1] < j:
            i -= 1
        out.append(i)
    return tuple(out)


def _hooks(parts: Sequence[int]) -> list[int]:
    conj = _conjugate_parts(parts)
    hooks = []
    for i, row in enumerate(parts):
        for j in range(row):
            hooks.append(row - j + conj[j] - i - 1)
    return hooks


def cell_stats(lam) -> CellStats:
    """Hook lengths and contents of every box, listed row by row."""
    parts = _as_parts(lam)
    contents = tuple(j - i for i, row in enumerate(parts) for j in range(row))
    return CellStats(hooks=tuple(_hooks(parts)), contents=contents)


def hook_product(lam) -> int:
    return math.prod(_hooks(_as_parts(lam)))


def syt_count(lam) -> int:
    """Number of standard Young tableaux of shape ``lam`` (hook length formula)."""
    parts = _as_parts(lam)
    n = sum(parts)
    f, rem = divmod(math.factorial(n), math.prod(_hooks(parts)))
    assert rem == 0
    return f


def plancherel_weight(lam) -> Fraction:
    parts = _as_parts(lam)
    n = sum(parts)
    f = syt_count(parts)
    return Fraction(f * f, math.factorial(n))


def y_bump(lam) -> int:
    return sum(i * row for i, row in enumerate(_as_parts(lam)))


def durfee(lam) -> int:
    d = 0
    for i, row in enumerate(_as_parts(lam), start=1):
        if row >= i:
            d = i
        else:
            break
    return d


def log_hook_sum(lam, precision: int = DEFAULT_LOG_PRECISION) -> mpmath.mpf:
    """Sum of log hook lengths, i.e. log of the hook product, at ``precision`` bits."""
    with mpmath.workprec(precision):
        return mpmath.log(hook_product(lam))


def functionals(lam, precision: int = DEFAULT_LOG_PRECISION) -> DiagramFunctionals:
    parts = _as_parts(lam)
    y = y_bump(parts)
    x = y_bump(_conjugate_parts(parts))
    return DiagramFunctionals(
        y_bump=y,
        x_bump=x,
        x_plus_y=x + y,
        x_minus_y=x - y,
        durfee=durfee(parts),
        log_hook_sum=log_hook_sum(parts, precision),
    )


def psi(lam, a: int) -> int:
    """Number of boxes with content ``-a``."""
    parts = _as_parts(lam)
    c = -a
    # box (i, j) 0-based has content j - i; row i contains content c iff 0 <= c + i < row
    return sum(1 for i, row in enumerate(parts) if 0 <= c + i < row)


def phi(lam, a: int) -> Fraction:
    if a == 0:
        return Fraction(durfee(lam))
    return Fraction(psi(lam, a) + psi(lam, -a), 2)


def profile(lam, a: int) -> tuple[int, Fraction]:
    return psi(lam, a), phi(lam, a)


def addable_cells(parts: Sequence[int]) -> list[tuple[int, int]]:
    """0-based (row, col) positions where a box can be added."""
    cells = []
    prev = None
    for i, row in enumerate(parts):
        if prev is None or prev > row:
            cells.append((i, row))
        prev = row
    cells.append((len(parts), 0))
    return cells


def add_cell(parts: Sequence[int], row: int) -> tuple[int, ...]:
    if row == len(parts):
        return tuple(parts) + (1,)
    out = list(parts)
    out[row] += 1
    return tuple(out)
