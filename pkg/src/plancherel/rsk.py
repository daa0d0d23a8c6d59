"""Robinson-Schensted insertion, random permutations, the Plancherel growth
process and Monte Carlo estimates of diagram statistics.

Randomness comes from numpy's counter-based Philox generator.  Monte Carlo
work is cut into fixed blocks of ``BLOCK`` trials and block ``b`` draws from
the stream ``SeedSequence(seed, spawn_key=(b,))``, so results depend on the
seed only, not on how many workers process the blocks.
"""
from __future__ import annotations

import bisect
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from . import partitions as pc
from .oracle import growth_transitions
from .partitions import Partition

BLOCK = 4096


# ------------------------------------------------------------------ tableaux


@dataclass(frozen=True)
class StandardTableau:
    rows: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        rows = tuple(tuple(int(v) for v in r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        for r in rows:
            if not r:
                raise ValueError("rows must be non-empty")
            if any(v < 1 for v in r):
                raise ValueError("entries must be positive")
            if any(a >= b for a, b in zip(r, r[1:])):
                raise ValueError(f"row {r} is not strictly increasing")
        for upper, lower in zip(rows, rows[1:]):
            if len(lower) > len(upper):
                raise ValueError("row lengths must weakly decrease")
            if any(a >= b for a, b in zip(upper, lower)):
                raise ValueError("columns must strictly increase downwards")

    @property
    def shape(self) -> Partition:
        return Partition(tuple(len(r) for r in self.rows))

    @property
    def size(self) -> int:
        return sum(len(r) for r in self.rows)

    def entries(self) -> list[int]:
        return [v for r in self.rows for v in r]

    def is_standard(self) -> bool:
        """Entries are exactly 1..size."""
        return sorted(self.entries()) == list(range(1, self.size + 1))

    def to_lists(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def __str__(self) -> str:
        return "\n".join(" ".join(str(v) for v in r) for r in self.rows)


@dataclass(frozen=True)
class RskOutput:
    p: StandardTableau
    q: StandardTableau
    shape: Partition
    bump_total: int


def row_insert(p: StandardTableau, v: int) -> tuple[StandardTableau, int, tuple[int, int]]:
    """Schensted row insertion of ``v``.

    Returns the new tableau, the number of displaced entries and the added
    box as a 1-based ``(row, column)``.
    """
    v = int(v)
    if v < 1:
        raise ValueError("inserted value must be positive")
    rows = [list(r) for r in p.rows]
    bumps = 0
    for i, row in enumerate(rows):
        j = bisect.bisect_left(row, v)
        if j < len(row) and row[j] == v:
            raise ValueError(f"value {v} already present")
        if j == len(row):
            row.append(v)
            return StandardTableau(rows), bumps, (i + 1, j + 1)
        row[j], v = v, row[j]
        bumps += 1
    rows.append([v])
    return StandardTableau(rows), bumps, (len(rows), 1)


def _check_permutation(perm: Sequence[int]) -> tuple[int, ...]:
    perm = tuple(int(v) for v in perm)
    if sorted(perm) != list(range(1, len(perm) + 1)):
        raise ValueError("input is not a permutation of 1..n")
    return perm


def parse_permutation(text: str) -> tuple[int, ...]:
    """One-line notation ``"7,5,1,8,6,3,4,2"`` (commas or spaces).

    For n <= 9 the unseparated form ``"75186342"`` is accepted too.
    """
    text = text.strip()
    if not text:
        return ()
    tokens = text.replace(",", " ").split()
    if len(tokens) == 1 and len(text) > 1 and "0" not in text:
        tokens = list(text)
    return _check_permutation(int(tok) for tok in tokens)


def format_permutation(perm: Sequence[int]) -> str:
    return ",".join(str(v) for v in perm)


def rsk(perm: Sequence[int]) -> RskOutput:
    perm = _check_permutation(perm)
    p_rows: list[list[int]] = []
    q_rows: list[list[int]] = []
    total = 0
    for step, v in enumerate(perm, start=1):
        for i, row in enumerate(p_rows):
            j = bisect.bisect_left(row, v)
            if j == len(row):
                row.append(v)
                q_rows[i].append(step)
                break
            row[j], v = v, row[j]
            total += 1
        else:
            p_rows.append([v])
            q_rows.append([step])
    p = StandardTableau(p_rows)
    q = StandardTableau(q_rows)
    shape = p.shape
    if total != pc.y_bump(shape):
        raise AssertionError("bump total differs from Y of the shape")
    return RskOutput(p, q, shape, total)


# ------------------------------------------------------------- randomness


def generator(seed: int, block: int | None = None) -> np.random.Generator:
    ss = np.random.SeedSequence(seed) if block is None else np.random.SeedSequence(seed, spawn_key=(block,))
    return np.random.Generator(np.random.Philox(ss))


def sample_permutation(n: int, seed: int | np.random.Generator) -> tuple[int, ...]:
    """Uniform permutation of 1..n (Fisher-Yates under numpy's ``permutation``)."""
    if n < 1:
        raise ValueError("n must be positive")
    rng = seed if isinstance(seed, np.random.Generator) else generator(seed)
    return tuple(int(v) for v in rng.permutation(n) + 1)


def permutation_block(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    base = np.broadcast_to(np.arange(1, n + 1, dtype=np.int64), (count, n))
    return rng.permuted(base, axis=1)


def _randbelow(rng: np.random.Generator, m: int) -> int:
    """Uniform integer in [0, m) for arbitrarily large m, by rejection."""
    if m < 1:
        raise ValueError("m must be positive")
    if m < 2**62:
        return int(rng.integers(0, m))
    k = m.bit_length()
    nbytes = (k + 7) // 8
    while True:
        x = int.from_bytes(rng.bytes(nbytes), "little") >> (8 * nbytes - k)
        if x < m:
            return x


# ------------------------------------------------------------ growth process


def growth_probabilities(lam) -> list[tuple[Partition, Fraction]]:
    """Exact cover probabilities ``f_mu / ((n+1) f_lambda)``; they sum to 1."""
    parts = tuple(lam)
    n = sum(parts)
    f_lam = pc.syt_count(parts)
    probs = [(Partition(mu), Fraction(f_mu, (n + 1) * f_lam)) for mu, f_mu, _ in growth_transitions(parts)]
    if sum(p for _, p in probs) != 1:
        raise AssertionError("cover probabilities do not sum to 1")
    return probs


def growth_step(lam, state: int | np.random.Generator) -> Partition:
    """One step of the Plancherel growth process from ``lam``.

    Draws an integer uniformly below ``(n+1) f_lambda`` and walks the
    cumulative ``f_mu``, so the step is exact with no float rounding.
    """
    parts = tuple(lam)
    rng = state if isinstance(state, np.random.Generator) else generator(state)
    n = sum(parts)
    covers = growth_transitions(parts)
    total = (n + 1) * pc.syt_count(parts)
    if sum(f for _, f, _ in covers) != total:
        raise AssertionError("cover weights do not sum to (n+1) f_lambda")
    u = _randbelow(rng, total)
    for mu, f_mu, _ in covers:
        if u < f_mu:
            return Partition(mu)
        u -= f_mu
    raise AssertionError("unreachable")


def growth_chain(n: int, samples: int, seed: int) -> dict[Partition, int]:
    """Shapes after ``n`` growth steps from the empty diagram, as counts.

    Samples sharing a current shape are advanced together: one integer
    draw each against that shape's cumulative cover weights.
    """
    if n < 0 or samples < 1:
        raise ValueError("need n >= 0 and samples >= 1")
    rng = generator(seed)
    states = {(): samples}
    for m in range(n):
        nxt: dict[tuple[int, ...], int] = {}
        for parts in sorted(states):
            count = states[parts]
            covers = growth_transitions(parts)
            total = (m + 1) * pc.syt_count(parts)
            cum = np.cumsum([f for _, f, _ in covers], dtype=object)
            if cum[-1] != total:
                raise AssertionError("cover weights do not sum to (n+1) f_lambda")
            if total < 2**62:
                u = rng.integers(0, total, size=count)
                picks = np.searchsorted(cum.astype(np.int64), u, side="right")
                tally = np.bincount(picks, minlength=len(covers))
            else:
                tally = np.zeros(len(covers), dtype=np.int64)
                for _ in range(count):
                    tally[bisect.bisect_right(list(cum), _randbelow(rng, total))] += 1
            for (mu, _, _), c in zip(covers, tally):
                if c:
                    nxt[mu] = nxt.get(mu, 0) + int(c)
        states = nxt
    return {Partition(p): c for p, c in states.items()}


# ------------------------------------------------------------ Monte Carlo


@dataclass
class Moments:
    """Count, mean and central moment sums M2..M4, mergeable across blocks."""

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0
    m3: float = 0.0
    m4: float = 0.0

    @classmethod
    def of(cls, x: np.ndarray) -> "Moments":
        x = np.asarray(x, dtype=np.float64)
        if len(x) == 0:
            return cls()
        mu = float(x.mean())
        d = x - mu
        d2 = d * d
        return cls(len(x), mu, float(d2.sum()), float((d2 * d).sum()), float((d2 * d2).sum()))

    def merge(self, other: "Moments") -> "Moments":
        # pairwise update for combining central moments of two samples
        na, nb = self.count, other.count
        if na == 0:
            return other
        if nb == 0:
            return self
        n = na + nb
        d = other.mean - self.mean
        mean = self.mean + d * nb / n
        m2 = self.m2 + other.m2 + d * d * na * nb / n
        m3 = (
            self.m3
            + other.m3
            + d**3 * na * nb * (na - nb) / n**2
            + 3 * d * (na * other.m2 - nb * self.m2) / n
        )
        m4 = (
            self.m4
            + other.m4
            + d**4 * na * nb * (na * na - na * nb + nb * nb) / n**3
            + 6 * d * d * (na * na * other.m2 + nb * nb * self.m2) / n**2
            + 4 * d * (na * other.m3 - nb * self.m3) / n
        )
        return Moments(n, mean, m2, m3, m4)

    @property
    def variance(self) -> float:
        return self.m2 / (self.count - 1) if self.count > 1 else 0.0

    @property
    def stderr(self) -> float:
        return math.sqrt(self.variance / self.count) if self.count else 0.0

    @property
    def variance_stderr(self) -> float:
        """Large-sample standard error of the sample variance."""
        n = self.count
        if n < 4:
            return float("nan")
        s2 = self.variance
        mu4 = self.m4 / n
        return math.sqrt(max(mu4 - s2 * s2 * (n - 3) / (n - 1), 0.0) / n)


@dataclass
class MonteCarloRecord:
    statistic: str
    n: int
    trials: int
    mean: float
    variance: float
    stderr: float
    seed: int
    variance_stderr: float

    def to_json(self) -> str:
        return json.dumps(asdict(self))


STATISTICS = ("x_plus_y", "x_minus_y", "durfee", "bump_total")


def _check_statistic(name: str):
    if name in STATISTICS:
        return
    if name.startswith("profile:"):
        try:
            a = int(name.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad statistic {name!r}") from None
        if a >= 0:
            return
    raise ValueError(f"unknown statistic {name!r}; choose from {', '.join(STATISTICS)} or profile:<a>")


def shape_statistics(rows: np.ndarray, bumps: np.ndarray, statistics: Iterable[str]) -> dict[str, np.ndarray]:
    """Per-trial statistic values from padded row-length arrays."""
    trials, n = rows.shape
    i = np.arange(n, dtype=np.int64)
    out = {}
    y = None
    x = None
    for name in statistics:
        if name in ("x_plus_y", "x_minus_y"):
            if y is None:
                y = rows @ i
                x = (rows * (rows - 1) // 2).sum(axis=1)
            out[name] = x + y if name == "x_plus_y" else x - y
        elif name == "durfee":
            out[name] = (rows > i).sum(axis=1)
        elif name == "bump_total":
            out[name] = bumps
        else:
            a = int(name.split(":", 1)[1])
            # content -a: column i - a of row i exists; content +a: column i + a of row i exists
            below = (rows[:, a:] > i[: n - a]).sum(axis=1) if a < n else np.zeros(trials, dtype=np.int64)
            above = (rows > i + a).sum(axis=1)
            out[name] = (below + above) / 2.0
    return out


def _block_moments(args) -> dict[str, Moments]:
    n, count, seed, block, statistics, backend = args
    rng = generator(seed, block)
    perms = permutation_block(n, count, rng)
    rows, bumps = _kernels.rsk_batch(perms, backend)
    vals = shape_statistics(rows, bumps, statistics)
    return {k: Moments.of(v) for k, v in vals.items()}


def monte_carlo(
    n: int,
    trials: int,
    seed: int = 0,
    statistics: Sequence[str] = ("x_plus_y",),
    workers: int = 1,
    backend: str | None = None,
) -> list[MonteCarloRecord]:
    """Sample means, variances and standard errors over uniform permutations of size n."""
    if n < 1:
        raise ValueError("n must be positive")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if workers < 1:
        raise ValueError("workers must be at least 1")
    statistics = tuple(statistics)
    for s in statistics:
        _check_statistic(s)
    jobs = []
    for b in range(math.ceil(trials / BLOCK)):
        count = min(BLOCK, trials - b * BLOCK)
        jobs.append((n, count, seed, b, statistics, backend))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_block_moments, jobs))
    else:
        parts = [_block_moments(j) for j in jobs]
    records = []
    for s in statistics:
        acc = Moments()
        for part in parts:  # fixed block order keeps results worker-independent
            acc = acc.merge(part[s])
        records.append(MonteCarloRecord(s, n, trials, acc.mean, acc.variance, acc.stderr, seed, acc.variance_stderr))
    return records
