"""Hot loops: batched RSK shape/bump counting and the float64 omega profile.

Both have a numba version and a pure numpy/Python fallback with identical
semantics.  Set ``PLANCHEREL_DISABLE_NUMBA=1`` (or have numba missing) to use
the fallback; ``BACKEND`` says which one is active.
"""
from __future__ import annotations

import bisect
import math
import os
import types
from fractions import Fraction

import numpy as np

_DISABLED = os.environ.get("PLANCHEREL_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError
    from numba import njit
except ImportError:  # pragma: no cover - depends on the environment
    njit = None

BACKEND = "numba" if njit is not None else "numpy"

# window values are kept inside [2^-RESCALE_BITS, 2^RESCALE_BITS]
RESCALE_BITS = 256


# ------------------------------------------------------------------- RSK


def _rsk_batch_python(perms: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    trials, n = perms.shape
    shapes = np.zeros((trials, n), dtype=np.int64)
    bumps = np.zeros(trials, dtype=np.int64)
    for t in range(trials):
        rows: list[list[int]] = []
        total = 0
        for v in perms[t].tolist():
            for r, row in enumerate(rows):
                j = bisect.bisect_right(row, v)
                if j == len(row):
                    row.append(v)
                    break
                row[j], v = v, row[j]
                total += 1
            else:
                rows.append([v])
        bumps[t] = total
        for r, row in enumerate(rows):
            shapes[t, r] = len(row)
    return shapes, bumps


def _rsk_batch_numba_impl(perms):
    trials, n = perms.shape
    shapes = np.zeros((trials, n), dtype=np.int64)
    bumps = np.zeros(trials, dtype=np.int64)
    # row r holds at most n // (r + 1) entries
    starts = np.zeros(n + 1, dtype=np.int64)
    for r in range(n):
        starts[r + 1] = starts[r] + n // (r + 1)
    store = np.empty(starts[n], dtype=np.int64)
    lengths = np.zeros(n, dtype=np.int64)
    for t in range(trials):
        for r in range(n):
            lengths[r] = 0
        nrows = 0
        total = 0
        for k in range(n):
            v = perms[t, k]
            r = 0
            bound = n  # the bumped entry lands at or left of its old column
            while True:
                if r == nrows:
                    store[starts[r]] = v
                    lengths[r] = 1
                    nrows += 1
                    break
                base = starts[r]
                length = lengths[r]
                # first entry greater than v, branch-free halving
                lo = 0
                size = length if length < bound else bound
                while size > 0:
                    half = size >> 1
                    step = size - half
                    lo = lo + step if store[base + lo + half] <= v else lo
                    size = half
                if lo == length:
                    store[base + length] = v
                    lengths[r] = length + 1
                    break
                w = store[base + lo]
                store[base + lo] = v
                v = w
                bound = lo
                total += 1
                r += 1
        bumps[t] = total
        for r in range(nrows):
            shapes[t, r] = lengths[r]
    return shapes, bumps


# ---------------------------------------------------------- omega profile
#
# omega_{a,n} is iterated in double-double arithmetic (about 104 bits) with
# exact int64 coefficients.  A plain float64 copy of the iteration runs
# alongside; the gap between the two, scaled by 2^-51, is the error estimate.
# Each a carries its own power-of-two exponent so that seeds like 1/(a+1)!
# neither underflow nor overflow.

MAX_PROFILE_N = 1_000_000  # keeps 4 n^3 inside int64
_SAFETY = 16.0
_SHADOW_GAP = 2.0**-51
_DD_UNIT = 2.0**-104


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def _split(a):
    c = 134217729.0 * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _dd_mul(xh, xl, yh, yl):
    p, e = _two_prod(xh, yh)
    e += xh * yl + xl * yh
    return _quick_two_sum(p, e)


def _dd_add(xh, xl, yh, yl):
    s, e = _two_sum(xh, yh)
    e += xl + yl
    return _quick_two_sum(s, e)


def _dd_div(xh, xl, yh, yl):
    q1 = xh / yh
    ph, pl = _dd_mul(yh, yl, q1, 0.0)
    rh, rl = _dd_add(xh, xl, -ph, -pl)
    return _quick_two_sum(q1, rh / yh)


def _omega_coefficients(k, a):
    """Integer recurrence coefficients at n = k (k and a may be int64 arrays)."""
    a2 = a * a
    lead = (k + 4) * (k + a + 3) * (k - a + 3)
    c1 = 4 * k * k * k + 32 * k * k + (86 - 2 * a2) * k + 78 - 7 * a2
    c2 = -(k + 3) * (6 * k * k + 22 * k + 20 - a2)
    c3 = 4 * (k + 1) * (k + 2) * (k + 3)
    c4 = -(k + 1) * (k + 2) * (k + 3)
    return lead, c1, c2, c3, c4


def _omega_seed(a: int) -> tuple[float, float, int]:
    """1/(a+1)! as (hi + lo) * 2^exponent without underflow."""
    f = math.factorial(a + 1)
    b = f.bit_length()
    q = Fraction(1 << b, f)
    hi = float(q)
    return hi, float(q - Fraction(hi)), -b


def _omega_seeds(a_max: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    hi = np.empty(a_max + 1)
    lo = np.empty(a_max + 1)
    expo = np.empty(a_max + 1, dtype=np.int64)
    for a in range(a_max + 1):
        hi[a], lo[a], expo[a] = _omega_seed(a)
    return hi, lo, expo


def _omega_table_numpy(ns: np.ndarray, a_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised over a; each a joins the iteration at its own first index."""
    vals = np.zeros((len(ns), a_max + 1))
    errs = np.zeros((len(ns), a_max + 1))
    if len(ns) == 0:
        return vals, errs
    hi0, lo0, e = _omega_seeds(a_max)
    ia = np.arange(a_max + 1, dtype=np.int64)
    zeros = np.zeros(a_max + 1)
    # window on indices a-2..a+1: main (h, l) pairs and the float64 shadow s
    h = [zeros.copy(), zeros.copy(), zeros.copy(), hi0.copy()]
    l = [zeros.copy(), zeros.copy(), zeros.copy(), lo0.copy()]
    s = [zeros.copy(), zeros.copy(), zeros.copy(), hi0 + lo0]
    scale = np.abs(hi0)
    worst = zeros.copy()

    def emit(pos, m):
        ok = ia + 1 <= m
        rel = _SAFETY * worst * _SHADOW_GAP + 4 * _DD_UNIT
        vals[pos] = np.where(ok, np.ldexp(h[3] + l[3], e), 0.0)
        errs[pos] = np.where(ok, np.ldexp(rel * scale, e), 0.0)

    pos = 0
    while pos < len(ns) and ns[pos] <= 1:
        emit(pos, int(ns[pos]))
        pos += 1
    top = int(ns[-1])
    with np.errstate(divide="ignore", invalid="ignore"):
        for m in range(2, top + 1):
            active = ia + 2 <= m
            coeffs = _omega_coefficients(np.int64(m - 4), ia)
            ch = [c.astype(np.float64) for c in coeffs]
            cl = [(c - x.astype(np.int64)).astype(np.float64) for c, x in zip(coeffs, ch)]
            acc_h, acc_l = _dd_mul(ch[1], cl[1], h[3], l[3])
            acc_s = ch[1] * s[3]
            for j in (2, 3, 4):
                ph, pl = _dd_mul(ch[j], cl[j], h[4 - j], l[4 - j])
                acc_h, acc_l = _dd_add(acc_h, acc_l, ph, pl)
                acc_s = acc_s + ch[j] * s[4 - j]
            nh, nl = _dd_div(acc_h, acc_l, ch[0], cl[0])
            ns_ = acc_s / ch[0]
            for win, new in ((h, nh), (l, nl), (s, ns_)):
                win[:] = _shift_window(win, new, active)
            mag = np.abs(h[3])
            scale = np.where(active, np.maximum(scale, mag), scale)
            gap = np.abs((h[3] - s[3]) + l[3])
            with np.errstate(invalid="ignore"):
                worst = np.where(active & (scale > 0), np.maximum(worst, gap / scale), worst)
            need = active & ((mag > 2.0**RESCALE_BITS) | ((mag < 2.0**-RESCALE_BITS) & (mag > 0)))
            if need.any():
                shift = np.where(need, np.frexp(np.where(need, h[3], 1.0))[1], 0)
                for win in (h, l, s):
                    win[:] = [np.ldexp(x, -shift) for x in win]
                scale = np.ldexp(scale, -shift)
                e = e + shift
            while pos < len(ns) and ns[pos] == m:
                emit(pos, m)
                pos += 1
    return vals, errs


def _shift_window(win, new, active):
    return (
        np.where(active, win[1], win[0]),
        np.where(active, win[2], win[1]),
        np.where(active, win[3], win[2]),
        np.where(active, new, win[3]),
    )


def _omega_table_scalar(ns, a_max, seed_hi, seed_lo, seed_exp, rescale_bits):
    """Same iteration one a at a time; compiled with numba."""
    vals = np.zeros((ns.shape[0], a_max + 1))
    errs = np.zeros((ns.shape[0], a_max + 1))
    big = 2.0**rescale_bits
    small = 2.0**-rescale_bits
    if ns.shape[0] == 0:
        return vals, errs
    top = ns[ns.shape[0] - 1]
    for a in range(a_max + 1):
        h0 = h1 = h2 = 0.0
        l0 = l1 = l2 = 0.0
        s0 = s1 = s2 = 0.0
        h3 = seed_hi[a]
        l3 = seed_lo[a]
        s3 = h3 + l3
        e = seed_exp[a]
        scale = abs(h3)
        worst = 0.0
        pos = 0
        while pos < ns.shape[0] and ns[pos] <= a + 1:
            if ns[pos] == a + 1:
                vals[pos, a] = math.ldexp(h3 + l3, e)
                errs[pos, a] = math.ldexp(4 * _DD_UNIT * scale, e)
            pos += 1
        ai = np.int64(a)
        for m in range(a + 2, top + 1):
            lead, c1, c2, c3, c4 = _omega_coefficients(np.int64(m - 4), ai)
            d0 = float(lead)
            d1 = float(c1)
            d2 = float(c2)
            d3 = float(c3)
            d4 = float(c4)
            acc_h, acc_l = _dd_mul(d1, float(c1 - np.int64(d1)), h3, l3)
            ph, pl = _dd_mul(d2, float(c2 - np.int64(d2)), h2, l2)
            acc_h, acc_l = _dd_add(acc_h, acc_l, ph, pl)
            ph, pl = _dd_mul(d3, float(c3 - np.int64(d3)), h1, l1)
            acc_h, acc_l = _dd_add(acc_h, acc_l, ph, pl)
            ph, pl = _dd_mul(d4, float(c4 - np.int64(d4)), h0, l0)
            acc_h, acc_l = _dd_add(acc_h, acc_l, ph, pl)
            nh, nl = _dd_div(acc_h, acc_l, d0, float(lead - np.int64(d0)))
            ns_ = (d1 * s3 + d2 * s2 + d3 * s1 + d4 * s0) / d0
            h0, h1, h2, h3 = h1, h2, h3, nh
            l0, l1, l2, l3 = l1, l2, l3, nl
            s0, s1, s2, s3 = s1, s2, s3, ns_
            mag = abs(h3)
            if mag > scale:
                scale = mag
            if scale > 0:
                gap = abs((h3 - s3) + l3) / scale
                if gap > worst:
                    worst = gap
            if mag > big or (mag < small and mag > 0):
                shift = math.frexp(h3)[1]
                h0 = math.ldexp(h0, -shift)
                h1 = math.ldexp(h1, -shift)
                h2 = math.ldexp(h2, -shift)
                h3 = math.ldexp(h3, -shift)
                l0 = math.ldexp(l0, -shift)
                l1 = math.ldexp(l1, -shift)
                l2 = math.ldexp(l2, -shift)
                l3 = math.ldexp(l3, -shift)
                s0 = math.ldexp(s0, -shift)
                s1 = math.ldexp(s1, -shift)
                s2 = math.ldexp(s2, -shift)
                s3 = math.ldexp(s3, -shift)
                scale = math.ldexp(scale, -shift)
                e += shift
            while pos < ns.shape[0] and ns[pos] == m:
                rel = _SAFETY * worst * _SHADOW_GAP + 4 * _DD_UNIT
                vals[pos, a] = math.ldexp(h3 + l3, e)
                errs[pos, a] = math.ldexp(rel * scale, e)
                pos += 1
    return vals, errs


def _jit_family(*funcs):
    """njit copies of ``funcs`` whose calls to each other also go to the copies."""
    scope = dict(globals())
    out = {}
    for f in funcs:
        clone = types.FunctionType(f.__code__, scope, f.__name__, f.__defaults__, f.__closure__)
        out[f.__name__] = scope[f.__name__] = njit(clone)
    return out


if njit is not None:
    _rsk_batch_numba = njit(cache=True)(_rsk_batch_numba_impl)
    _omega_table_numba = _jit_family(
        _two_sum, _quick_two_sum, _split, _two_prod, _dd_mul, _dd_add, _dd_div, _omega_coefficients, _omega_table_scalar
    )["_omega_table_scalar"]


def rsk_batch(perms, backend: str | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Row lengths (padded with zeros to n) and bump totals for each permutation row."""
    perms = np.ascontiguousarray(perms, dtype=np.int64)
    if perms.ndim != 2:
        raise ValueError("perms must be a 2-d array")
    if (backend or BACKEND) == "numba":
        if njit is None:
            raise RuntimeError("numba backend unavailable")
        return _rsk_batch_numba(perms)
    return _rsk_batch_python(perms)


def omega_table(ns, a_max: int, backend: str | None = None) -> tuple[np.ndarray, np.ndarray]:
    """omega_{a,n} for every n in ``ns`` and a = 0..a_max, with error estimates.

    Returns ``(values, errors)``, both of shape ``(len(ns), a_max + 1)`` with
    rows in increasing order of n.
    """
    ns = np.asarray(sorted(int(n) for n in ns), dtype=np.int64)
    if len(ns) and (ns[0] < 0 or ns[-1] > MAX_PROFILE_N):
        raise ValueError(f"n must lie in [0, {MAX_PROFILE_N}]")
    if a_max < 0:
        raise ValueError("a_max must be non-negative")
    if (backend or BACKEND) == "numba":
        if njit is None:
            raise RuntimeError("numba backend unavailable")
        hi, lo, expo = _omega_seeds(a_max)
        return _omega_table_numba(ns, a_max, hi, lo, expo, RESCALE_BITS)
    return _omega_table_numpy(ns, a_max)
