"""Time the numba kernels against the numpy/Python fallback and check they agree.

    python benchmarks/bench_backends.py [--quick]

The numba timings exclude the first (compiling) call.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from plancherel import _kernels, rsk


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def bench_rsk(n, trials, repeat):
    perms = rsk.permutation_block(n, trials, rsk.generator(7))
    _kernels.rsk_batch(perms[:1], "numba")
    t_nb, (rows_nb, b_nb) = best_of(lambda: _kernels.rsk_batch(perms, "numba"), repeat)
    t_np, (rows_np, b_np) = best_of(lambda: _kernels.rsk_batch(perms, "numpy"), 1)
    same = np.array_equal(rows_nb, rows_np) and np.array_equal(b_nb, b_np)
    return f"rsk_batch n={n} trials={trials}", t_nb, t_np, same


def bench_omega(n, a_max, repeat):
    _kernels.omega_table([10], 2, "numba")
    t_nb, (v_nb, e_nb) = best_of(lambda: _kernels.omega_table([n], a_max, "numba"), repeat)
    t_np, (v_np, e_np) = best_of(lambda: _kernels.omega_table([n], a_max, "numpy"), 1)
    same = np.array_equal(v_nb, v_np) and np.array_equal(e_nb, e_np)
    return f"omega_table n={n} a_max={a_max}", t_nb, t_np, same


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--quick", action="store_true")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _kernels.njit is None:
        raise SystemExit("numba is disabled or missing; nothing to compare")
    if args.quick:
        cases = [lambda: bench_rsk(200, 1000, args.repeat), lambda: bench_omega(5000, 100, args.repeat)]
    else:
        cases = [
            lambda: bench_rsk(200, 4096, args.repeat),
            lambda: bench_rsk(1000, 1024, args.repeat),
            lambda: bench_omega(24798, 224, args.repeat),
            lambda: bench_omega(98943, 579, args.repeat),
        ]
    print(f"{'case':<36} {'numba s':>10} {'numpy s':>10} {'speedup':>8}  identical")
    for case in cases:
        name, t_nb, t_np, same = case()
        print(f"{name:<36} {t_nb:>10.3f} {t_np:>10.3f} {t_np / t_nb:>8.1f}  {same}")


if __name__ == "__main__":
    main()
