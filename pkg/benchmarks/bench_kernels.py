"""Compare the numba and numpy counting kernels.

Usage::

    python3 benchmarks/bench_kernels.py [--n 10000000] [--repeat 5]

Prints the best wall time per kernel and backend, and checks that both
backends return identical results.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from cevm import _kernels


def best_time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=10_000_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    x = 1.0 / (1.0 - rng.random(args.n))
    y = 1.0 / (1.0 - rng.random(args.n))
    thresholds = np.geomspace(1.0, 1e4, 16)
    rects = np.array([[-np.inf, a, b, np.inf] for a in (1.0, 10.0, 100.0) for b in (1.0, 10.0, 100.0)])

    numba = _kernels.NUMBA_KERNELS
    if numba is None:
        print("numba unavailable; only the numpy backend can be timed")
        return
    cases = {
        "count_exceed (16 thresholds)": lambda k: k.count_exceed(x, thresholds),
        "count_rects (9 rectangles)": lambda k: k.count_rects(x, y, rects),
        "pivot 1/(c - xy)": lambda k: k.pivot(_kernels.PIVOT_INV_SHIFT_MINUS_XY, x, y, 1.0),
    }
    print(f"n = {args.n:,}, best of {args.repeat}")
    print(f"{'kernel':32s} {'numpy [s]':>10s} {'numba [s]':>10s} {'speedup':>8s}")
    for name, call in cases.items():
        ref = call(_kernels.NUMPY_KERNELS)
        got = call(numba)  # also triggers compilation outside the timed loop
        if not np.array_equal(ref, got, equal_nan=True):
            raise SystemExit(f"backend mismatch in {name}")
        t_np = best_time(lambda: call(_kernels.NUMPY_KERNELS), args.repeat)
        t_nb = best_time(lambda: call(numba), args.repeat)
        print(f"{name:32s} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:7.1f}x")


if __name__ == "__main__":
    main()
