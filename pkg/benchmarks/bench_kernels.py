#!/usr/bin/env python3
"""Benchmark the compiled kernel core against the numpy fallback.

The two hot pair scans dominate runtime at scale: the inf-convolution brute
force (O(N^2) over all grid-point pairs, N = nx*nt) and the doubling
functional scan (O(nx^2 * nt) per anchor).  Both backends compute identical
results; this script reports wall times and the speedup.

Usage: python3 benchmarks/bench_kernels.py [--sizes 24,48 ...]
"""

import argparse
import time

import numpy as np

from dplab import _kernels


def _time(fn, *args, repeats=3):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_infconv(n, backend):
    rng = np.random.default_rng(0)
    u = rng.standard_normal((n, n))
    x = np.linspace(-1, 1, n)
    t = np.linspace(-1, 0, n)
    wx = np.abs(x[:, None] - x[None, :]) ** 4 / (4 * 0.2**3)
    wt = (t[:, None] - t[None, :]) ** 2 / 0.02
    _kernels.use_backend(backend)
    return _time(_kernels.infconv_bruteforce, u, wx, wt)


def bench_psi(n, backend):
    rng = np.random.default_rng(1)
    u = rng.standard_normal((n, n))
    x = np.linspace(0, 1, n)
    lphi = np.abs(x[:, None] - x[None, :]) ** 0.6
    pen = 0.5 * (x - 0.5) ** 2
    pen_t = 0.5 * np.linspace(0, 1, n) ** 2
    _kernels.use_backend(backend)
    return _time(_kernels.psi_pair_scan, u, lphi, pen, pen, pen_t)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="16,32,48", help="comma list of n (grid is n x n)")
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    backends = ["fallback"] + (["compiled"] if _kernels.HAVE_COMPILED else [])
    if len(backends) == 1:
        print("compiled kernels unavailable; timing the fallback only")

    original = _kernels.backend_name()
    try:
        for name, bench in (("infconv_bruteforce", bench_infconv), ("psi_pair_scan", bench_psi)):
            print(f"\n{name}  (times in ms, best of 3)")
            header = f"{'n':>6} " + "".join(f"{b:>12} " for b in backends)
            print(header + ("speedup" if len(backends) == 2 else ""))
            for n in sizes:
                times = {}
                results = {}
                for b in backends:
                    times[b], results[b] = bench(n, b)
                if len(backends) == 2:
                    a, bb = results["fallback"], results["compiled"]
                    pieces = (a, bb) if isinstance(a, tuple) else ((a,), (bb,))
                    agree = all(np.array_equal(x, y) for x, y in zip(*pieces))
                    ratio = times["fallback"] / times["compiled"]
                    extra = f"{ratio:6.1f}x {'' if agree else '  (MISMATCH!)'}"
                else:
                    extra = ""
                row = f"{n:>6} " + "".join(f"{1e3 * times[b]:>11.2f} " for b in backends)
                print(row + extra)
    finally:
        _kernels.use_backend(original)


if __name__ == "__main__":
    main()
