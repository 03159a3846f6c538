#!/usr/bin/env python3
"""Benchmarks the enumeration kernel backends against each other.

The kernel is the hot inner loop of exhaustive certification and the exact
robustness metric: it streams every candidate-index assignment of a radius
slice. Run after building the extension:

    python benchmarks/bench_enum.py
    python benchmarks/bench_enum.py --positions 40 --alternatives 5 --radius 3
"""

from __future__ import annotations

import argparse
import time

from wsrobust import _kernels


def run(fn, counts, radius, chunk) -> tuple[int, float]:
    started = time.perf_counter()
    rows = 0
    for block in fn(counts, radius, chunk):
        rows += len(block)
    return rows, time.perf_counter() - started


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--positions", type=int, default=40)
    parser.add_argument("--alternatives", type=int, default=5)
    parser.add_argument("--radius", type=int, default=3)
    parser.add_argument("--chunk", type=int, default=4096)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    counts = [args.alternatives] * args.positions
    backends = _kernels.backends()
    print(
        f"space: {args.positions} positions x {args.alternatives} alternatives, "
        f"radius {args.radius}, chunk {args.chunk}"
    )
    print(f"selected backend: {_kernels.BACKEND}\n")

    results = {}
    for name, fn in backends.items():
        best = None
        rows = 0
        for _ in range(args.repeats):
            rows, elapsed = run(fn, counts, args.radius, args.chunk)
            best = elapsed if best is None else min(best, elapsed)
        results[name] = (rows, best)
        print(f"{name:>8}: {rows:>12,} rows in {best:8.3f}s  ({rows / best:>12,.0f} rows/s)")

    if len(results) == 2:
        py_time = results["python"][1]
        cy_time = results["cython"][1]
        print(f"\nspeedup: {py_time / cy_time:.1f}x (cython over python)")


if __name__ == "__main__":
    main()
