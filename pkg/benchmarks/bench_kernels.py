#!/usr/bin/env python3
"""Throughput comparison of the compiled kernels vs the NumPy fallback.

Run:  python benchmarks/bench_kernels.py [--rows 2000000]

Exercises the three scan paths that dominate production workloads: filter
evaluation, bucket classification + counting, and per-page revert scans.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from editaudit import _pykernels

try:
    from editaudit import _kernels
except ImportError:
    _kernels = None


def make_columns(n: int, rng: np.random.Generator) -> dict:
    return dict(
        namespace=rng.integers(0, 6, n).astype(np.int64),
        page_size=rng.integers(0, 60000, n).astype(np.int64),
        byte_delta=rng.integers(-5000, 5000, n).astype(np.int64),
        is_minor=(rng.random(n) < 0.2).astype(np.uint8),
        registered=(rng.random(n) < 0.7).astype(np.uint8),
        bot=(rng.random(n) < 0.1).astype(np.uint8),
        edit_count=rng.integers(0, 100000, n).astype(np.int64),
        account_age=rng.integers(0, 86400 * 4000, n).astype(np.int64),
    )


def bench(label: str, fn, repeats: int = 5) -> float:
    fn()  # warm-up
    best = min(_timed(fn) for _ in range(repeats))
    return best


def _timed(fn) -> float:
    start = time.perf_counter()
    fn()
    return time.perf_counter() - start


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--rows", type=int, default=2_000_000)
    args = parser.parse_args()
    n = args.rows
    rng = np.random.default_rng(0)

    cols = make_columns(n, rng)
    filter_args = dict(
        has_namespaces=1,
        ns_values=np.array([0, 1], dtype=np.int64),
        page_size_lo=-(2**62),
        page_size_hi=30000,
        abs_delta_lo=10,
        abs_delta_hi=2**62,
        minor_tri=-1,
        registered_tri=1,
        bot_tri=0,
        edit_count_lo=-(2**62),
        edit_count_hi=2**62,
        account_age_lo=-(2**62),
        account_age_hi=2**62,
    )
    probs = rng.random(n)
    reverted = (rng.random(n) < 0.05).astype(np.uint8)
    rev_ids = np.arange(1, n + 1, dtype=np.int64)

    # One synthetic 5,000-revision page history per revert-scan call.
    page_n = 5000
    hashes = rng.integers(0, 64, page_n).astype(np.int64)
    ts = np.cumsum(rng.integers(1, 500, page_n)).astype(np.int64)
    editors = rng.integers(0, 40, page_n).astype(np.int64)

    backends = [("python", _pykernels)]
    if _kernels is not None:
        backends.append(("compiled", _kernels))
    else:
        print("compiled extension not available; benchmarking fallback only")

    rows = []
    for name, mod in backends:
        t_filter = bench(name, lambda m=mod: m.filter_mask(*cols.values(), **filter_args))
        t_bucket = bench(
            name,
            lambda m=mod: m.masked_bucket_counts(
                m.bucket_codes(probs, reverted, 0.5), np.ones(n, dtype=np.uint8)
            ),
        )
        t_keys = bench(name, lambda m=mod: m.sample_keys(rev_ids.astype(np.uint64), 42))
        t_revert = bench(
            name, lambda m=mod: m.detect_reverts_scan(hashes, ts, editors, 15, 10**9, 1), repeats=3
        )
        rows.append((name, t_filter, t_bucket, t_keys, t_revert))

    print(f"\nrows per scan: {n:,} (revert scan: {page_n:,}-revision page)\n")
    header = f"{'backend':<10} {'filter_mask':>12} {'bucket+count':>13} {'sample_keys':>12} {'revert_scan':>12}"
    print(header)
    print("-" * len(header))
    for name, *times in rows:
        cells = " ".join(f"{t * 1000:>10.1f}ms" for t in times)
        print(f"{name:<10} {cells}")
    if len(rows) == 2:
        print("\nspeedup (python / compiled):")
        for i, metric in enumerate(("filter_mask", "bucket+count", "sample_keys", "revert_scan")):
            print(f"  {metric:<13} {rows[0][i + 1] / rows[1][i + 1]:6.1f}x")


if __name__ == "__main__":
    main()
