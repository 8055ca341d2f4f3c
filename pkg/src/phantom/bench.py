"""Throughput comparison between the feature-extraction backends.

Run as ``python -m phantom.bench``. Times the compiled kernel against the
pure-Python fallback on synthetic weekly series, plus an end-to-end
parse -> series -> features pass over synthetic logs.
"""
from __future__ import annotations

import argparse
import sys
from time import perf_counter

import numpy as np

from phantom.corpus import extract_log
from phantom.features import BACKEND, available_backends
from phantom.gitlog import RepoRef, parse_log


def synthetic_series(rng: np.random.Generator, count: int,
                     max_len: int = 200) -> list[list[float]]:
    out = []
    for _ in range(count):
        n = int(rng.integers(1, max_len + 1))
        out.append([float(v) for v in rng.integers(0, 40, size=n)])
    return out


def synthetic_log_text(rng: np.random.Generator, commits: int = 100) -> str:
    base = int(rng.integers(1_400_000_000, 1_500_000_000))
    stamps = base + np.cumsum(rng.integers(3_600, 7 * 86_400, size=commits))
    authors = rng.integers(0, 5, size=commits)
    merges = rng.random(commits) < 0.1
    lines = []
    prev = ""
    for i in range(commits):
        author = f"dev{authors[i]}"
        parents = f"{prev} feedbeef" if merges[i] and prev else prev
        lines.append(f"{i:07x},{parents},{author},{author}@example.com,"
                     f"{stamps[i]},{author},{author}@example.com,{stamps[i] + 60}")
        prev = f"{i:07x}"
    return "\n".join(lines)


def bench_backends(series_count: int, seed: int) -> None:
    rng = np.random.default_rng(seed)
    series = synthetic_series(rng, series_count)
    print(f"{series_count} synthetic series "
          f"(mean length {sum(map(len, series)) / len(series):.0f}):")
    timings = {}
    for name, compute in sorted(available_backends().items()):
        start = perf_counter()
        for values in series:
            compute(values)
        timings[name] = perf_counter() - start
        rate = series_count / timings[name]
        print(f"  {name:>8}: {timings[name]:6.2f}s "
              f"({rate:,.0f} series/s, {1e6 * timings[name] / series_count:.1f} us/series)")
    if {"pure", "compiled"} <= timings.keys():
        print(f"  speedup : {timings['pure'] / timings['compiled']:.1f}x")
    else:
        print("  compiled kernel not built; only the pure backend was timed")


def bench_pipeline(log_count: int, seed: int) -> None:
    rng = np.random.default_rng(seed)
    texts = [synthetic_log_text(rng) for _ in range(log_count)]
    start = perf_counter()
    for i, text in enumerate(texts):
        log = parse_log(text, RepoRef(id=f"bench-{i}", source="bench"))
        extract_log(log)
    elapsed = perf_counter() - start
    print(f"{log_count} logs parsed + featurized (backend {BACKEND}): "
          f"{elapsed:.2f}s ({log_count / elapsed:,.0f} logs/s)")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--series", type=int, default=20_000)
    parser.add_argument("--logs", type=int, default=500)
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args(argv)
    bench_backends(args.series, args.seed)
    bench_pipeline(args.logs, args.seed)
    return 0


if __name__ == "__main__":
    sys.exit(main())
