"""Median-of-runs timing for the matching kernels."""
from __future__ import annotations

import gc
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import matching

MIN_N = 1024
MIN_RUNS = 5
WARMUP = 2


@dataclass(frozen=True)
class BenchReport:
    method: str
    n: int
    seconds: float  # median wall time per run
    runs: int

    @property
    def throughput(self) -> float:
        return self.n / self.seconds


def kernels(bins: int = 256, lam: float = 0.5) -> dict[str, Callable]:
    return {
        "mean": lambda x, y: matching.moment_match(x, y, "mean"),
        "std": lambda x, y: matching.moment_match(x, y, "std"),
        "adain": lambda x, y: matching.moment_match(x, y, "both"),
        "hm": matching.hist_match,
        "hm-lib": matching.hist_match_interp,
        "hm-binned": lambda x, y: matching.hist_match_binned(x, y, bins),
        "efdm": matching.efdm,
        "efdmix": lambda x, y: matching.efdmix(x, y, lam),
    }


def bench_inputs(n: int, seed: int, dtype=np.float32) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n).astype(dtype)
    y = rng.gamma(2.0, size=n).astype(dtype)
    return x, y


def _timed(fn, x, y) -> float:
    t0 = time.perf_counter()
    fn(x, y)
    return time.perf_counter() - t0


def time_call(fn: Callable, x, y, runs: int, warmup: int = WARMUP) -> float:
    """Median wall time of ``runs`` calls after ``warmup`` untimed ones."""
    for _ in range(warmup):
        fn(x, y)
    gc_was_on = gc.isenabled()
    gc.disable()
    try:
        times = [_timed(fn, x, y) for _ in range(runs)]
    finally:
        if gc_was_on:
            gc.enable()
    return float(np.median(times))


def scaling_ratio(fn: Callable, n: int, factor: int = 8, runs: int = MIN_RUNS, seed: int = 0,
                  dtype=np.float32) -> tuple[float, float]:
    """Median times at ``n`` and ``factor * n``.

    Small and large calls alternate so that drift in machine load hits both
    medians alike.
    """
    small = bench_inputs(n, seed, dtype)
    large = bench_inputs(factor * n, seed, dtype)
    for _ in range(WARMUP):
        fn(*small)
        fn(*large)
    gc_was_on = gc.isenabled()
    gc.disable()
    try:
        ts, tl = [], []
        for _ in range(runs):
            ts.append(_timed(fn, *small))
            tl.append(_timed(fn, *large))
    finally:
        if gc_was_on:
            gc.enable()
    return float(np.median(ts)), float(np.median(tl))


def run_bench(n: int, methods, runs: int = MIN_RUNS, seed: int = 0, bins: int = 256,
              dtype=np.float32) -> list[BenchReport]:
    """Time each method on the same seeded random pair of length ``n``.

    Kernels are plain numpy sorts and reductions, which run on one thread.
    """
    if n < MIN_N:
        raise ValueError(f"n must be >= {MIN_N}, got {n}")
    if runs < MIN_RUNS:
        raise ValueError(f"runs must be >= {MIN_RUNS}, got {runs}")
    table = kernels(bins)
    unknown = [m for m in methods if m not in table]
    if unknown:
        raise ValueError(f"unknown bench method(s): {', '.join(unknown)}")
    x, y = bench_inputs(n, seed, dtype)
    return [BenchReport(m, n, time_call(table[m], x, y, runs), runs) for m in methods]
