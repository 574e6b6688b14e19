"""Latency benchmarks: per-op percentiles and amortized rebuild work."""

from __future__ import annotations

import random
import time
from fractions import Fraction

from .backend import BACKEND
from .tree import MajorityIndex

COLOURS = ["c%02d" % i for i in range(64)]


def _pctl(samples: list, frac: float) -> float:
    ordered = sorted(samples)
    idx = min(len(ordered) - 1, int(frac * len(ordered)))
    return ordered[idx]


def _fill(rng: random.Random, n: int, span: int):
    coords = rng.sample(range(span), n)
    return [(x, COLOURS[min(rng.getrandbits(6), rng.getrandbits(6))]) for x in coords]


def median_query_ns(index: MajorityIndex, rng: random.Random, span: int, reps: int) -> float:
    """Median wall time of query_counts over random windows, in ns."""
    samples = []
    for _ in range(reps):
        a = rng.randrange(span)
        b = rng.randrange(span)
        lo, hi = (a, b) if a <= b else (b, a)
        t0 = time.perf_counter_ns()
        index.query_counts(lo, hi)
        samples.append(time.perf_counter_ns() - t0)
    return _pctl(samples, 0.5)


def bench_cell(n: int, alpha: Fraction, seed: int, reps: int = 400) -> list[dict]:
    """Three rows (insert, delete, query) for one (n, alpha) cell."""
    span = max(4 * n, 1 << 20)
    rng = random.Random(seed)
    index = MajorityIndex.build(_fill(rng, n, span), alpha, key_kind="int")

    q_ns = []
    for _ in range(reps):
        a, b = rng.randrange(span), rng.randrange(span)
        lo, hi = (a, b) if a <= b else (b, a)
        t0 = time.perf_counter_ns()
        index.query_counts(lo, hi)
        q_ns.append(time.perf_counter_ns() - t0)

    work0 = index.stats["rebuild_leaf_work"]
    fresh = []
    ins_ns = []
    while len(fresh) < reps:
        x = rng.randrange(span)
        if index.F.count_range(x, x):
            continue
        c = COLOURS[rng.getrandbits(6) % 64]
        t0 = time.perf_counter_ns()
        index.insert(x, c)
        ins_ns.append(time.perf_counter_ns() - t0)
        fresh.append(x)

    del_ns = []
    for x in fresh:
        t0 = time.perf_counter_ns()
        index.delete(x)
        del_ns.append(time.perf_counter_ns() - t0)
    work_per_op = (index.stats["rebuild_leaf_work"] - work0) / (2 * reps)

    rows = []
    for op, samples in (("insert", ins_ns), ("delete", del_ns), ("query", q_ns)):
        rows.append(
            {
                "backend": BACKEND,
                "n": n,
                "alpha": f"{alpha.numerator}/{alpha.denominator}",
                "op": op,
                "p50_us": round(_pctl(samples, 0.5) / 1000.0, 3),
                "p99_us": round(_pctl(samples, 0.99) / 1000.0, 3),
                "rebuild_work_per_op": round(work_per_op, 3),
            }
        )
    return rows


def run(sizes, alphas, seed: int, reps: int = 400) -> list[dict]:
    rows = []
    for n in sizes:
        for alpha in alphas:
            rows.extend(bench_cell(n, alpha, seed, reps))
    return rows
