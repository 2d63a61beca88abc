#!/usr/bin/env python3
"""Benchmark the compiled interaction-walk kernel against the pure-Python
fallback: the isolated kernel on synthetic days, then whole replicate runs.

Usage: python benchmarks/bench_backends.py [--steps 365] [--n 100]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from firmsim import kernels, scenario_config, seed_replicate
from firmsim.engine import run_scenario
from firmsim.network import candidate_matrix, similarity_matrix, symmetrize_draws


def synthetic_day(n: int, rng: np.random.Generator):
    u = np.sort(rng.random((n, 2)), axis=1)
    s, c = u[:, 0] * 8.0, (u[:, 1] - u[:, 0]) * 8.0
    p = 8.0 - s - c
    sim = np.ascontiguousarray(similarity_matrix(s, c, p, 8.0))
    draws = symmetrize_draws(rng.random((n, n)))
    edges = rng.random((n, n))
    edges[edges < 0.7] = 0.0
    np.fill_diagonal(edges, 0.0)
    cand = candidate_matrix(edges, rng.random((n, n)))
    order = rng.permutation(n).astype(np.int64)
    caps = np.rint(rng.uniform(0, 7.14, n)).astype(np.int64)
    return order, cand, sim, draws, caps


def bench_kernel(n: int, days: int) -> dict[str, float]:
    rng = np.random.default_rng(0)
    inputs = [synthetic_day(n, rng) for _ in range(days)]
    out = {}
    for backend in kernels.available_backends():
        walk = kernels.get_walk(backend)
        delta = np.zeros((n, n))
        start = time.perf_counter()
        for order, cand, sim, draws, caps in inputs:
            delta[:] = 0.0
            walk(order, cand, sim, draws, caps, delta)
        out[backend] = time.perf_counter() - start
    return out


def bench_full_run(n: int, steps: int) -> dict[str, float]:
    cfg = scenario_config("Monthly", n=n, steps=steps, replicates=1)
    out = {}
    original = kernels.ACTIVE_BACKEND
    try:
        for backend in kernels.available_backends():
            kernels.set_backend(backend)
            start = time.perf_counter()
            run_scenario(cfg, seed_replicate(0, 0))
            out[backend] = time.perf_counter() - start
    finally:
        kernels.set_backend(original)
    return out


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=100)
    parser.add_argument("--steps", type=int, default=365)
    parser.add_argument("--kernel-days", type=int, default=2000)
    args = parser.parse_args()

    print(f"available backends: {', '.join(kernels.available_backends())}")
    print(f"\nkernel only ({args.kernel_days} synthetic days, n={args.n}):")
    for backend, secs in bench_kernel(args.n, args.kernel_days).items():
        print(f"  {backend:9s} {secs:8.3f} s  ({1e6 * secs / args.kernel_days:8.1f} us/day)")

    print(f"\nfull replicate run (n={args.n}, steps={args.steps}):")
    results = bench_full_run(args.n, args.steps)
    for backend, secs in results.items():
        print(f"  {backend:9s} {secs:8.3f} s")
    if len(results) == 2:
        print(f"  speedup: {results['python'] / results['compiled']:.2f}x "
              "(whole run, walk kernel is one phase of eight)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
