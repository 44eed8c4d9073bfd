#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallback.

Per-call timings for the three hot kernels, plus one full 60-second corpus
replay through the whole pipeline per backend.

    python benchmarks/bench_kernels.py [--replays N]
"""

import argparse
import time

import numpy as np

from telefilter import corpus, kernels
from telefilter.config import GatewayConfig
from telefilter.kinematics import DHParams
from telefilter.session import run_replay


def time_call(fn, args_stream, repeats):
    best = float("inf")
    for _ in range(3):
        start = time.perf_counter()
        for args in args_stream[:repeats]:
            fn(*args)
        best = min(best, (time.perf_counter() - start) / repeats)
    return best


def bench_kernels(repeats=2000):
    dh = DHParams.default()
    rng = np.random.default_rng(0)
    qs = [rng.uniform(-2.0, 2.0, 6) for _ in range(repeats)]
    dxs = [rng.normal(0, 1e-3, 6) for _ in range(repeats)]
    rows = []
    for backend in kernels.available_backends():
        name = backend.BACKEND_NAME
        fk_t = time_call(backend.fk, [(dh.table, q) for q in qs], repeats)
        jac_t = time_call(backend.jacobian, [(dh.table, q) for q in qs], repeats)
        rr_t = time_call(
            backend.resolved_rate,
            [(dh.table, q, dx, 1e-3) for q, dx in zip(qs, dxs)],
            repeats,
        )
        rows.append((name, fk_t, jac_t, rr_t))
    return rows


def bench_replay(backend_module, n_traces):
    # rebind the kernel entry points; kinematics resolves them per call
    saved = (kernels.fk, kernels.jacobian, kernels.resolved_rate)
    kernels.fk = backend_module.fk
    kernels.jacobian = backend_module.jacobian
    kernels.resolved_rate = backend_module.resolved_rate
    try:
        config = GatewayConfig()
        start = time.perf_counter()
        ticks = 0
        for i in range(1, n_traces + 1):
            log, _ = run_replay(config, corpus.load_trace(i), apply_filter=True)
            ticks += len(log)
        elapsed = time.perf_counter() - start
        return elapsed, ticks
    finally:
        kernels.fk, kernels.jacobian, kernels.resolved_rate = saved


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--replays", type=int, default=2,
                        help="corpus traces per backend for the pipeline benchmark")
    args = parser.parse_args()

    print(f"active backend at import: {kernels.BACKEND}\n")
    rows = bench_kernels()
    print(f"{'backend':<8} {'fk':>12} {'jacobian':>12} {'resolved_rate':>14}")
    for name, fk_t, jac_t, rr_t in rows:
        print(f"{name:<8} {fk_t * 1e6:>10.2f}us {jac_t * 1e6:>10.2f}us {rr_t * 1e6:>12.2f}us")
    if len(rows) == 2:
        speedups = [rows[1][i] / rows[0][i] for i in range(1, 4)]
        print(f"{'speedup':<8} {speedups[0]:>11.1f}x {speedups[1]:>11.1f}x {speedups[2]:>13.1f}x")

    print(f"\nfull-pipeline replay ({args.replays} x 60 s corpus trace, filtered):")
    for backend in kernels.available_backends():
        elapsed, ticks = bench_replay(backend, args.replays)
        rate = ticks / elapsed
        print(f"{backend.BACKEND_NAME:<8} {elapsed:>8.2f}s ({rate:,.0f} ticks/s)")


if __name__ == "__main__":
    main()
