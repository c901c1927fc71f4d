#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python twin.

Runs the workloads that dominate the verification sweeps (mechanism runs,
blocking detection, exhaustive deviation scans) over a seeded instance
sample and prints per-call timings plus speedups.

Usage: python benchmarks/bench_kernels.py [--samples N]
"""

import argparse
import time

import numpy as np

from schoolmatch._kernels import pykernels
from schoolmatch.families import FamilyConfig, random_instance
from schoolmatch.strategy import _report_arrays

try:
    from schoolmatch._kernels import _ckernels
except ImportError:
    _ckernels = None


def make_workload(samples):
    cfg = FamilyConfig(
        n_students=(4, 6), n_schools=(3, 4), capacity=(1, 2), samples=0, seed=0
    )
    packed = []
    for j in range(samples):
        inst = random_instance(cfg, 10_000 + j)
        p = inst.packed()
        limit = np.full(inst.n_students, 3, dtype=np.int32)
        packed.append((p, limit))
    return packed


def bench(label, backend, workload, fn):
    start = time.perf_counter()
    calls = 0
    for p, limit in workload:
        fn(backend, p, limit)
        calls += 1
    elapsed = time.perf_counter() - start
    return elapsed / calls


def run_da(backend, p, limit):
    backend.da(p.prefs, p.plen, limit, p.prank, p.cap)


def run_boston(backend, p, limit):
    backend.boston(p.prefs, p.plen, limit, p.prank, p.cap)


def run_blocking(backend, p, limit):
    assign = backend.da(p.prefs, p.plen, limit, p.prank, p.cap)
    backend.blocking_mask(p.prefs, p.plen, p.prank, p.cap, assign)


def run_fpf(backend, p, limit):
    fpf = np.ones(p.cap.shape[0], dtype=np.uint8)
    adjusted = backend.fpf_adjust(p.prefs, p.plen, limit, p.prank, fpf)
    backend.da(p.prefs, p.plen, limit, adjusted, p.cap)


def run_deviation_scan(backend, p, limit):
    n = p.plen.shape[0]
    reports, rlen = _report_arrays(p.cap.shape[0])
    check = np.ones(n, dtype=np.uint8)
    backend.improving_mask(
        p.prefs, p.plen, p.prefs, p.plen, limit, p.prank, p.cap,
        backend.MECH_DA, reports, rlen, check,
    )


WORKLOADS = [
    ("deferred acceptance", run_da),
    ("immediate acceptance", run_boston),
    ("run + blocking mask", run_blocking),
    ("fpf adjust + run", run_fpf),
    ("exhaustive deviation scan", run_deviation_scan),
]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=3000)
    args = parser.parse_args()

    workload = make_workload(args.samples)
    heavy = workload[: max(args.samples // 10, 1)]  # deviation scans cost ~100x

    print(f"{args.samples} seeded instances (4-6 students, 3-4 schools)")
    header = f"{'workload':28s} {'python':>12s} {'compiled':>12s} {'speedup':>9s}"
    print(header)
    print("-" * len(header))
    for label, fn in WORKLOADS:
        batch = heavy if fn is run_deviation_scan else workload
        py = bench(label, pykernels, batch, fn)
        if _ckernels is None:
            print(f"{label:28s} {py * 1e6:10.1f}us {'n/a':>12s} {'n/a':>9s}")
            continue
        cc = bench(label, _ckernels, batch, fn)
        print(f"{label:28s} {py * 1e6:10.1f}us {cc * 1e6:10.1f}us {py / cc:8.1f}x")
    if _ckernels is None:
        print("\ncompiled backend unavailable; build it with: pip install -e . --no-build-isolation")


if __name__ == "__main__":
    main()
