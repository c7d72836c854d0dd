#!/usr/bin/env python3
"""Compare the numba and numpy enumeration backends.

Times the two hot kernels — the closure BFS over twisted products and the
exhaustive predicate scan — on a ladder of group instances, running each
through ``_kernels.numba_backend`` and ``_kernels.numpy_backend`` on
identical inputs.  Counts are asserted equal, so the benchmark doubles as
an agreement check.  The numba backend is warmed up before timing so JIT
compilation is not billed to the first row.

Usage:
    python3 benchmarks/bench_backends.py [--repeats N] [--depth-max D]
"""

import argparse
import time

import numpy as np

from arborgroups._kernels import numba_backend, numpy_backend
from arborgroups.automorphisms import node_count
from arborgroups.counting import _MODE_CODE, _mask_arrays
from arborgroups.functionals import Portrait, predicate_spec
from arborgroups.generators import pink_generators

BACKENDS = (("numba", numba_backend), ("numpy", numpy_backend))


def time_call(fn, repeats):
    best, value = float("inf"), None
    for _ in range(repeats):
        t0 = time.perf_counter()
        value = fn()
        best = min(best, time.perf_counter() - t0)
    return best, value


def bench_closure(portrait, depth, budget, repeats):
    packed = np.array(
        [g.bits for g in pink_generators(portrait, depth).generators],
        dtype=np.uint64,
    )
    nbits = node_count(depth)
    results = {}
    for name, mod in BACKENDS:
        secs, out = time_call(lambda m=mod: m.closure_count(packed, nbits, budget),
                              repeats)
        results[name] = (secs, int(out[0]))
    return results


def bench_count(portrait, depth, variant, repeats):
    spec = predicate_spec(portrait, depth, variant)
    p, rl, rqa, rqb = _mask_arrays(spec)
    pm, rm = _MODE_CODE[spec.p_mode], _MODE_CODE[spec.r_mode]
    nbits = node_count(depth)
    results = {}
    for name, mod in BACKENDS:
        secs, out = time_call(
            lambda m=mod: m.count_matching(nbits, p, pm, rl, rqa, rqb, rm,
                                           0, 1 << nbits),
            repeats,
        )
        results[name] = (secs, int(out))
    return results


def emit(kernel, label, results):
    (ta, ca), (tb, cb) = results["numba"], results["numpy"]
    assert ca == cb, f"{kernel} {label}: numba {ca} != numpy {cb}"
    speedup = tb / ta if ta > 0 else float("inf")
    print(f"{kernel:14s} {label:22s} count={ca:<12d} "
          f"numba={ta * 1e3:9.2f}ms numpy={tb * 1e3:9.2f}ms x{speedup:,.1f}")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=3,
                        help="timing repeats, best-of (default 3)")
    parser.add_argument("--depth-max", type=int, default=4,
                        help="largest depth benchmarked (default 4; "
                             "5 is minutes on the numpy backend)")
    args = parser.parse_args()

    # warm up the JIT outside the timers
    warm = np.array([1, 2], dtype=np.uint64)
    numba_backend.closure_count(warm, 3, 1 << 6)
    e = np.empty(0, np.uint64)
    numba_backend.count_matching(3, e, 0, e, e, e, 0, 0, 8)

    print(f"{'kernel':14s} {'instance':22s} {'':13s}{'timings, best of'} "
          f"{args.repeats}")
    for r, s in ((3, 1), (3, 2), (4, 2)):
        portrait = Portrait(r, s)
        for depth in range(3, args.depth_max + 1):
            label = f"({r},{s}) depth {depth}"
            emit("closure-bfs", label,
                 bench_closure(portrait, depth, 1 << 24, args.repeats))
            emit("predicate-scan", label,
                 bench_count(portrait, depth, "tBp", args.repeats))


if __name__ == "__main__":
    main()
