"""Compiled vs pure-Python graph kernels on generated instances.

    python benchmarks/bench_kernels.py [--r 8] [--sources 256] [--repeat 3]

Each kernel runs on both backends with identical inputs; outputs are
compared before timings are reported.
"""
import argparse
import time

import numpy as np

from slab import _pykernels, kernels
from slab.construct import build_base

try:
    from slab import _ckernels
except ImportError:
    _ckernels = None


def _best(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--r", type=int, default=8)
    p.add_argument("--sources", type=int, default=256)
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)
    if _ckernels is None:
        raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation`")

    graph, _ = build_base(args.r)
    ip, ix = graph.indptr, graph.indices
    sources = np.arange(min(args.sources, graph.n), dtype=np.int64)
    order = graph.topological_order
    weights = np.ones(graph.n, dtype=np.int32)
    cases = {
        "bfs (one source)": lambda impl: kernels.bfs(ip, ix, 0, impl=impl),
        f"distance_histogram ({len(sources)} sources)":
            lambda impl: kernels.distance_histogram(ip, ix, sources, impl=impl),
        f"reachable_pairs ({len(sources)} sources)":
            lambda impl: kernels.reachable_pairs(ip, ix, sources, impl=impl),
        "topological_order": lambda impl: kernels.topological_order(ip, ix, impl=impl),
        "longest_weighted_path":
            lambda impl: kernels.longest_weighted_path(ip, ix, order, weights, impl=impl),
    }
    print(f"base instance r={args.r}: n={graph.n} m={graph.m}")
    print(f"{'kernel':42s} {'python':>10s} {'cython':>10s} {'speedup':>9s}")
    for name, run in cases.items():
        tp, outp = _best(lambda: run(_pykernels), args.repeat)
        tc, outc = _best(lambda: run(_ckernels), args.repeat)
        if not _same(outp, outc):
            raise SystemExit(f"{name}: backends disagree")
        print(f"{name:42s} {tp:9.4f}s {tc:9.4f}s {tp / max(tc, 1e-9):8.1f}x")


if __name__ == "__main__":
    main()
