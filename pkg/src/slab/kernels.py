"""Backend selection for the hot graph kernels.

The compiled extension ``slab._ckernels`` is used when importable; the
pure-Python module ``slab._pykernels`` is the fallback.  ``SLAB_PURE=1``
forces the fallback.  ``SLAB_THREADS`` caps the worker threads used by
:func:`distance_histogram` (the compiled kernel releases the GIL).
"""
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _pykernels

if os.environ.get("SLAB_PURE", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
        BACKEND = "python"


def thread_count():
    try:
        return max(1, int(os.environ.get("SLAB_THREADS", "1")))
    except ValueError:
        return 1


def _csr(indptr, indices):
    return (np.ascontiguousarray(indptr, dtype=np.int64),
            np.ascontiguousarray(indices, dtype=np.int32))


def bfs(indptr, indices, source, cutoff=-1, impl=None):
    ip, ix = _csr(indptr, indices)
    return (impl or _impl).bfs(ip, ix, int(source), int(cutoff))


def distance_histogram(indptr, indices, sources, impl=None):
    impl = impl or _impl
    ip, ix = _csr(indptr, indices)
    sources = np.ascontiguousarray(sources, dtype=np.int64)
    workers = thread_count() if impl is not _pykernels else 1
    if workers == 1 or len(sources) < 2 * workers:
        return impl.distance_histogram(ip, ix, sources)
    chunks = np.array_split(sources, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda c: impl.distance_histogram(ip, ix, c), chunks))
    return np.sum(parts, axis=0)


def reachable_pairs(indptr, indices, sources, cutoff=-1, max_pairs=2**62, impl=None):
    ip, ix = _csr(indptr, indices)
    sources = np.ascontiguousarray(sources, dtype=np.int64)
    return (impl or _impl).reachable_pairs(ip, ix, sources, int(cutoff), int(max_pairs))


def topological_order(indptr, indices, impl=None):
    ip, ix = _csr(indptr, indices)
    return (impl or _impl).topological_order(ip, ix)


def longest_weighted_path(indptr, indices, order, weights, impl=None):
    ip, ix = _csr(indptr, indices)
    return (impl or _impl).longest_weighted_path(
        ip, ix, np.ascontiguousarray(order, dtype=np.int64),
        np.ascontiguousarray(weights, dtype=np.int32))
