"""Thread fan-out for the quadratic kernels.

Work is cut into blocks whose boundaries depend only on the problem size,
never on the thread count, and partial results are reduced in block
order. Results are therefore bit-identical for any number of threads.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager

import numpy as np

_override: int | None = None


def thread_count() -> int:
    if _override is not None:
        return _override
    env = os.environ.get("WPC_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


@contextmanager
def threads(n: int):
    """Temporarily cap kernel parallelism at ``n`` threads."""
    global _override
    prev = _override
    _override = max(1, int(n))
    try:
        yield
    finally:
        _override = prev


def block_map(fn, n: int, block: int) -> np.ndarray:
    """Evaluate ``fn(start, stop)`` on fixed blocks of range(n); concatenate in order."""
    bounds = [(s, min(s + block, n)) for s in range(0, n, block)]
    workers = min(thread_count(), len(bounds))
    if workers <= 1:
        parts = [fn(a, b) for a, b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(lambda ab: fn(*ab), bounds))
    return np.concatenate(parts)
