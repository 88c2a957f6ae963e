"""Deterministic worker-pool helper.

Sweeps over independent (degree, k) or depth indices may run concurrently;
results are always merged in input order so reports are reproducible.  The
HODGELAB_THREADS environment variable caps the pool size; 1 disables
threading entirely.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

__all__ = ["worker_cap", "map_deterministic"]


def worker_cap() -> int:
    env = os.environ.get("HODGELAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, os.cpu_count() or 1)


def map_deterministic(fn, items):
    items = list(items)
    cap = min(worker_cap(), max(1, len(items)))
    if cap == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=cap) as pool:
        return list(pool.map(fn, items))
