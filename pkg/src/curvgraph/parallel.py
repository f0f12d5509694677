"""Order-preserving worker pool for independent subproblems.

Each subproblem is deterministic, so results are identical for any thread
count; the pool only changes wall-clock time.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def resolve_threads(threads: int | None) -> int:
    if threads is not None and threads >= 1:
        return int(threads)
    env = os.environ.get("CURVGRAPH_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def pmap(fn, items, threads: int | None = None) -> list:
    """Map preserving input order; sequential when one thread suffices."""
    items = list(items)
    nthreads = min(resolve_threads(threads), len(items)) if items else 1
    if nthreads <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=nthreads) as pool:
        return list(pool.map(fn, items))
