"""Small shared helpers."""

from __future__ import annotations

import os
from typing import Callable, Sequence


def thread_count() -> int:
    """Worker count from the CF_THREADS knob (default 1, never below 1)."""
    try:
        return max(1, int(os.environ.get("CF_THREADS", "1")))
    except ValueError:
        return 1


def parallel_map(fn: Callable, items: Sequence) -> list:
    """Order-preserving map, threaded when CF_THREADS > 1.

    Results are aggregated in input order, so output never depends on the
    thread count.
    """
    workers = thread_count()
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
