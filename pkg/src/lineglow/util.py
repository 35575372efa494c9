"""Small shared helpers."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")

ENV_THREADS = "LINEGLOW_THREADS"


def worker_count() -> int:
    """Worker cap from LINEGLOW_THREADS; defaults to single-threaded."""
    raw = os.environ.get(ENV_THREADS, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def parallel_map(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Order-preserving map, threaded when LINEGLOW_THREADS > 1.

    Results are identical to the sequential path; threading only changes
    wall time (items are independent).
    """
    items = list(items)
    n = worker_count()
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
