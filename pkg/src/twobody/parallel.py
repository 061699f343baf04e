"""Order-preserving thread map capped by the ``TWOBODY_THREADS`` variable."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def worker_count() -> int:
    """Number of worker threads allowed; 1 when the variable is unset or invalid."""
    raw = os.environ.get("TWOBODY_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def thread_map(func: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """``[func(x) for x in items]``, possibly evaluated concurrently.

    Results come back in input order whatever the completion order.
    """
    items = list(items)
    n = min(worker_count(), len(items))
    if n <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(func, items))
