"""Deterministic thread-pool map honouring ``--threads`` / ``FEDGAME_THREADS``."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

_threads = None


def set_threads(n) -> None:
    global _threads
    _threads = None if n is None else max(1, int(n))


def thread_count() -> int:
    if _threads is not None:
        return _threads
    env = os.environ.get("FEDGAME_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def pmap(fn, items) -> list:
    """``list(map(fn, items))``, possibly threaded; output order is input order."""
    items = list(items)
    n = min(thread_count(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
