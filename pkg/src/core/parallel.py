import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from dotenv import load_dotenv

T = TypeVar("T")
R = TypeVar("R")

load_dotenv()


def default_threads() -> int:
    """Thread cap from FSS_THREADS, else 1."""
    value = os.getenv("FSS_THREADS")
    if value is None:
        return 1
    try:
        return max(1, int(value))
    except ValueError:
        return 1


def thread_map(fn: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> List[R]:
    """
    Maps ``fn`` over ``items`` with at most ``threads`` workers.

    Results come back in input order, so callers stay deterministic whatever
    the thread count.
    """
    items = list(items)
    threads = threads or default_threads()
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
