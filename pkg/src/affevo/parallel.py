import os
from concurrent.futures import ThreadPoolExecutor


def thread_count() -> int:
    """Worker cap from AFFEVO_THREADS (default 1: run inline)."""
    try:
        return max(1, int(os.environ.get("AFFEVO_THREADS", "1")))
    except ValueError:
        return 1


def parallel_map(fn, items) -> list:
    """Order-preserving map; results never depend on the worker count."""
    items = list(items)
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
