"""Order-preserving parallel map over independent realizations."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor


def ordered_map(func, tasks, workers: int = 1) -> list:
    """``[func(t) for t in tasks]``, optionally spread over ``workers`` processes.

    Results come back in task order regardless of scheduling.
    """
    tasks = list(tasks)
    if workers <= 1 or len(tasks) <= 1:
        return [func(t) for t in tasks]
    chunk = max(1, len(tasks) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, tasks, chunksize=chunk))
