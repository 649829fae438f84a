"""Row-chunked data parallelism for assignment and energy passes."""

from __future__ import annotations

import os
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

_T = TypeVar("_T")

# Below this many rows per worker the thread hand-off costs more than it saves.
MIN_ROWS_PER_WORKER = 2_048


def resolve_workers(workers: int) -> int:
    if workers > 0:
        return workers
    return max(1, os.cpu_count() or 1)


def chunk_bounds(n_rows: int, workers: int) -> list[tuple[int, int]]:
    """Contiguous [start, stop) row ranges, at most `workers` of them."""
    if n_rows <= 0:
        return []
    count = max(1, min(workers, n_rows // MIN_ROWS_PER_WORKER))
    edges = [round(i * n_rows / count) for i in range(count + 1)]
    return [(edges[i], edges[i + 1]) for i in range(count) if edges[i] < edges[i + 1]]


def map_row_chunks(fn: Callable[[int, int], _T], n_rows: int, workers: int) -> list[_T]:
    """Apply fn(start, stop) over row chunks; results come back in row order."""
    bounds = chunk_bounds(n_rows, resolve_workers(workers))
    if len(bounds) <= 1:
        return [fn(start, stop) for start, stop in bounds]
    with ThreadPoolExecutor(max_workers=len(bounds)) as pool:
        futures = [pool.submit(fn, start, stop) for start, stop in bounds]
        return [future.result() for future in futures]
