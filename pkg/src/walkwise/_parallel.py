"""Deterministic chunked thread map."""

from __future__ import annotations

import os
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "WALKWISE_THREADS"


def resolve_threads(threads: int | None) -> int:
    """Explicit value, else ``$WALKWISE_THREADS``, else 1."""
    if threads is None:
        env = os.environ.get(THREADS_ENV, "").strip()
        threads = int(env) if env else 1
    if threads < 1:
        raise ValueError("threads must be at least 1")
    return threads


def chunked_map(
    fn: Callable[[Sequence[T]], list[R]],
    items: Sequence[T],
    threads: int | None = None,
) -> list[R]:
    """Apply ``fn`` to contiguous chunks of ``items`` and concatenate in input order.

    ``fn`` receives a chunk and returns one result per element. Results are
    placed by chunk position, so the output never depends on scheduling.
    """
    workers = min(resolve_threads(threads), max(len(items), 1))
    if workers == 1:
        return list(fn(items))
    step = -(-len(items) // workers)
    chunks = [items[i : i + step] for i in range(0, len(items), step)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(fn, chunks))
    return [r for part in parts for r in part]
