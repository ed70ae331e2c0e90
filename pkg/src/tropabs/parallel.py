import asyncio
import logging
from collections.abc import Callable, Iterable, Sequence
from itertools import batched
from typing import TypeVar

T = TypeVar("T")
R = TypeVar("R")

logger = logging.getLogger(__name__)


def map_chunked(
    func: Callable[[T], R],
    items: Iterable[T],
    *,
    workers: int = 1,
    chunk_size: int = 256,
) -> list[R]:
    """Apply ``func`` to every item, preserving input order.

    With ``workers > 1`` the items are cut into chunks that run on worker
    threads, at most ``workers`` at a time. Results are reassembled in input
    order, so the output never depends on the schedule.
    """
    if workers <= 1:
        return [func(item) for item in items]

    chunks = list(batched(items, chunk_size))
    logger.debug("Dispatching %d chunks on %d workers", len(chunks), workers)
    return asyncio.run(_run_chunks(func, chunks, workers))


async def _run_chunks(
    func: Callable[[T], R], chunks: Sequence[tuple[T, ...]], workers: int
) -> list[R]:
    semaphore = asyncio.Semaphore(workers)

    def _work(chunk: tuple[T, ...]) -> list[R]:
        return [func(item) for item in chunk]

    async def _bounded(chunk: tuple[T, ...]) -> list[R]:
        async with semaphore:
            # to_thread copies the current context, so operation counters
            # opened by the caller keep receiving tallies.
            return await asyncio.to_thread(_work, chunk)

    results = await asyncio.gather(*[_bounded(c) for c in chunks])
    return [item for chunk in results for item in chunk]
