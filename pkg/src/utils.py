import asyncio
import logging
from typing import Callable, List, Sequence, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


async def run_limited(func: Callable[[T], R], items: Sequence[T], jobs: int) -> List[R]:
    """Runs func over items in worker threads, at most `jobs` at a time; results keep item order."""
    if jobs < 1:
        raise ValueError(f"jobs must be at least 1, got {jobs}")
    semaphore = asyncio.Semaphore(jobs)

    async def run_one(index: int, item: T) -> R:
        async with semaphore:
            logger.debug(f"Step {index + 1}/{len(items)} started")
            result = await asyncio.to_thread(func, item)
            logger.debug(f"Step {index + 1}/{len(items)} done")
            return result

    return await asyncio.gather(*(run_one(i, item) for i, item in enumerate(items)))
