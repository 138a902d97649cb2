import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar

from core.config import settings


logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def map_ordered(fn: Callable[[T], R], items: Iterable[T], threads: int | None = None) -> List[R]:
    """Apply ``fn`` to every item, possibly in parallel, returning results in input order.

    Callers reduce the returned list themselves, so the reduction order never depends on
    scheduling.
    """
    jobs = list(items)
    workers = threads or settings.threads
    if workers <= 1 or len(jobs) <= 1:
        return [fn(job) for job in jobs]

    logger.debug(f"Dispatching {len(jobs)} jobs to {workers} threads")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))
