import contextvars
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar

import structlog

from ..config.settings import config

logger = structlog.get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def resolve_workers(workers: int = None) -> int:
    if workers is None:
        return config.WORKERS
    return max(1, int(workers))


def map_ordered(func: Callable[[T], R], items: Iterable[T], workers: int = 1) -> List[R]:
    """Apply func to every item; results come back in input order.

    Each call runs inside a copy of the caller's context, so context-local
    settings (such as an injected estimator fault) reach the workers. The first
    failure is re-raised after the pool drains.
    """
    items = list(items)
    workers = min(resolve_workers(workers), max(1, len(items)))
    if workers == 1:
        return [func(item) for item in items]

    logger.debug("Dispatching to worker pool", workers=workers, items=len(items))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(contextvars.copy_context().run, func, item)
            for item in items
        ]
        return [future.result() for future in futures]
