"""Thread-count handling for embarrassingly parallel evaluations."""

import os
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

from spps.utils.logging_utils import get_logger

logger = get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "SPPS_THREADS"


def max_workers(default: int = 1) -> int:
    """Return the worker cap from SPPS_THREADS (falls back to ``default``)."""
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning(f"Ignoring non-integer {THREADS_ENV}={raw!r}; using {default}")
        return default
    if value < 1:
        logger.warning(f"Ignoring {THREADS_ENV}={value} (< 1); using {default}")
        return default
    return value


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: int | None = None) -> list[R]:
    """Map ``fn`` over ``items`` preserving input order.

    Runs inline when a single worker is requested.
    """
    items = list(items)
    if workers is None:
        workers = max_workers()
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, items))
