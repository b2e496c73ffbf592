# SPDX-FileCopyrightText: 2025 guided-mixup contributors
# SPDX-License-Identifier: GPL-3.0

from concurrent import futures
from typing import Callable, Iterable, TypeVar

from .config import worker_count

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(
    func: Callable[[T], R], items: Iterable[T], workers: int | None = None
) -> list[R]:
    """Apply `func` to every item, results in input order.

    With a single worker everything runs inline on the calling thread, which
    is what the timed bench sections rely on.
    """
    items = list(items)
    n_workers = min(worker_count(workers), max(1, len(items)))
    if n_workers == 1:
        return [func(item) for item in items]

    with futures.ThreadPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(func, items))
