import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "ERDLAB_THREADS"
DEFAULT_SHARDS = 8


def thread_count() -> int:
    value = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(value))
    except ValueError:
        return 1


def spawn_generators(rng: np.random.Generator, count: int) -> list[np.random.Generator]:
    """Derive `count` independent generators; consumes a fixed amount of `rng`."""
    seeds = rng.integers(0, np.iinfo(np.int64).max, size=count, dtype=np.int64)
    return [np.random.default_rng(int(seed)) for seed in seeds]


def shard_sizes(total: int, shards: int) -> list[int]:
    shards = max(1, min(shards, total))
    base, extra = divmod(total, shards)
    return [base + (1 if index < extra else 0) for index in range(shards)]


def map_ordered(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Map in input order on up to ERDLAB_THREADS threads."""
    items = list(items)
    threads = min(thread_count(), len(items))
    if threads <= 1:
        return [fn(item) for item in items]

    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def run_sharded(
    fn: Callable[[int, np.random.Generator], R],
    total: int,
    rng: np.random.Generator,
    shards: int = DEFAULT_SHARDS,
) -> list[R]:
    """Split `total` draws into a fixed number of seeded shards and run `fn(size, rng)` on each."""
    sizes = shard_sizes(total, shards)
    generators = spawn_generators(rng, len(sizes))
    return map_ordered(lambda job: fn(*job), zip(sizes, generators))
