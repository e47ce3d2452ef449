"""Deterministic sharded Monte Carlo execution.

The shard plan depends only on (replicates, shard_size) and shard k always
draws from ``rng.child(k)``, so concatenating shard results in shard order gives
the same output for any worker count.
"""

import os
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

from covrisk.errors import DomainError
from covrisk.logger import get_logger

from .rng import RngStream

logger = get_logger(__name__)

T = TypeVar("T")

ShardFn = Callable[[RngStream, int], T]


def default_workers() -> int:
    """Available parallelism of this process."""
    if hasattr(os, "sched_getaffinity"):
        return max(1, len(os.sched_getaffinity(0)))
    return os.cpu_count() or 1


# Upper bound on the floats held by one shard's (size, p, p) stack
MAX_STACK_ENTRIES = 2_000_000


def stack_shard_size(p: int, shard_size: int | None = None) -> int:
    """Shard size capped so a (size, p, p) stack stays below MAX_STACK_ENTRIES."""
    if shard_size is None:
        from covrisk.services.config import get_config

        shard_size = get_config().monte_carlo.shard_size
    return max(1, min(shard_size, MAX_STACK_ENTRIES // (p * p)))


def plan_shards(replicates: int, shard_size: int) -> list[int]:
    """Split ``replicates`` into full shards of ``shard_size`` plus one remainder shard."""
    if replicates < 1:
        raise DomainError(f"replicates must be positive, got {replicates}")
    if shard_size < 1:
        raise DomainError(f"shard_size must be positive, got {shard_size}")
    full, rest = divmod(replicates, shard_size)
    return [shard_size] * full + ([rest] if rest else [])


def run_sharded(
    rng: RngStream,
    replicates: int,
    worker_fn: "ShardFn[T]",
    workers: int | None = None,
    shard_size: int | None = None,
) -> list[T]:
    """Run ``worker_fn(rng.child(k), size_k)`` for every shard k and return results in shard order.

    Args:
        rng: Parent stream; it is not consumed
        replicates: Total number of replicates
        worker_fn: Callable receiving a shard stream and the shard size
        workers: Thread count, default from config or available parallelism
        shard_size: Replicates per shard, default from config

    Returns:
        One result per shard
    """
    from covrisk.services.config import get_config

    mc = get_config().monte_carlo
    shard_size = shard_size or mc.shard_size
    workers = workers or mc.workers or default_workers()
    plan = plan_shards(replicates, shard_size)
    workers = min(workers, len(plan))

    logger.debug("Running sharded simulation", replicates=replicates, shards=len(plan), workers=workers)

    if workers == 1:
        return [worker_fn(rng.child(k), size) for k, size in enumerate(plan)]

    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="covrisk-shard") as executor:
        futures = [executor.submit(worker_fn, rng.child(k), size) for k, size in enumerate(plan)]
        return [future.result() for future in futures]
