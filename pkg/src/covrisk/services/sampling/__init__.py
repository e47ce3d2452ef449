"""Seeded random generation: normal, chi-square and Wishart draws."""

from .rng import RngStream
from .shards import default_workers, plan_shards, run_sharded, stack_shard_size
from .wishart import (
    WishartBatch,
    WishartSample,
    sample_bartlett_factors,
    sample_chisq,
    sample_normal_data,
    sample_std_normal,
    sample_wishart,
    sample_wishart_batch,
    sample_wishart_identity,
    scatter_from_data,
)

__all__ = [
    "RngStream",
    "WishartBatch",
    "WishartSample",
    "default_workers",
    "plan_shards",
    "run_sharded",
    "sample_bartlett_factors",
    "sample_chisq",
    "sample_normal_data",
    "sample_std_normal",
    "sample_wishart",
    "sample_wishart_batch",
    "sample_wishart_identity",
    "scatter_from_data",
    "stack_shard_size",
]
