"""Counter-based random streams.

A stream is identified by (seed, stream_id, path). The underlying bit generator
is Philox keyed through a SeedSequence, so child streams are independent and a
given identity replays the same draws on every platform.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from covrisk.errors import DomainError

_UINT64_LIMIT = 2**64


@dataclass(frozen=True)
class RngStream:
    """Seeded, single-owner random stream.

    ``generator`` is created lazily and then advances as draws are taken, so
    two streams with equal identity produce equal sequences only if they are
    consumed in the same way. Use ``fresh()`` to replay a stream from its start.
    """

    seed: int
    stream_id: int = 0
    path: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        for value in (self.seed, self.stream_id, *self.path):
            if not 0 <= value < _UINT64_LIMIT:
                raise DomainError(f"Stream identifiers must be unsigned 64-bit integers, got {value}")

    @cached_property
    def generator(self) -> np.random.Generator:
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id, *self.path))
        return np.random.Generator(np.random.Philox(sequence))

    def child(self, index: int) -> "RngStream":
        """Independent sub-stream, e.g. one per Monte Carlo shard."""
        return RngStream(self.seed, self.stream_id, (*self.path, index))

    def fresh(self) -> "RngStream":
        """Same identity, generator rewound to the start."""
        return RngStream(self.seed, self.stream_id, self.path)
