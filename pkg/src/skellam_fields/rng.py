"""Counter-based random streams.

Streams are keyed Philox generators: the pair (seed, stream_id) is the
128-bit Philox key, so distinct stream ids give statistically independent
streams and (seed, stream_id, call sequence) fully determines every draw.
This makes parallel Monte Carlo reproducible regardless of worker count, as
long as each logical shard owns its own stream.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

__all__ = ["RngStream"]

_U64 = 1 << 64
_GOLDEN = 0x9E3779B97F4A7C15  # odd, so multiplication permutes Z/2^64


@dataclass
class RngStream:
    """A splittable random stream addressed by (seed, stream_id).

    The underlying generator is created lazily and consumed statefully; a
    single stream must not be shared across concurrent callers.  Re-creating
    the stream from the same (seed, stream_id) replays the same draws.
    """

    seed: int
    stream_id: int = 0
    _gen: np.random.Generator | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if not 0 <= self.seed < _U64:
            raise ValidationError("seed: must be an unsigned 64-bit integer")
        if not 0 <= self.stream_id < _U64:
            raise ValidationError("stream_id: must be an unsigned 64-bit integer")

    @property
    def generator(self) -> np.random.Generator:
        if self._gen is None:
            self._gen = np.random.Generator(
                np.random.Philox(key=np.array([self.seed, self.stream_id], dtype=np.uint64))
            )
        return self._gen

    def substream(self, k: int) -> "RngStream":
        """Derive an independent child stream; distinct k give distinct ids."""
        child = (self.stream_id * _GOLDEN + k + 1) % _U64
        return RngStream(self.seed, child)
