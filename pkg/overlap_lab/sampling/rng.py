"""
Random Number Streams

This module provides reproducible, independent random streams:
- RngStream keyed by (seed, stream_id)
- Counter-based Philox bit generator seeded through SeedSequence spawn keys
"""

from typing import Optional, Tuple, Union

import numpy as np

from ..errors import ParameterError

_UINT64_MASK = (1 << 64) - 1


class RngStream:
    """
    Reproducible random stream identified by (seed, stream_id).

    Identical keys give bit-identical draw sequences; distinct stream ids
    give independent streams (distinct SeedSequence spawn keys feeding a
    counter-based Philox generator). A stream has a single owner: it may be
    handed to another thread but never shared by two threads at once.
    """

    def __init__(self, seed: int, stream_id: int = 0, path: Tuple[int, ...] = ()):
        """
        Initialize random stream.

        Args:
            seed: Master seed (reduced modulo 2^64)
            stream_id: Stream index (reduced modulo 2^64)
            path: Child indices from spawn(); empty for a root stream
        """
        try:
            seed = int(seed)
            stream_id = int(stream_id)
        except (TypeError, ValueError) as e:
            raise ParameterError(f"Seed and stream id must be integers: {e}")

        self._seed = seed & _UINT64_MASK
        self._stream_id = stream_id & _UINT64_MASK
        self._path = tuple(int(p) & _UINT64_MASK for p in path)
        seed_seq = np.random.SeedSequence(entropy=self._seed,
                                          spawn_key=(self._stream_id,) + self._path)
        self._generator = np.random.Generator(np.random.Philox(seed_seq))

    @property
    def seed(self) -> int:
        """Get master seed."""
        return self._seed

    @property
    def stream_id(self) -> int:
        """Get stream index."""
        return self._stream_id

    @property
    def generator(self) -> np.random.Generator:
        """Underlying numpy Generator (owned by this stream)."""
        return self._generator

    def spawn(self, child_id: int) -> 'RngStream':
        """Independent child stream; deterministic in (seed, stream_id, path, child_id)."""
        return RngStream(self._seed, self._stream_id, self._path + (child_id,))

    def uniform_open_closed(self, size: Optional[Union[int, Tuple[int, ...]]] = None):
        """Uniform draws on (0, 1]."""
        return 1.0 - self._generator.random(size)

    def standard_gamma(self, shape: float, size: Optional[Union[int, Tuple[int, ...]]] = None):
        """Gamma(shape, 1) draws (Marsaglia-Tsang in numpy)."""
        return self._generator.standard_gamma(shape, size)

    def standard_normal(self, size: Optional[Union[int, Tuple[int, ...]]] = None):
        return self._generator.standard_normal(size)

    def __repr__(self) -> str:
        return f"RngStream(seed={self._seed}, stream_id={self._stream_id}, path={self._path})"


def as_stream(rng: Union['RngStream', int, None], stream_id: int = 0) -> RngStream:
    """
    Coerce a seed or stream into an RngStream.

    Args:
        rng: Existing stream, integer seed, or None (fresh entropy)
        stream_id: Stream index used when building from a seed

    Returns:
        RngStream
    """
    if isinstance(rng, RngStream):
        return rng
    if rng is None:
        # Fresh OS entropy, like np.random.default_rng()
        return RngStream(np.random.SeedSequence().entropy, stream_id)
    return RngStream(int(rng), stream_id)
