"""Seeded random streams for reproducible simulation."""

from __future__ import annotations

from typing import Optional, Tuple

import numpy as np

from .errors import ConfigError

MAX_SEED = 2**64 - 1

CHOICE_STREAM = 0


def check_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed <= MAX_SEED:
        raise ConfigError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    return seed


class SeededStream:
    """Wrapper around a numpy Generator addressed by (seed, spawn key).

    The draws depend only on the root seed and the spawn key, never on what
    other streams have drawn, so packets can be processed in any order and
    still see the same numbers. The generator is built on the first draw.
    """

    def __init__(self, seed: int, spawn_key: Tuple[int, ...] = ()):
        self._seed = check_seed(seed)
        self._spawn_key = tuple(spawn_key)
        self._generator: Optional[np.random.Generator] = None

    def random(self) -> float:
        """Next uniform draw in [0, 1)."""
        if self._generator is None:
            sequence = np.random.SeedSequence(self._seed, spawn_key=self._spawn_key)
            self._generator = np.random.Generator(np.random.PCG64(sequence))
        return float(self._generator.random())


def packet_stream(seed: int, packet_id: int) -> SeededStream:
    """The packet's pre-trip choice stream: the same draws in every iteration."""
    return SeededStream(seed, (CHOICE_STREAM, packet_id))


def resense_stream(seed: int, iteration: int, packet_id: int, order: int) -> SeededStream:
    """Stream for the ``order``-th event a packet senses in ``iteration``."""
    return SeededStream(seed, (iteration, packet_id, order))
