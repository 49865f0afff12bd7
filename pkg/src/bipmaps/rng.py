"""Counter-based, splittable random streams.

Every Monte Carlo task draws from its own :class:`RngStream`, identified by a
``(seed, stream_id)`` pair.  The bit generator is numpy's Philox, a
counter-based generator whose output depends only on the key and the counter,
so identical pairs give identical sequences on every platform.
"""
from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class RngStream:
    """A reproducible random stream keyed by ``(seed, stream_id)``."""

    def __init__(self, seed: int = 0, stream_id: int = 0):
        self.seed = int(seed) & _MASK
        self.stream_id = int(stream_id) & _MASK
        self._bitgen = np.random.Philox(key=[self.seed, self.stream_id])
        self.gen = np.random.Generator(self._bitgen)

    def derive(self, index: int) -> "RngStream":
        """Child stream number ``index``; children of distinct indices are independent."""
        child = splitmix64(self.stream_id ^ splitmix64(int(index) + 1))
        return RngStream(self.seed, child)

    def spawn(self, count: int) -> list["RngStream"]:
        return [self.derive(i) for i in range(count)]

    @property
    def counter(self) -> int:
        state = self._bitgen.state["state"]["counter"]
        return int(sum(int(c) << (64 * k) for k, c in enumerate(state)))

    # thin conveniences over the numpy Generator
    def random(self, size=None):
        return self.gen.random(size)

    def integers(self, low, high=None, size=None):
        return self.gen.integers(low, high, size=size)

    def geometric(self, p, size=None):
        return self.gen.geometric(p, size=size)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id}, counter={self.counter})"


def as_stream(rng) -> RngStream:
    """Accept an RngStream, an int seed or None."""
    if isinstance(rng, RngStream):
        return rng
    if rng is None:
        return RngStream(0, 0)
    return RngStream(int(rng), 0)
