"""Seeded random streams for reproducible construction and sampling."""

from __future__ import annotations

from typing import Tuple

import numpy as np

# Stream tags keep construction, sampling and shift streams disjoint.
CONSTRUCTION = 1
DRAW = 2
EXPERIMENT = 3


class RandomStreams:
    """Root seed from which independent numpy generators are derived.

    Substreams are addressed by a key (e.g. the prime p or a repetition index),
    so the generator handed to a task does not depend on scheduling order.
    """

    def __init__(self, seed: int):
        self._seed = int(seed)

    @property
    def seed(self) -> int:
        return self._seed

    def generator(self, *key: int) -> np.random.Generator:
        """PCG64 generator for the substream identified by ``key``."""
        sequence = np.random.SeedSequence(entropy=self._seed, spawn_key=tuple(int(k) for k in key))
        return np.random.Generator(np.random.PCG64(sequence))

    def for_prime(self, p: int) -> np.random.Generator:
        return self.generator(CONSTRUCTION, p)

    def for_repetition(self, index: int) -> Tuple[np.random.Generator, np.random.Generator]:
        """Independent (prime, shift) generators for one repetition."""
        return self.generator(DRAW, index, 0), self.generator(DRAW, index, 1)

    def fork(self, index: int) -> RandomStreams:
        """Child streams with a derived seed, e.g. one per experiment row."""
        child = self.generator(EXPERIMENT, index).integers(0, 2**63 - 1)
        return RandomStreams(int(child))
