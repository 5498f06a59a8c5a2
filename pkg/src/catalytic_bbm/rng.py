"""Reproducible random-number streams.

Replicate streams are built on the Philox counter-based generator:
distinct (seed, stream) pairs map to distinct 128-bit keys, so streams
are statistically independent by construction and a fixed pair always
yields the same draw sequence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

GENERATOR_NAME = "philox4x64"

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    """A (seed, stream) pair naming one independent draw sequence."""

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        key = ((self.seed & _MASK64) << 64) | (self.stream & _MASK64)
        return np.random.Generator(np.random.Philox(key=key))
