"""Seedable, platform-independent random streams."""

from __future__ import annotations

import numpy as np


class Rng:
    """Counter-based generator (Philox 4x64) keyed by a 64-bit seed.

    The value stream depends only on the seed, never on the platform or the
    numpy build, so parameter initialisation is reproducible everywhere.
    """

    def __init__(self, seed: int = 0):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self._gen = np.random.Generator(np.random.Philox(key=self.seed))

    def normal(self, shape, std: float = 1.0, dtype=np.float64) -> np.ndarray:
        return (self._gen.standard_normal(size=shape) * std).astype(dtype)

    def uniform(self, shape, low: float = 0.0, high: float = 1.0, dtype=np.float64) -> np.ndarray:
        return self._gen.uniform(low, high, size=shape).astype(dtype)

    def integers(self, low: int, high: int, size=None) -> np.ndarray:
        return self._gen.integers(low, high, size=size)

    def permutation(self, n: int) -> np.ndarray:
        return self._gen.permutation(n)

    def trunc_normal(self, shape, std: float = 0.02, bound: float = 2.0, dtype=np.float32) -> np.ndarray:
        """Normal(0, std) redrawn until every value lies within +-bound*std."""
        out = self._gen.standard_normal(size=shape)
        bad = np.abs(out) > bound
        while bad.any():
            out[bad] = self._gen.standard_normal(size=int(bad.sum()))
            bad = np.abs(out) > bound
        return (out * std).astype(dtype)
