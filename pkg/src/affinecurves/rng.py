"""Deterministic random-number streams.

All randomness in the package flows through numpy's PCG64 bit generator
keyed by a SeedSequence. Independent streams are derived from a root seed
and a draw index via the spawn-key mechanism, so the same (seed, index)
pair reproduces the same stream on every platform.
"""

from __future__ import annotations

import numpy as np

__all__ = ["make_rng", "derive_seed"]


def make_rng(seed: int) -> np.random.Generator:
    """Generator for a root seed."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def derive_seed(seed: int, index: int) -> int:
    """64-bit child seed for draw `index` of the stream rooted at `seed`."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(index,))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
