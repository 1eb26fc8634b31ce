"""Seeded random streams.

Every stochastic routine in the package takes an explicit seed or stream;
nothing touches numpy's global state. Child streams are split off a parent
seed with ``SeedSequence.spawn`` so the derivation is deterministic and
independent streams stay independent.
"""

from __future__ import annotations

import numpy as np


def stream(seed) -> np.random.Generator:
    """A fresh generator for ``seed`` (int or SeedSequence)."""
    if isinstance(seed, np.random.SeedSequence):
        return np.random.default_rng(seed)
    return np.random.default_rng(np.random.SeedSequence(int(seed)))


def split(seed, n: int) -> list[np.random.SeedSequence]:
    """Split ``seed`` into ``n`` independent child seed sequences."""
    if isinstance(seed, np.random.SeedSequence):
        return seed.spawn(n)
    return np.random.SeedSequence(int(seed)).spawn(n)


def sub_seeds(rng: np.random.Generator, n: int) -> list[int]:
    """Draw ``n`` integer sub-seeds from ``rng`` (for APIs that take ints)."""
    return [int(s) for s in rng.integers(0, 2**63 - 1, size=n)]
