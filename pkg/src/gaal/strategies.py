"""Query-acquisition strategies over a pool or a trained generator.

Pool selections mark their picks unavailable so no instance is ever queried
twice; synthesis strategies create instances and leave the pool untouched.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from gaal import networks as nets
from gaal import rng
from gaal.errors import ConfigError, ContractError
from gaal.svm import LinearClassifier, decision_values


class StrategyKind(str, Enum):
    GAAL = "gaal"
    SIMPLE_GAN = "simple_gan"
    SVM_ACTIVE = "svm_active"
    RANDOM = "random"
    SUPERVISED = "supervised"


@dataclass
class Pool:
    """Unlabeled instances plus hidden labels only an oracle may reveal."""

    instances: np.ndarray  # [n, d]
    hidden_labels: np.ndarray | None = None
    available: np.ndarray = field(default=None)

    def __post_init__(self):
        self.instances = np.asarray(self.instances, dtype=np.float64)
        if self.available is None:
            self.available = np.ones(len(self.instances), dtype=bool)
        self.available = np.asarray(self.available, dtype=bool)
        if len(self.available) != len(self.instances):
            raise ContractError(
                f"mask of {len(self.available)} for pool of {len(self.instances)}"
            )

    def available_indices(self) -> np.ndarray:
        return np.flatnonzero(self.available)

    def available_count(self) -> int:
        return int(self.available.sum())

    def mark_queried(self, indices) -> None:
        self.available[np.asarray(indices, dtype=int)] = False


@dataclass
class PoolItem:
    x: np.ndarray
    index: int


@dataclass
class GeneratedItem:
    x: np.ndarray
    z: np.ndarray


@dataclass
class QueryBatch:
    """Instances awaiting oracle verdicts. Items are :class:`PoolItem` or
    synthesized queries; either way each carries its instance in ``.x``."""

    items: list
    strategy: StrategyKind
    iteration: int = 0
    truncated: bool = False


def select_random(pool: Pool, k: int, seed) -> QueryBatch:
    """k distinct available instances uniformly without replacement; a
    too-large k truncates to what is left and flags it."""
    if k < 0:
        raise ConfigError(f"k must be non-negative, got {k}")
    avail = pool.available_indices()
    truncated = k > len(avail)
    take = min(k, len(avail))
    chosen = rng.stream(seed).choice(avail, size=take, replace=False) if take else avail[:0]
    pool.mark_queried(chosen)
    items = [PoolItem(pool.instances[i], int(i)) for i in chosen]
    return QueryBatch(items=items, strategy=StrategyKind.RANDOM, truncated=truncated)


def select_svm_active(clf: LinearClassifier, pool: Pool, k: int) -> QueryBatch:
    """The k available instances closest to the decision boundary (smallest
    |w . x + b|), ties broken by lower pool index."""
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    avail = pool.available_indices()
    if len(avail) == 0:
        raise ContractError("no available instances left in the pool")
    dv = np.abs(decision_values(clf, pool.instances[avail]))
    order = np.argsort(dv, kind="stable")  # stable: equal values keep index order
    truncated = k > len(avail)
    chosen = avail[order[: min(k, len(avail))]]
    pool.mark_queried(chosen)
    items = [PoolItem(pool.instances[i], int(i)) for i in chosen]
    return QueryBatch(items=items, strategy=StrategyKind.SVM_ACTIVE, truncated=truncated)


def select_simple_gan(gen: nets.GeneratorNet, k: int, seed) -> QueryBatch:
    """Decode k fresh uniform latent draws; no optimization, no pool."""
    if k < 0:
        raise ConfigError(f"k must be non-negative, got {k}")
    zs = nets.sample_latent(gen.latent_dim, k, seed)
    items = [GeneratedItem(nets.net_apply(gen, z), z) for z in zs]
    return QueryBatch(items=items, strategy=StrategyKind.SIMPLE_GAN)


def mixed_schedule(iteration: int) -> StrategyKind:
    """Exploit with synthesis, but explore with one random batch after
    every five synthesis batches."""
    if iteration < 0:
        raise ConfigError(f"iteration must be >= 0, got {iteration}")
    return StrategyKind.RANDOM if iteration % 6 == 5 else StrategyKind.GAAL
