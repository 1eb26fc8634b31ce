"""Boundary-seeking query synthesis in the generator's latent space.

Each query comes from an independent momentum descent on
``|w . G(z) + b|`` started at a fresh uniform latent point; the k restarts
with the lowest final objectives become the batch. Taking at most one query
per restart keeps the batch from collapsing into a single local minimum.
An optional diversity kernel can additionally push each restart away from
the instances synthesized before it (off by default).
"""

from __future__ import annotations

import csv
import dataclasses
import os
from dataclasses import dataclass, field

import numpy as np

from gaal import autodiff as ad
from gaal import networks as nets
from gaal import rng
from gaal.errors import ConfigError, DimensionError
from gaal.optim import SgdMomentum
from gaal.strategies import QueryBatch, StrategyKind
from gaal.svm import LinearClassifier, decision_value


@dataclass
class SynthConfig:
    steps: int = 100
    restarts: int | None = None  # None: 3 * batch size, resolved per call
    learning_rate: float = 0.05
    momentum: float = 0.9
    diversity_weight: float = 0.0
    diversity_sigma: float = 1.0
    seed: int = 0

    def validate(self) -> None:
        if self.steps < 1:
            raise ConfigError(f"steps must be >= 1, got {self.steps}")
        if self.restarts is not None and self.restarts < 1:
            raise ConfigError(f"restarts must be >= 1, got {self.restarts}")
        if self.learning_rate <= 0:
            raise ConfigError(f"learning_rate must be positive, got {self.learning_rate}")
        if not 0.0 <= self.momentum < 1.0:
            raise ConfigError(f"momentum must be in [0, 1), got {self.momentum}")
        if self.diversity_weight < 0:
            raise ConfigError(
                f"diversity_weight must be non-negative, got {self.diversity_weight}"
            )


@dataclass
class SynthesizedQuery:
    """One synthesized instance with its latent provenance."""

    z: np.ndarray
    x: np.ndarray
    objective_value: float  # |w . x + b| at the returned iterate
    restart_index: int
    trajectory: list[float] = field(default_factory=list, repr=False)


def _check_dims(clf: LinearClassifier, gen: nets.GeneratorNet, z: np.ndarray) -> None:
    if z.shape != (gen.latent_dim,):
        raise DimensionError(f"latent of shape {z.shape} for generator expecting {gen.latent_dim}")
    if clf.w.shape != (gen.out_dim,):
        raise DimensionError(
            f"classifier over {clf.w.shape} cannot score generator output of {gen.out_dim}"
        )


def diversity_penalty(candidate, batch_so_far, sigma: float = 1.0) -> float:
    """Gaussian-kernel similarity of ``candidate`` to already-chosen
    instances: sum_j exp(-||candidate - x_j||^2 / (2 sigma^2))."""
    candidate = np.asarray(candidate, dtype=np.float64)
    out = 0.0
    for prior in batch_so_far:
        diff = candidate - np.asarray(prior, dtype=np.float64)
        out += float(np.exp(-np.dot(diff, diff) / (2.0 * sigma**2)))
    return out


def _objective_node(clf, gen, z_node, priors, weight, sigma):
    x = nets.net_forward_node(gen, z_node)
    margin = ad.mean(ad.absolute(ad.affine(x, clf.w.reshape(1, -1), np.array([clf.b]))))
    if weight == 0.0 or not priors:
        return margin
    penalty = None
    for prior in priors:
        diff = ad.sub(x, ad.Node(prior))
        sq = ad.total(ad.mul(diff, diff))
        kern = ad.exp(ad.scale(sq, -1.0 / (2.0 * sigma**2)))
        penalty = kern if penalty is None else ad.add(penalty, kern)
    return ad.add(margin, ad.scale(penalty, weight))


def gaal_objective(
    clf: LinearClassifier,
    gen: nets.GeneratorNet,
    z,
    batch_so_far=(),
    diversity_weight: float = 0.0,
    diversity_sigma: float = 1.0,
) -> float:
    """Distance proxy ``|w . G(z) + b|``, plus the weighted diversity
    penalty when configured."""
    z = np.asarray(z, dtype=np.float64)
    _check_dims(clf, gen, z)
    x = nets.net_apply(gen, z)
    value = abs(float(np.dot(clf.w, x) + clf.b))
    if diversity_weight:
        value += diversity_weight * diversity_penalty(x, batch_so_far, diversity_sigma)
    return value


def gaal_gradient(
    clf: LinearClassifier,
    gen: nets.GeneratorNet,
    z,
    batch_so_far=(),
    diversity_weight: float = 0.0,
    diversity_sigma: float = 1.0,
) -> np.ndarray:
    """Gradient of the synthesis objective w.r.t. the latent point, via
    back-propagation through the generator."""
    z = np.asarray(z, dtype=np.float64)
    _check_dims(clf, gen, z)
    z_node = ad.Node(z)
    loss = _objective_node(
        clf, gen, z_node, list(batch_so_far), diversity_weight, diversity_sigma
    )
    ad.backward(loss)
    return z_node.grad.copy()


def synthesize_queries(
    clf: LinearClassifier, gen: nets.GeneratorNet, k: int, config: SynthConfig | None = None
) -> QueryBatch:
    """Run independent momentum descents and keep the k best restarts."""
    config = config or SynthConfig()
    config.validate()
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    restarts = config.restarts if config.restarts is not None else 3 * k
    if restarts < k:
        raise ConfigError(f"restarts ({restarts}) must be >= k ({k})")
    _check_dims(clf, gen, np.zeros(gen.latent_dim))

    weight, sigma = config.diversity_weight, config.diversity_sigma
    priors: list[np.ndarray] = []
    runs = []
    for r, child in enumerate(rng.split(config.seed, restarts)):
        z = rng.stream(child).uniform(-1.0, 1.0, size=gen.latent_dim)
        opt = SgdMomentum(config.learning_rate, config.momentum)
        obj = gaal_objective(clf, gen, z, priors, weight, sigma)
        trajectory = [obj]
        best_obj, best_z = obj, z
        for _ in range(config.steps):
            grad = gaal_gradient(clf, gen, z, priors, weight, sigma)
            (z,) = opt.step([z], [grad])
            obj = gaal_objective(clf, gen, z, priors, weight, sigma)
            trajectory.append(obj)
            if obj < best_obj:
                best_obj, best_z = obj, z
        runs.append((best_obj, r, best_z, trajectory))
        if weight:
            priors.append(nets.net_apply(gen, best_z))

    runs.sort(key=lambda run: (run[0], run[1]))
    items = []
    for best_obj, r, best_z, trajectory in runs[:k]:
        x = nets.net_apply(gen, best_z)
        items.append(
            SynthesizedQuery(
                z=best_z,
                x=x,
                objective_value=abs(decision_value(clf, x)),
                restart_index=r,
                trajectory=trajectory,
            )
        )
    return QueryBatch(items=items, strategy=StrategyKind.GAAL)


def dump_queries(batch: QueryBatch, out_dir, image_shape, ids=None) -> None:
    """Write each query as an 8-bit PGM plus a manifest CSV."""
    h, w = image_shape
    os.makedirs(out_dir, exist_ok=True)
    if ids is None:
        ids = [f"q{i:03d}" for i in range(len(batch.items))]
    with open(os.path.join(out_dir, "manifest.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["query_id", "restart", "objective"])
        for qid, item in zip(ids, batch.items):
            pixels = np.clip(np.rint((item.x + 1.0) * 127.5), 0, 255).astype(np.uint8)
            if pixels.size != h * w:
                raise DimensionError(f"instance of {pixels.size} values is not {h}x{w}")
            with open(os.path.join(out_dir, f"{qid}.pgm"), "wb") as img:
                img.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
                img.write(pixels.tobytes())
            writer.writerow([qid, item.restart_index, format(item.objective_value, ".17g")])
