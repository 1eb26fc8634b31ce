"""Adversarial training of the generator on an unlabeled pool.

One discriminator update per generator update by default, Adam with the
usual (0.5, 0.999) betas, and the non-saturating generator loss
``-mean log D(G(z))`` (the literal ``log(1 - D(G(z)))`` form stalls when
the discriminator wins early).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gaal import autodiff as ad
from gaal import networks as nets
from gaal import rng
from gaal.errors import ConfigError, ContractError
from gaal.optim import Adam


@dataclass
class GanConfig:
    epochs: int = 150
    batch_size: int = 64
    d_steps: int = 1
    learning_rate: float = 2e-4
    beta1: float = 0.5
    beta2: float = 0.999
    seed: int = 0
    latent_dim: int | None = None  # None: sized from the data dimension
    hidden: object = None  # one width or a tuple of widths; None: sized default
    checkpoint: str | None = None  # reuse a trained generator instead of training

    def validate(self) -> None:
        for name in ("epochs", "batch_size", "d_steps"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.learning_rate <= 0:
            raise ConfigError(f"learning_rate must be positive, got {self.learning_rate}")


def _prob_nodes(disc, x, params):
    out = nets.net_forward_node(disc, np.atleast_2d(np.asarray(x, dtype=np.float64)), params)
    return out  # [n, 1]


def d_loss_node(disc, real_batch, fake_batch, params=None) -> ad.Node:
    real = np.atleast_2d(np.asarray(real_batch, dtype=np.float64))
    fake = np.atleast_2d(np.asarray(fake_batch, dtype=np.float64))
    if real.shape[0] == 0 or fake.shape[0] == 0:
        raise ContractError("d_loss needs non-empty real and fake batches")
    p_real = _prob_nodes(disc, real, params)
    p_fake = _prob_nodes(disc, fake, params)
    loss_real = ad.binary_cross_entropy(p_real, np.ones_like(p_real.value))
    loss_fake = ad.binary_cross_entropy(p_fake, np.zeros_like(p_fake.value))
    return ad.add(loss_real, loss_fake)


def g_loss_node(disc, fake_batch, disc_params=None) -> ad.Node:
    fake = fake_batch if isinstance(fake_batch, ad.Node) else ad.Node(
        np.atleast_2d(np.asarray(fake_batch, dtype=np.float64))
    )
    if fake.value.shape[0] == 0:
        raise ContractError("g_loss needs a non-empty fake batch")
    p_fake = nets.net_forward_node(disc, fake, disc_params)
    return ad.binary_cross_entropy(p_fake, np.ones_like(p_fake.value))


def d_loss(disc, real_batch, fake_batch) -> float:
    """``-mean log D(real) - mean log(1 - D(fake))``; >= 0 up to clamping."""
    return float(d_loss_node(disc, real_batch, fake_batch).value)


def g_loss(disc, fake_batch) -> float:
    """``-mean log D(G(z))`` over an already-decoded fake batch."""
    return float(g_loss_node(disc, fake_batch).value)


def train_gan(pool: np.ndarray, config: GanConfig, gen_specs=None, disc_specs=None):
    """Alternating adversarial training on the whole pool.

    Returns ``(generator, discriminator, history)`` where history rows are
    ``(epoch, mean_d_loss, mean_g_loss)``. Fully determined by the config
    seed: batch shuffling, latent draws, and initialization all derive from
    it.
    """
    config.validate()
    pool = np.asarray(pool, dtype=np.float64)
    n, data_dim = pool.shape
    if n < config.batch_size:
        raise ConfigError(f"pool of {n} is smaller than batch_size {config.batch_size}")

    latent_default, hidden_default = nets.default_dims(data_dim)
    latent_dim = config.latent_dim or latent_default
    hidden = config.hidden or hidden_default
    if gen_specs is None:
        gen_specs = nets.generator_specs(latent_dim, data_dim, hidden)
    if disc_specs is None:
        disc_specs = nets.discriminator_specs(data_dim, hidden)

    seed_g, seed_d, seed_shuffle, seed_z = rng.split(config.seed, 4)
    gen = nets.init_network(gen_specs, seed_g, nets.GeneratorNet)
    disc = nets.init_network(disc_specs, seed_d, nets.DiscriminatorNet)
    shuffle_rng = rng.stream(seed_shuffle)
    z_rng = rng.stream(seed_z)

    opt_g = Adam(config.learning_rate, config.beta1, config.beta2)
    opt_d = Adam(config.learning_rate, config.beta1, config.beta2)

    bsz = config.batch_size
    history = []
    for epoch in range(config.epochs):
        perm = shuffle_rng.permutation(n)
        batches = [perm[i : i + bsz] for i in range(0, n - bsz + 1, bsz)]
        d_losses, g_losses = [], []
        i = 0
        while i < len(batches):
            for _ in range(config.d_steps):
                if i >= len(batches):
                    break
                real = pool[batches[i]]
                i += 1
                z = z_rng.uniform(-1.0, 1.0, size=(bsz, latent_dim))
                fake = nets.net_apply(gen, z)
                d_params = nets.parameter_nodes(disc)
                loss = d_loss_node(disc, real, fake, d_params)
                ad.backward(loss)
                disc.set_parameters(
                    opt_d.step(disc.parameters(), [p.grad for p in d_params])
                )
                d_losses.append(float(loss.value))

            z = z_rng.uniform(-1.0, 1.0, size=(bsz, latent_dim))
            g_params = nets.parameter_nodes(gen)
            fake_node = nets.net_forward_node(gen, z, g_params)
            loss = g_loss_node(disc, fake_node)
            ad.backward(loss)
            gen.set_parameters(opt_g.step(gen.parameters(), [p.grad for p in g_params]))
            g_losses.append(float(loss.value))

        history.append((epoch, float(np.mean(d_losses)), float(np.mean(g_losses))))
    return gen, disc, history


def write_loss_history(path, history) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("epoch,d_loss,g_loss\n")
        for epoch, d, g in history:
            fh.write(f"{epoch},{format(d, '.17g')},{format(g, '.17g')}\n")
