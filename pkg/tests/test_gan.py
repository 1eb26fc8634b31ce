import math

import numpy as np
import pytest

from gaal import networks as nets
from gaal.datasets import make_two_gaussians
from gaal.errors import ConfigError, ContractError
from gaal.gan import GanConfig, d_loss, g_loss, train_gan, write_loss_history


def constant_half_disc():
    # all-zero parameters: sigmoid(0) = 0.5 everywhere
    disc = nets.init_network(nets.discriminator_specs(2, 4), 0, nets.DiscriminatorNet)
    for w in disc.weights:
        w[:] = 0.0
    return disc


def test_d_loss_constant_half_output():
    disc = constant_half_disc()
    batch = np.zeros((6, 2))
    assert d_loss(disc, batch, batch) == pytest.approx(2 * math.log(2), abs=1e-12)


def test_d_loss_perfect_discriminator_limit():
    # drive the logit hard positive on real, hard negative on fake
    disc = nets.init_network(nets.discriminator_specs(1, 2), 0, nets.DiscriminatorNet)
    disc.weights[0][:] = np.array([[100.0], [100.0]])
    disc.biases[0][:] = 0.0
    disc.weights[1][:] = np.array([[100.0, 100.0]])
    disc.biases[1][:] = -50.0
    real = np.full((4, 1), 1.0)  # D -> 1
    fake = np.full((4, 1), -1.0)  # D -> 0
    assert d_loss(disc, real, fake) < 1e-5


def test_d_loss_matches_direct_formula():
    disc = nets.init_network(nets.discriminator_specs(3, 8), 4, nets.DiscriminatorNet)
    rng = np.random.default_rng(5)
    real, fake = rng.uniform(-1, 1, (7, 3)), rng.uniform(-1, 1, (9, 3))
    p_real = nets.discriminator_forward(disc, real)
    p_fake = nets.discriminator_forward(disc, fake)
    expected = -np.mean(np.log(p_real)) - np.mean(np.log(1 - p_fake))
    assert d_loss(disc, real, fake) == pytest.approx(expected, abs=1e-10)


def test_g_loss_constant_half_output():
    assert g_loss(constant_half_disc(), np.zeros((5, 2))) == pytest.approx(
        math.log(2), abs=1e-12
    )


def test_g_loss_fooled_discriminator_limit():
    disc = nets.init_network(nets.discriminator_specs(1, 2), 0, nets.DiscriminatorNet)
    disc.weights[0][:] = np.array([[100.0], [100.0]])
    disc.weights[1][:] = np.array([[100.0, 100.0]])
    disc.biases[1][:] = 0.0
    assert g_loss(disc, np.full((4, 1), 1.0)) < 1e-5


def test_g_loss_matches_direct_formula():
    disc = nets.init_network(nets.discriminator_specs(3, 8), 6, nets.DiscriminatorNet)
    fake = np.random.default_rng(3).uniform(-1, 1, (5, 3))
    expected = -np.mean(np.log(nets.discriminator_forward(disc, fake)))
    assert g_loss(disc, fake) == pytest.approx(expected, abs=1e-10)


def test_empty_batches_rejected():
    disc = constant_half_disc()
    with pytest.raises(ContractError):
        d_loss(disc, np.zeros((0, 2)), np.zeros((3, 2)))
    with pytest.raises(ContractError):
        g_loss(disc, np.zeros((0, 2)))


def tiny_pool():
    return make_two_gaussians(64, (0.5, 0.0), (-0.5, 0.0), 0.2, seed=1).instances


def test_train_gan_deterministic_per_seed():
    cfg = GanConfig(epochs=2, batch_size=16, seed=3)
    g1, d1, h1 = train_gan(tiny_pool(), cfg)
    g2, d2, h2 = train_gan(tiny_pool(), cfg)
    for a, b in zip(g1.parameters() + d1.parameters(), g2.parameters() + d2.parameters()):
        assert np.array_equal(a, b)
    assert h1 == h2


def test_train_gan_outputs_in_range_and_history_shape():
    gen, disc, history = train_gan(tiny_pool(), GanConfig(epochs=3, batch_size=16, seed=0))
    samples = nets.net_apply(gen, nets.sample_latent(gen.latent_dim, 20, 5))
    assert np.all(samples >= -1.0) and np.all(samples <= 1.0)
    assert len(history) == 3
    assert history[0][0] == 0


def test_train_gan_undersized_pool_rejected():
    with pytest.raises(ConfigError, match="smaller"):
        train_gan(np.zeros((8, 2)), GanConfig(batch_size=16))


def test_gan_config_validation():
    with pytest.raises(ConfigError):
        GanConfig(epochs=0).validate()
    with pytest.raises(ConfigError):
        GanConfig(learning_rate=0.0).validate()


def test_loss_history_csv(tmp_path):
    path = tmp_path / "losses.csv"
    write_loss_history(path, [(0, 1.5, 0.5), (1, 1.25, 0.75)])
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "epoch,d_loss,g_loss"
    assert lines[1].startswith("0,1.5")
    assert len(lines) == 3
