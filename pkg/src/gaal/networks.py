"""Generator and discriminator MLPs with deterministic forward passes.

Networks are plain parameter containers; forward passes never mutate them,
so a trained network can be read concurrently. The generator ends in tanh
(outputs in [-1, 1], matching the data range); the discriminator ends in
sigmoid (scalar probability).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from gaal import autodiff as ad
from gaal import rng
from gaal.errors import ConfigError, DimensionError, FormatError

NET_MAGIC = b"GAALNET1"
INIT_STD = 0.02
LEAKY_ALPHA = 0.2

_ACTIVATIONS = ("linear", "relu", "leaky_relu", "tanh", "sigmoid")


@dataclass(frozen=True)
class LayerSpec:
    in_dim: int
    out_dim: int
    activation: str
    alpha: float = LEAKY_ALPHA  # slope for leaky_relu; ignored otherwise

    def __post_init__(self):
        if self.in_dim < 1 or self.out_dim < 1:
            raise ConfigError(f"layer dims must be positive, got {self}")
        if self.activation not in _ACTIVATIONS:
            raise ConfigError(f"unknown activation {self.activation!r}")


class FeedForwardNet:
    """A stack of affine layers with per-layer activations."""

    def __init__(self, specs: list[LayerSpec], weights, biases):
        _validate_chain(specs)
        self.specs = list(specs)
        self.weights = list(weights)  # each [out, in]
        self.biases = list(biases)  # each [out]

    @property
    def in_dim(self) -> int:
        return self.specs[0].in_dim

    @property
    def out_dim(self) -> int:
        return self.specs[-1].out_dim

    def parameters(self) -> list[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out

    def set_parameters(self, params) -> None:
        for i in range(len(self.specs)):
            self.weights[i] = params[2 * i]
            self.biases[i] = params[2 * i + 1]


class GeneratorNet(FeedForwardNet):
    def __init__(self, specs, weights, biases):
        if specs[-1].activation != "tanh":
            raise ConfigError("generator must end in tanh")
        super().__init__(specs, weights, biases)

    @property
    def latent_dim(self) -> int:
        return self.in_dim


class DiscriminatorNet(FeedForwardNet):
    def __init__(self, specs, weights, biases):
        if specs[-1].activation != "sigmoid" or specs[-1].out_dim != 1:
            raise ConfigError("discriminator must end in a 1-unit sigmoid")
        super().__init__(specs, weights, biases)


def _validate_chain(specs: list[LayerSpec]) -> None:
    if not specs:
        raise ConfigError("a network needs at least one layer")
    for a, b in zip(specs, specs[1:]):
        if a.out_dim != b.in_dim:
            raise ConfigError(f"layer dims do not chain: {a.out_dim} -> {b.in_dim}")


def init_network(specs: list[LayerSpec], seed, cls=FeedForwardNet):
    """Weights ~ Normal(0, 0.02), biases zero; deterministic per seed."""
    gen = rng.stream(seed)
    weights, biases = [], []
    for spec in specs:
        weights.append(gen.normal(0.0, INIT_STD, size=(spec.out_dim, spec.in_dim)))
        biases.append(np.zeros(spec.out_dim))
    return cls(specs, weights, biases)


def generator_specs(latent_dim: int, data_dim: int, hidden) -> list[LayerSpec]:
    """``hidden`` is one width or a tuple of widths for a deeper stack."""
    widths = (hidden,) if isinstance(hidden, int) else tuple(hidden)
    dims = (latent_dim,) + widths
    specs = [LayerSpec(a, b, "relu") for a, b in zip(dims, dims[1:])]
    specs.append(LayerSpec(dims[-1], data_dim, "tanh"))
    return specs


def discriminator_specs(data_dim: int, hidden) -> list[LayerSpec]:
    widths = (hidden,) if isinstance(hidden, int) else tuple(hidden)
    dims = (data_dim,) + widths
    specs = [LayerSpec(a, b, "leaky_relu") for a, b in zip(dims, dims[1:])]
    specs.append(LayerSpec(dims[-1], 1, "sigmoid"))
    return specs


def default_dims(data_dim: int):
    """(latent_dim, hidden widths) sized for images vs low-dimensional data.

    Low-dimensional pools get two hidden layers: one layer cannot reliably
    fold the uniform latent cube onto well-separated tight modes.
    """
    if data_dim >= 100:
        return 64, (256,)
    return 8, (32, 32)


# ---------------------------------------------------------------------------
# forward passes


def _activate_array(x: np.ndarray, spec: LayerSpec) -> np.ndarray:
    if spec.activation == "relu":
        return np.maximum(x, 0.0)
    if spec.activation == "leaky_relu":
        return np.where(x > 0, x, spec.alpha * x)
    if spec.activation == "tanh":
        return np.tanh(x)
    if spec.activation == "sigmoid":
        return ad._sigmoid(x)
    return x


def net_apply(net: FeedForwardNet, x: np.ndarray) -> np.ndarray:
    """Plain numpy forward pass (no tape)."""
    h = np.asarray(x, dtype=np.float64)
    for spec, w, b in zip(net.specs, net.weights, net.biases):
        h = h @ w.T + b if h.ndim == 2 else w @ h + b
        h = _activate_array(h, spec)
    return h


def parameter_nodes(net: FeedForwardNet) -> list[ad.Node]:
    """Leaf nodes over the parameters, in declaration order W0, b0, W1, ..."""
    out = []
    for w, b in zip(net.weights, net.biases):
        out.extend((ad.Node(w), ad.Node(b)))
    return out


def net_forward_node(net: FeedForwardNet, x, params: list[ad.Node] | None = None) -> ad.Node:
    """Taped forward pass; differentiable w.r.t. both the input node and,
    when ``params`` is given, the parameter nodes."""
    if params is None:
        params = parameter_nodes(net)
    h = x if isinstance(x, ad.Node) else ad.Node(x)
    for i, spec in enumerate(net.specs):
        h = ad.affine(h, params[2 * i], params[2 * i + 1])
        if spec.activation == "relu":
            h = ad.relu(h)
        elif spec.activation == "leaky_relu":
            h = ad.leaky_relu(h, spec.alpha)
        elif spec.activation == "tanh":
            h = ad.tanh(h)
        elif spec.activation == "sigmoid":
            h = ad.sigmoid(h)
    return h


def generator_forward(gen: GeneratorNet, z: np.ndarray) -> np.ndarray:
    """Decode one latent vector (or a batch of them) into instance space."""
    z = np.asarray(z, dtype=np.float64)
    want = gen.latent_dim
    if z.shape[-1] != want:
        raise DimensionError(f"latent of shape {z.shape} for generator expecting {want}")
    return net_apply(gen, z)


def discriminator_forward(disc: DiscriminatorNet, x: np.ndarray):
    """Probability that ``x`` is real: a float for one instance, an array
    of per-row probabilities for a batch."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != disc.in_dim:
        raise DimensionError(f"input of shape {x.shape} for discriminator expecting {disc.in_dim}")
    out = net_apply(disc, x)
    if x.ndim == 1:
        return float(out[0])
    return out[:, 0]


def sample_latent(latent_dim: int, count: int, seed) -> np.ndarray:
    """``count`` i.i.d. latent vectors, entries uniform on [-1, 1]."""
    if count < 0:
        raise ConfigError(f"count must be non-negative, got {count}")
    gen = rng.stream(seed)
    return gen.uniform(-1.0, 1.0, size=(count, latent_dim))


# ---------------------------------------------------------------------------
# checkpoints: magic, layer table, then float64 little-endian parameters
# in declaration order (W row-major, then b, per layer).

_ACT_CODES = {name: i for i, name in enumerate(_ACTIVATIONS)}
_ACT_NAMES = {i: name for name, i in _ACT_CODES.items()}


def save_network(net: FeedForwardNet, path) -> None:
    with open(path, "wb") as fh:
        fh.write(NET_MAGIC)
        fh.write(struct.pack("<I", len(net.specs)))
        for spec in net.specs:
            fh.write(
                struct.pack(
                    "<IIBd", spec.in_dim, spec.out_dim, _ACT_CODES[spec.activation], spec.alpha
                )
            )
        for w, b in zip(net.weights, net.biases):
            fh.write(w.astype("<f8").tobytes())
            fh.write(b.astype("<f8").tobytes())


def load_network(path, cls=FeedForwardNet) -> FeedForwardNet:
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != NET_MAGIC:
            raise FormatError(f"expected magic {NET_MAGIC!r}, got {magic!r}")
        (n_layers,) = struct.unpack("<I", fh.read(4))
        specs = []
        for _ in range(n_layers):
            in_dim, out_dim, code, alpha = struct.unpack("<IIBd", fh.read(17))
            if code not in _ACT_NAMES:
                raise FormatError(f"unknown activation code {code}")
            specs.append(LayerSpec(in_dim, out_dim, _ACT_NAMES[code], alpha))
        weights, biases = [], []
        for spec in specs:
            n = spec.out_dim * spec.in_dim
            raw = fh.read(8 * n)
            if len(raw) != 8 * n:
                raise FormatError("checkpoint truncated inside a weight tensor")
            weights.append(
                np.frombuffer(raw, dtype="<f8").reshape(spec.out_dim, spec.in_dim).copy()
            )
            raw = fh.read(8 * spec.out_dim)
            if len(raw) != 8 * spec.out_dim:
                raise FormatError("checkpoint truncated inside a bias tensor")
            biases.append(np.frombuffer(raw, dtype="<f8").copy())
    return cls(specs, weights, biases)
