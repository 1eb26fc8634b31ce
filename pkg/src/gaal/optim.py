"""First-order optimizers over lists of parameter tensors.

Both optimizers are stateful objects: per-parameter buffers are allocated
lazily on the first step and must keep matching the parameter shapes after
that. ``step`` returns fresh arrays; callers assign them back.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from gaal.errors import ConfigError, DimensionError


def _check_aligned(params, grads, buffers) -> None:
    if len(params) != len(grads):
        raise DimensionError(f"{len(params)} params but {len(grads)} grads")
    for p, g in zip(params, grads):
        if p.shape != g.shape:
            raise DimensionError(f"param {p.shape} with grad {g.shape}")
    if buffers is not None:
        for p, b in zip(params, buffers):
            if p.shape != b.shape:
                raise DimensionError(f"param {p.shape} with buffer {b.shape}")


@dataclass
class SgdMomentum:
    """Classic momentum: ``v <- mu*v + g``; ``theta <- theta - lr*v``."""

    learning_rate: float
    momentum: float = 0.0
    velocities: list[np.ndarray] | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ConfigError(f"learning_rate must be positive, got {self.learning_rate}")
        if not 0.0 <= self.momentum < 1.0:
            raise ConfigError(f"momentum must be in [0, 1), got {self.momentum}")

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> list[np.ndarray]:
        if self.velocities is None:
            self.velocities = [np.zeros_like(p) for p in params]
        _check_aligned(params, grads, self.velocities)
        out = []
        for i, (p, g) in enumerate(zip(params, grads)):
            v = self.momentum * self.velocities[i] + g
            self.velocities[i] = v
            out.append(p - self.learning_rate * v)
        return out


@dataclass
class Adam:
    """Bias-corrected Adam."""

    learning_rate: float
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    m: list[np.ndarray] | None = field(default=None, repr=False)
    v: list[np.ndarray] | None = field(default=None, repr=False)
    t: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ConfigError(f"learning_rate must be positive, got {self.learning_rate}")
        for name, beta in (("beta1", self.beta1), ("beta2", self.beta2)):
            if not 0.0 <= beta < 1.0:
                raise ConfigError(f"{name} must be in [0, 1), got {beta}")
        if self.epsilon <= 0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> list[np.ndarray]:
        if self.m is None:
            self.m = [np.zeros_like(p) for p in params]
            self.v = [np.zeros_like(p) for p in params]
        _check_aligned(params, grads, self.m)
        _check_aligned(params, grads, self.v)
        self.t += 1
        c1 = 1.0 - self.beta1**self.t
        c2 = 1.0 - self.beta2**self.t
        out = []
        for i, (p, g) in enumerate(zip(params, grads)):
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g
            m_hat = self.m[i] / c1
            v_hat = self.v[i] / c2
            out.append(p - self.learning_rate * m_hat / (np.sqrt(v_hat) + self.epsilon))
        return out
