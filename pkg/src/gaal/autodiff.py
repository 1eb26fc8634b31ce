"""Dense float64 tensors with reverse-mode automatic differentiation.

A computation is recorded as a DAG of :class:`Node` objects; ``backward``
on a scalar node fills every node's ``grad`` with the derivative of that
scalar. Values are plain numpy float64 arrays (row-major shape + flat data),
immutable by convention. Broadcasting is limited to bias addition.
"""

from __future__ import annotations

import numpy as np

from gaal.errors import ContractError, DimensionError

# Probabilities are clamped away from {0, 1} before any log so a saturated
# discriminator cannot produce infinities.
BCE_EPS = 1e-7


def as_tensor(value) -> np.ndarray:
    return np.asarray(value, dtype=np.float64)


class Node:
    """One tape node: a value, a same-shaped gradient slot, and the local
    backward rule that pushes an incoming gradient to the node's parents."""

    __slots__ = ("value", "grad", "parents", "op", "_push")

    def __init__(self, value, parents=(), push=None, op="leaf"):
        self.value = as_tensor(value)
        self.grad = np.zeros_like(self.value)
        self.parents = tuple(parents)
        self.op = op
        self._push = push

    def __repr__(self):
        return f"Node(op={self.op!r}, shape={self.value.shape})"


def _wrap(x) -> Node:
    return x if isinstance(x, Node) else Node(x)


def _topo_order(root: Node) -> list[Node]:
    """Parents-before-children ordering of the graph under ``root``."""
    order, visited = [], set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for p in node.parents:
            stack.append((p, False))
    return order


def backward(loss: Node) -> None:
    """Fill ``grad`` on every node reachable from ``loss``.

    ``loss`` must be scalar (one element). All gradients in the graph are
    zeroed first, so repeated calls never accumulate across iterations.
    """
    if loss.value.size != 1:
        raise ContractError(
            f"backward requires a scalar loss, got shape {loss.value.shape}"
        )
    order = _topo_order(loss)
    for node in order:
        node.grad = np.zeros_like(node.value)
    loss.grad = np.ones_like(loss.value)
    for node in reversed(order):
        if node._push is not None:
            node._push(node.grad)


# ---------------------------------------------------------------------------
# ops


def matmul(a, b):
    """Matrix product. Works on raw arrays (returns an array) or nodes."""
    if isinstance(a, Node) or isinstance(b, Node):
        a, b = _wrap(a), _wrap(b)
        _check_matmul(a.value, b.value)

        def push(g):
            a.grad += g @ b.value.T
            b.grad += a.value.T @ g

        return Node(a.value @ b.value, (a, b), push, "matmul")
    a, b = as_tensor(a), as_tensor(b)
    _check_matmul(a, b)
    return a @ b


def _check_matmul(a: np.ndarray, b: np.ndarray) -> None:
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise DimensionError(f"matmul of {a.shape} by {b.shape}")


def add(a, b) -> Node:
    """Elementwise sum; also accepts matrix + row-bias broadcasting."""
    a, b = _wrap(a), _wrap(b)
    bias_add = (
        a.value.ndim == 2 and b.value.ndim == 1 and a.value.shape[1] == b.value.shape[0]
    )
    if not bias_add and a.value.shape != b.value.shape:
        raise DimensionError(f"add of {a.value.shape} and {b.value.shape}")

    def push(g):
        a.grad += g
        b.grad += g.sum(axis=0) if bias_add else g

    return Node(a.value + b.value, (a, b), push, "add")


def sub(a, b) -> Node:
    a, b = _wrap(a), _wrap(b)
    if a.value.shape != b.value.shape:
        raise DimensionError(f"sub of {a.value.shape} and {b.value.shape}")

    def push(g):
        a.grad += g
        b.grad -= g

    return Node(a.value - b.value, (a, b), push, "sub")


def mul(a, b) -> Node:
    a, b = _wrap(a), _wrap(b)
    if a.value.shape != b.value.shape:
        raise DimensionError(f"mul of {a.value.shape} and {b.value.shape}")

    def push(g):
        a.grad += g * b.value
        b.grad += g * a.value

    return Node(a.value * b.value, (a, b), push, "mul")


def scale(a, c: float) -> Node:
    """Multiply by a python constant."""
    a = _wrap(a)
    c = float(c)

    def push(g):
        a.grad += g * c

    return Node(a.value * c, (a,), push, "scale")


def affine(x, weight, bias) -> Node:
    """``x @ weight.T + bias`` for a batch ``[n, in]``, or ``weight @ x + bias``
    for a single vector ``[in]``. ``weight`` is ``[out, in]``, ``bias`` ``[out]``."""
    x, weight, bias = _wrap(x), _wrap(weight), _wrap(bias)
    w, b = weight.value, bias.value
    if w.ndim != 2 or b.shape != (w.shape[0],):
        raise DimensionError(f"affine weight {w.shape} with bias {b.shape}")
    if x.value.ndim == 1:
        if x.value.shape[0] != w.shape[1]:
            raise DimensionError(f"affine weight {w.shape} applied to {x.value.shape}")

        def push(g):
            weight.grad += np.outer(g, x.value)
            bias.grad += g
            x.grad += w.T @ g

        return Node(w @ x.value + b, (x, weight, bias), push, "affine")
    if x.value.ndim != 2 or x.value.shape[1] != w.shape[1]:
        raise DimensionError(f"affine weight {w.shape} applied to {x.value.shape}")

    def push(g):
        weight.grad += g.T @ x.value
        bias.grad += g.sum(axis=0)
        x.grad += g @ w

    return Node(x.value @ w.T + b, (x, weight, bias), push, "affine")


def relu(x) -> Node:
    x = _wrap(x)
    mask = x.value > 0

    def push(g):
        x.grad += g * mask

    return Node(np.where(mask, x.value, 0.0), (x,), push, "relu")


def leaky_relu(x, alpha: float = 0.2) -> Node:
    x = _wrap(x)
    slope = np.where(x.value > 0, 1.0, float(alpha))

    def push(g):
        x.grad += g * slope

    return Node(x.value * slope, (x,), push, "leaky_relu")


def tanh(x) -> Node:
    x = _wrap(x)
    out = np.tanh(x.value)

    def push(g):
        x.grad += g * (1.0 - out * out)

    return Node(out, (x,), push, "tanh")


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def sigmoid(x) -> Node:
    x = _wrap(x)
    out = _sigmoid(x.value)

    def push(g):
        x.grad += g * out * (1.0 - out)

    return Node(out, (x,), push, "sigmoid")


def exp(x) -> Node:
    x = _wrap(x)
    out = np.exp(x.value)

    def push(g):
        x.grad += g * out

    return Node(out, (x,), push, "exp")


def absolute(x) -> Node:
    """Elementwise |x| with subgradient sign(0) = 0, so exact zeros are
    stationary points."""
    x = _wrap(x)
    sign = np.sign(x.value)

    def push(g):
        x.grad += g * sign

    return Node(np.abs(x.value), (x,), push, "abs")


def mean(x) -> Node:
    x = _wrap(x)
    n = x.value.size

    def push(g):
        x.grad += np.full_like(x.value, float(g) / n)

    return Node(x.value.mean(), (x,), push, "mean")


def total(x) -> Node:
    """Sum of all elements (scalar node)."""
    x = _wrap(x)

    def push(g):
        x.grad += np.full_like(x.value, float(g))

    return Node(x.value.sum(), (x,), push, "total")


def binary_cross_entropy(p, target) -> Node:
    """Mean of ``-t*log(p) - (1-t)*log(1-p)`` with p clamped to
    ``[BCE_EPS, 1 - BCE_EPS]``. No gradient flows to the targets or through
    the clamp."""
    p = _wrap(p)
    t = target.value if isinstance(target, Node) else as_tensor(target)
    if p.value.shape != t.shape:
        raise DimensionError(f"binary_cross_entropy of {p.value.shape} vs {t.shape}")
    pc = np.clip(p.value, BCE_EPS, 1.0 - BCE_EPS)
    inside = (p.value > BCE_EPS) & (p.value < 1.0 - BCE_EPS)
    n = p.value.size
    value = np.mean(-t * np.log(pc) - (1.0 - t) * np.log(1.0 - pc))

    def push(g):
        p.grad += float(g) * inside * (pc - t) / (pc * (1.0 - pc)) / n

    return Node(value, (p,), push, "bce")
