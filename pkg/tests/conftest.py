"""Shared oracles and fixtures.

The finite-difference checker and the SVM grid-search oracle live here so
every test compares the implementation against an independent computation
path.
"""

from __future__ import annotations

import numpy as np
import pytest

from gaal import benchmarks as bm
from gaal.gan import train_gan
from gaal.svm import hinge_objective


def central_difference(f, arrays, h=1e-5):
    """Elementwise central differences of scalar ``f`` over a list of
    arrays; returns one gradient array per input."""
    grads = []
    for i, arr in enumerate(arrays):
        grad = np.zeros_like(arr)
        it = np.nditer(arr, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            plus = [a.copy() for a in arrays]
            minus = [a.copy() for a in arrays]
            plus[i][idx] += h
            minus[i][idx] -= h
            grad[idx] = (f(plus) - f(minus)) / (2 * h)
        grads.append(grad)
    return grads


def max_rel_err(analytic, numeric, floor=1e-8):
    denom = np.maximum.reduce([np.abs(analytic), np.abs(numeric), np.full_like(numeric, floor)])
    return float(np.max(np.abs(analytic - numeric) / denom))


def svm_grid_oracle(data, lam, lo=-5.0, hi=5.0, coarse=0.01, fine=0.001, window=0.1):
    """Global optimum of the 1-D hinge objective by grid scan: a coarse
    sweep of (w, b) in [lo, hi]^2 followed by a fine sweep around its argmin
    (the objective is convex, so the refinement brackets the optimum)."""
    X, y = data.instances[:, 0], data.labels

    def sweep(ws, bs):
        W = ws[:, None, None]
        B = bs[None, :, None]
        margins = y[None, None, :] * (W * X[None, None, :] + B)
        hinge = np.maximum(0.0, 1.0 - margins).mean(axis=2)
        obj = 0.5 * lam * ws[:, None] ** 2 + hinge
        idx = np.unravel_index(np.argmin(obj), obj.shape)
        return obj[idx], ws[idx[0]], bs[idx[1]]

    val, w0, b0 = sweep(np.arange(lo, hi + coarse / 2, coarse), np.arange(lo, hi + coarse / 2, coarse))
    val2, _, _ = sweep(
        np.arange(w0 - window, w0 + window + fine / 2, fine),
        np.arange(b0 - window, b0 + window + fine / 2, fine),
    )
    return min(val, val2)


def dense_grid_1d(data, lam, lo=-5.0, hi=5.0, step=1e-3, chunk=200):
    """The literal dense scan at ``step`` resolution, chunked over w rows."""
    X, y = data.instances[:, 0], data.labels
    grid = np.arange(lo, hi + step / 2, step)
    best = np.inf
    for start in range(0, len(grid), chunk):
        ws = grid[start : start + chunk]
        margins = y[None, None, :] * (ws[:, None, None] * X[None, None, :] + grid[None, :, None])
        hinge = np.maximum(0.0, 1.0 - margins).mean(axis=2)
        obj = 0.5 * lam * ws[:, None] ** 2 + hinge
        best = min(best, float(obj.min()))
    return best


@pytest.fixture(scope="session")
def benchmark_pool():
    return bm.two_gaussians_pool()


@pytest.fixture(scope="session")
def trained_gan(benchmark_pool):
    gen, disc, history = train_gan(benchmark_pool.instances, bm.benchmark_gan_config(seed=0))
    return gen, disc, history
