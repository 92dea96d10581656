"""Gauss-Legendre quadrature helpers shared across the library."""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

__all__ = ["gauss_legendre", "gauss_legendre_panels", "tensor_rule"]


@lru_cache(maxsize=64)
def _nodes(order: int):
    x, w = leggauss(order)
    return x, w


def gauss_legendre(a: float, b: float, order: int):
    """Nodes and weights on [a, b]."""
    x, w = _nodes(order)
    half = 0.5 * (b - a)
    return half * x + 0.5 * (a + b), half * w


def gauss_legendre_panels(a: float, b: float, panels: int, order: int):
    """Composite rule: `panels` equal subintervals, `order` points each."""
    x, w = _nodes(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * (edges[1] - edges[0])
    mids = 0.5 * (edges[:-1] + edges[1:])
    xs = (half * x[None, :] + mids[:, None]).ravel()
    ws = np.tile(half * w, panels)
    return xs, ws


def tensor_rule(intervals, order: int):
    """Tensor-product rule over a list of (a, b) intervals.

    Returns (nodes, weights) with nodes of shape (npts, len(intervals)).
    """
    axes = [gauss_legendre(a, b, order) for a, b in intervals]
    grids = np.meshgrid(*[ax[0] for ax in axes], indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=-1)
    w = axes[0][1]
    for ax in axes[1:]:
        w = np.multiply.outer(w, ax[1])
    return nodes, w.ravel()
