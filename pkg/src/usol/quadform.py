"""Diagonal quadratic forms and graph coordinates for their level sets.

A form of signature index k on R^d is

    Q(xi) = -xi_1^2 - ... - xi_k^2 + xi_{k+1}^2 + ... + xi_d^2 .

Coordinates are split as xi = (xi_1, xi', xi'', xi_d) with xi' of length k-1
and xi'' of length d-k-1; empty blocks are zero-length, never absent.  The
45-degree rotation eta_1 = (xi_d + xi_1)/sqrt(2), eta_d = (xi_d - xi_1)/sqrt(2)
turns Q into 2 eta_1 eta_d - |eta'|^2 + |eta''|^2, so the level set {Q = rho}
is locally the graph

    eta_d = height(eta~) = (|eta'|^2 - |eta''|^2 + rho) / (2 eta_1)

over the block D = {eta_1 in [1, 2], |eta'| <= 1, |eta''| <= 1}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .bumps import plateau_bump

__all__ = [
    "QuadraticForm",
    "GraphChart",
    "eval_q",
    "rotate_to_graph",
    "graph_to_xi",
    "graph_height",
    "canonical_chart",
    "block_rotation",
]

_ETA1_TOL = 1e-9


@dataclass(frozen=True)
class QuadraticForm:
    d: int
    k: int

    def __post_init__(self):
        if self.d < 3:
            raise ValueError(f"dimension must be >= 3, got {self.d}")
        if not 1 <= self.k <= self.d:
            raise ValueError(f"signature index must satisfy 1 <= k <= d, got {self.k}")

    @property
    def is_nonelliptic(self) -> bool:
        return 1 <= self.k <= self.d - 1

    @property
    def signs(self) -> np.ndarray:
        s = np.ones(self.d)
        s[: self.k] = -1.0
        return s

    # coordinate-block slices in the (xi_1, xi', xi'', xi_d) split
    @property
    def prime_slice(self) -> slice:
        return slice(1, self.k)

    @property
    def dprime_slice(self) -> slice:
        return slice(self.k, self.d - 1)


def eval_q(form: QuadraticForm, xi) -> np.ndarray:
    """Q(xi); accepts a single vector or an array with last axis of length d."""
    xi = np.asarray(xi, dtype=float)
    if xi.shape[-1] != form.d:
        raise ValueError(f"expected last axis of length {form.d}, got {xi.shape[-1]}")
    val = np.einsum("...i,i->...", xi * xi, form.signs)
    if xi.ndim == 1:
        return float(val)
    return val


def rotate_to_graph(form: QuadraticForm, xi) -> np.ndarray:
    """Rotate xi into the graph coordinates eta = (eta_1, eta', eta'', eta_d).

    Requires a non-elliptic form; in the new coordinates
    Q = 2 eta_1 eta_d - |eta'|^2 + |eta''|^2 (checked by tests pointwise).
    """
    if not form.is_nonelliptic:
        raise ValueError("graph rotation needs a non-elliptic form (k <= d-1)")
    xi = np.asarray(xi, dtype=float)
    eta = np.array(xi, dtype=float, copy=True)
    s = 1.0 / np.sqrt(2.0)
    eta[..., 0] = (xi[..., -1] + xi[..., 0]) * s
    eta[..., -1] = (xi[..., -1] - xi[..., 0]) * s
    return eta


def graph_to_xi(form: QuadraticForm, eta) -> np.ndarray:
    """Inverse of rotate_to_graph."""
    if not form.is_nonelliptic:
        raise ValueError("graph rotation needs a non-elliptic form (k <= d-1)")
    eta = np.asarray(eta, dtype=float)
    xi = np.array(eta, dtype=float, copy=True)
    s = 1.0 / np.sqrt(2.0)
    xi[..., 0] = (eta[..., 0] - eta[..., -1]) * s
    xi[..., -1] = (eta[..., 0] + eta[..., -1]) * s
    return xi


def q_graph_coords(form: QuadraticForm, eta) -> np.ndarray:
    """Q expressed in graph coordinates: 2 eta_1 eta_d - |eta'|^2 + |eta''|^2."""
    eta = np.asarray(eta, dtype=float)
    ep = eta[..., form.prime_slice]
    epp = eta[..., form.dprime_slice]
    val = (2.0 * eta[..., 0] * eta[..., -1]
           - np.sum(ep * ep, axis=-1) + np.sum(epp * epp, axis=-1))
    if eta.ndim == 1:
        return float(val)
    return val


def height_from_blocks(rho: float, eta1, prime_sq, dprime_sq):
    """Graph height from eta_1 and the squared block norms (broadcasting)."""
    return (prime_sq - dprime_sq + rho) / (2.0 * eta1)


@dataclass(frozen=True)
class GraphChart:
    """One graph patch of {Q = rho} over D, with its smooth cutoff.

    The cutoff is a tensor plateau bump supported strictly inside D; the
    plateau fraction is configurable (0.9 reproduces the canonical choice).
    """

    form: QuadraticForm
    rho: float
    plateau: float = 0.9
    cutoff: Optional[Callable] = field(default=None, repr=False)

    def __post_init__(self):
        if self.rho == 0.0:
            raise ValueError("chart level rho must be nonzero")
        if not self.form.is_nonelliptic:
            raise ValueError("charts require a non-elliptic form")

    @property
    def dim_tilde(self) -> int:
        return self.form.d - 1

    def split_tilde(self, eta_tilde):
        """(eta_1, eta' block, eta'' block) from points in R^{d-1}."""
        eta_tilde = np.asarray(eta_tilde, dtype=float)
        e1 = eta_tilde[..., 0]
        ep = eta_tilde[..., 1 : self.form.k]
        epp = eta_tilde[..., self.form.k : self.form.d - 1]
        return e1, ep, epp

    def height(self, eta_tilde) -> np.ndarray:
        e1, ep, epp = self.split_tilde(eta_tilde)
        if np.any(e1 < 1.0 - _ETA1_TOL) or np.any(e1 > 2.0 + _ETA1_TOL):
            raise ValueError("eta_1 outside [1, 2] beyond tolerance")
        val = height_from_blocks(self.rho, e1, np.sum(ep * ep, axis=-1),
                                 np.sum(epp * epp, axis=-1))
        if np.asarray(eta_tilde).ndim == 1:
            return float(val)
        return val

    def cutoff_tilde(self, eta_tilde) -> np.ndarray:
        """Smooth cutoff value at points of R^{d-1}."""
        if self.cutoff is not None:
            return self.cutoff(eta_tilde)
        e1, ep, epp = self.split_tilde(eta_tilde)
        margin1 = 0.5 * (1.0 - self.plateau)
        margin2 = 1.0 - self.plateau
        out = plateau_bump(e1, 1.0, 2.0, margin1)
        for block in (ep, epp):
            for i in range(block.shape[-1]):
                out = out * plateau_bump(block[..., i], -1.0, 1.0, margin2)
        return out

    def cutoff_blocks(self, e1, ep_list, epp_list) -> np.ndarray:
        """Cutoff from broadcastable per-coordinate arrays (grid evaluation)."""
        out = self.cutoff_eta1(e1)
        for comp in list(ep_list) + list(epp_list):
            out = out * self.cutoff_trans(comp)
        return out

    def cutoff_eta1(self, e1) -> np.ndarray:
        """First tensor factor of the canonical cutoff."""
        margin1 = 0.5 * (1.0 - self.plateau)
        return plateau_bump(e1, 1.0, 2.0, margin1)

    def cutoff_trans(self, s) -> np.ndarray:
        """Transverse tensor factor of the canonical cutoff."""
        margin2 = 1.0 - self.plateau
        return plateau_bump(s, -1.0, 1.0, margin2)


def canonical_chart(form: QuadraticForm, rho: float, plateau: float = 0.9) -> GraphChart:
    return GraphChart(form=form, rho=rho, plateau=plateau)


def graph_height(chart: GraphChart, eta_tilde):
    """Height of the level set over a point of D (see GraphChart.height)."""
    return chart.height(eta_tilde)


def block_rotation(form: QuadraticForm, neg: Optional[np.ndarray] = None,
                   pos: Optional[np.ndarray] = None) -> np.ndarray:
    """Block-orthogonal map preserving Q: orthogonal on the first k and the
    last d-k coordinates separately."""
    k, d = form.k, form.d
    R = np.eye(d)
    if neg is not None:
        neg = np.asarray(neg, dtype=float)
        if neg.shape != (k, k):
            raise ValueError("negative block must be k x k")
        R[:k, :k] = neg
    if pos is not None:
        pos = np.asarray(pos, dtype=float)
        if pos.shape != (d - k, d - k):
            raise ValueError("positive block must be (d-k) x (d-k)")
        R[k:, k:] = pos
    return R
