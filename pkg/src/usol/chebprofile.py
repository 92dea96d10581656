"""Piecewise-Chebyshev caches for band-limited radial profiles.

The dyadic decompositions need Schwartz functions that are Fourier transforms
of compactly supported bumps, evaluated at millions of points.  Such functions
are entire of finite exponential type, so on intervals of fixed length a
moderate-degree Chebyshev expansion reproduces them to near machine precision.
We tabulate on [0, x_max], extend by the stated parity, and return exact zero
beyond x_max together with a measured tail bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["PiecewiseChebyshev", "build_profile"]


@dataclass(frozen=True)
class PiecewiseChebyshev:
    """Even or odd function cached on [0, x_max] in Chebyshev pieces."""

    x_max: float
    interval: float
    coeffs: np.ndarray  # (n_intervals, degree+1)
    parity: int  # +1 even, -1 odd
    tail_bound: float  # measured sup bound beyond x_max

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        ax = np.abs(x)
        out = np.zeros_like(ax)
        inside = ax < self.x_max
        if np.any(inside):
            xi = ax[inside]
            idx = np.minimum((xi / self.interval).astype(int), len(self.coeffs) - 1)
            lo = idx * self.interval
            t = 2.0 * (xi - lo) / self.interval - 1.0
            vals = np.empty_like(xi)
            for i in np.unique(idx):
                sel = idx == i
                vals[sel] = np.polynomial.chebyshev.chebval(t[sel], self.coeffs[i])
            out[inside] = vals
        if self.parity < 0:
            out = out * np.sign(x)
        if scalar:
            return float(out[0])
        return out

    def envelope_beyond(self, x0: float, probe=None) -> float:
        """Sup of |self| on [x0, x_max] plus the tail bound beyond x_max."""
        if x0 >= self.x_max:
            return self.tail_bound
        xs = np.linspace(x0, self.x_max, max(64, int((self.x_max - x0) * 16)))
        return float(max(np.abs(self(xs)).max(), self.tail_bound))


def build_profile(direct, x_max: float, parity: int, interval: float = 2.0,
                  degree: int = 48, tail_samples: int = 33) -> PiecewiseChebyshev:
    """Cache `direct` (vectorized, defined for x >= 0) on [0, x_max].

    `direct` must be the restriction of an entire function of moderate
    exponential type; the caller picks `interval`/`degree` accordingly.
    The tail bound is measured by sampling direct on [x_max, 2*x_max].
    """
    n_int = int(np.ceil(x_max / interval))
    deg = degree
    k = np.arange(deg + 1)
    theta = np.pi * (k + 0.5) / (deg + 1)
    ref = np.cos(theta)
    basis = np.cos(np.outer(theta, k))
    coeffs = np.empty((n_int, deg + 1))
    for i in range(n_int):
        lo = i * interval
        x = 0.5 * interval * (ref + 1.0) + lo
        fv = direct(x)
        c = (2.0 / (deg + 1)) * (basis.T @ fv)
        c[0] *= 0.5
        coeffs[i] = c
    ts = np.linspace(x_max, 2.0 * x_max, tail_samples)
    tail = float(np.abs(direct(ts)).max())
    return PiecewiseChebyshev(x_max=float(n_int * interval), interval=float(interval),
                              coeffs=coeffs, parity=parity, tail_bound=tail)
