"""Exact-support smooth bump functions.

Everything here is built from the C-infinity switch exp(-1/t), so each bump
vanishes identically (exact floating-point zero) outside its stated support.
That makes support assertions exact rather than tolerance-based, and it makes
the dyadic partition identities hold to machine precision by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .quadrules import gauss_legendre_panels

__all__ = [
    "smooth_transition",
    "step_window",
    "plateau_bump",
    "BumpKit",
    "build_bump_kit",
]


def _exp_recip(t):
    # exp(-1/t) for t>0, exactly 0 otherwise; silences the harmless overflow
    # of 1/t near t=0+ by masking.
    out = np.zeros_like(t)
    m = t > 0.0
    tm = t[m]
    out[m] = np.exp(-1.0 / tm)
    return out


def smooth_transition(t):
    """C-infinity monotone switch: 0 for t <= 0, 1 for t >= 1."""
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    a = _exp_recip(t)
    b = _exp_recip(1.0 - t)
    out = a / (a + b)
    if scalar:
        return float(out[0])
    return out


def step_window(t):
    """Unit partition bump: supp = [-1, 1], sum_j step_window(t - j) = 1."""
    t = np.asarray(t, dtype=float)
    return smooth_transition(t + 1.0) - smooth_transition(t)


def plateau_bump(x, a, b, margin):
    """Smooth bump equal to 1 on [a+margin, b-margin] and 0 outside (a, b)."""
    x = np.asarray(x, dtype=float)
    return smooth_transition((x - a) / margin) * smooth_transition((b - x) / margin)


def _chi_unnormalized(s):
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    m = (s > 1.0) & (s < 2.0)
    sm = s[m]
    out[m] = np.exp(-1.0 / ((sm - 1.0) * (2.0 - sm)))
    return out


def _cheb_fit(f, a, b, deg):
    """Chebyshev coefficients of f on [a, b] from first-kind points."""
    k = np.arange(deg + 1)
    theta = np.pi * (k + 0.5) / (deg + 1)
    x = 0.5 * (b - a) * np.cos(theta) + 0.5 * (a + b)
    fv = f(x)
    basis = np.cos(np.outer(theta, k))
    c = (2.0 / (deg + 1)) * (basis.T @ fv)
    c[0] *= 0.5
    return c


@dataclass(frozen=True)
class BumpKit:
    """The fixed family of cutoffs used by the dyadic decompositions.

    phi        even bump, supp in +-[1/2, 2], sum_j phi(2^j x) = 1 for x != 0
    chi        bump on (1, 2) with integral exactly 1/2
    beta/beta0 inhomogeneous dyadic pair: beta0(t) + sum_{j>=1} beta(2^-j t) = 1
    quarter    even bump supported in [-1/4, 1/4] (frequency caps)
    """

    chi_norm: float
    _chi_cum_coeffs: np.ndarray = field(repr=False)

    def phi(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        ax = np.abs(x)
        m = (ax > 0.5) & (ax < 2.0)
        out[m] = step_window(np.log2(ax[m]))
        return out

    def chi(self, s):
        return self.chi_norm * _chi_unnormalized(s)

    def chi_cumulative(self, t):
        """X(t) = integral of chi over (-inf, t]; exactly 0/0.5 off [1, 2]."""
        t = np.asarray(t, dtype=float)
        out = np.where(t >= 2.0, 0.5, 0.0)
        m = (t > 1.0) & (t < 2.0)
        if np.any(m):
            xk = 2.0 * (t[m] - 1.0) - 1.0
            out = np.array(out, dtype=float)
            out[m] = np.polynomial.chebyshev.chebval(xk, self._chi_cum_coeffs)
        return out

    def beta(self, t):
        return self.phi(t)

    def beta0(self, t):
        """1 - sum_{j>=1} phi(2^-j t); supported in [-2, 2]."""
        t = np.asarray(t, dtype=float)
        acc = np.zeros_like(t)
        tmax = float(np.max(np.abs(t), initial=0.0))
        jmax = max(2, int(np.ceil(np.log2(max(tmax, 1.0)))) + 2)
        for j in range(1, jmax + 1):
            acc += self.phi(t / 2.0**j)
        return 1.0 - acc

    def quarter(self, x):
        """Even bump with exact support [-1/4, 1/4], max value 1 at 0."""
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        u = 4.0 * x
        m = np.abs(u) < 1.0
        um = u[m]
        out[m] = np.exp(1.0 - 1.0 / (1.0 - um * um))
        return out


def build_bump_kit(norm_quad_panels: int = 64, cum_degree: int = 160) -> BumpKit:
    """Construct the kit; chi's normalization and cumulative are quadrature-built."""
    xq, wq = gauss_legendre_panels(1.0, 2.0, norm_quad_panels, 32)
    raw = float(np.sum(wq * _chi_unnormalized(xq)))
    cnorm = 0.5 / raw

    def cum_direct(ts):
        out = np.empty_like(ts)
        for i, tv in enumerate(ts):
            if tv <= 1.0:
                out[i] = 0.0
            elif tv >= 2.0:
                out[i] = 0.5
            else:
                xs, ws = gauss_legendre_panels(1.0, tv, 48, 24)
                out[i] = cnorm * np.sum(ws * _chi_unnormalized(xs))
        return out

    coeffs = _cheb_fit(cum_direct, 1.0, 2.0, cum_degree)
    return BumpKit(chi_norm=cnorm, _chi_cum_coeffs=coeffs)
