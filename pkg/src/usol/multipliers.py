"""Fourier multipliers attached to a quadratic symbol.

Covers the resolvent 1/(Q + a + ib), its real/imaginary split, the dyadic
A/B/C decomposition of the real part, the principal-value multiplier realized
through the pv profile (never by epsilon-fudged division), and the localized
slab multiplier

    symbol(eta) = cutoff(eta~) psi(m(eta~) (eta_d - height(eta~)) / lambda)

together with its kernel.  Grids for the localized operator are read as
lattices in the graph coordinates (eta_1, eta', eta'', eta_d).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .dyadic import PsiFunction
from .field import FREQUENCY, Grid, SampledField, field_from_values, fourier, inv_fourier
from .oscprofile import QuadratureError, separable_oscillatory_integral
from .quadform import GraphChart, QuadraticForm, height_from_blocks

__all__ = [
    "SpectralParameter",
    "LocalizedMultiplier",
    "QuadratureError",
    "q_symbol",
    "resolvent_symbol",
    "resolvent_apply",
    "forward_apply",
    "split_real_imag",
    "ABCDecomposition",
    "decompose_ABC",
    "default_level_window",
    "pv_apply",
    "t_symbol",
    "t_rho_lambda_apply",
    "kernel_K",
    "kernel_peak",
    "kernel_ray_peak",
]


@dataclass(frozen=True)
class SpectralParameter:
    """z = a + ib with its derived quantities."""

    a: float
    b: float

    @property
    def z(self) -> complex:
        return complex(self.a, self.b)

    @property
    def modulus(self) -> float:
        return math.hypot(self.a, self.b)

    @property
    def level_l0(self) -> int:
        """Unique integer with 2^(l0-1) < |b| <= 2^l0."""
        if self.b == 0.0:
            raise ValueError("l0 is defined only for b != 0")
        return int(math.ceil(math.log2(abs(self.b))))

    def require_unit(self, tol: float = 1e-12) -> None:
        if abs(self.a * self.a + self.b * self.b - 1.0) > tol:
            raise ValueError("this experiment requires a^2 + b^2 = 1")


def q_symbol(form: QuadraticForm, grid: Grid) -> np.ndarray:
    """Q evaluated on the grid's frequency lattice."""
    if grid.d != form.d:
        raise ValueError("grid dimension does not match the form")
    mesh = grid.freq_mesh()
    out = np.zeros(grid.shape)
    for a, (sign, xi) in enumerate(zip(form.signs, mesh)):
        out = out + sign * xi * xi
    return out


def resolvent_symbol(form: QuadraticForm, grid: Grid, z: SpectralParameter) -> np.ndarray:
    if z.b == 0.0:
        raise ValueError("resolvent path requires b != 0; route b = 0 through pv_apply")
    return 1.0 / (q_symbol(form, grid) + z.z)


def resolvent_apply(f: SampledField, form: QuadraticForm, z: SpectralParameter) -> SampledField:
    """Solve (Q(D) + z) u = f by frequency-side division."""
    sym = resolvent_symbol(form, f.grid, z)
    fh = fourier(f)
    return inv_fourier(field_from_values(f.grid, sym * fh.values, FREQUENCY))


def forward_apply(f: SampledField, form: QuadraticForm, z: complex) -> SampledField:
    """Apply Q(D) + z (frequency-side multiplication by Q + z)."""
    sym = q_symbol(form, f.grid) + z
    fh = fourier(f)
    return inv_fourier(field_from_values(f.grid, sym * fh.values, FREQUENCY))


def split_real_imag(form: QuadraticForm, z: SpectralParameter):
    """Real part and imaginary coefficient of the resolvent symbol.

    Returns two real-valued evaluators of t = Q; their recombination
    re(t) + i*im(t) equals 1/(t + a + ib) pointwise.
    """
    if z.b == 0.0:
        raise ValueError("split requires b != 0")
    a, b = z.a, z.b

    def real_part(tq):
        s = np.asarray(tq, dtype=float) + a
        return s / (s * s + b * b)

    def imag_coef(tq):
        s = np.asarray(tq, dtype=float) + a
        return -b / (s * s + b * b)

    return real_part, imag_coef


def default_level_window(psi_pv: PsiFunction, t_abs_min: float, t_abs_max: float) -> Tuple[int, int]:
    """Dyadic window [l_min, l_max] so the partition sum over levels deviates
    from 1 by at most the profile's window tolerance on |t| in the given range.

    Margins come from the measured envelopes of the cached profiles: below
    the window every shifted bump sits beyond arg_hi where it is negligible;
    above it the telescoped primitive is within tol of 1.
    """
    if psi_pv.kind != "pv":
        raise ValueError("window selection needs the pv profile")
    if not (t_abs_min > 0.0 and t_abs_max >= t_abs_min):
        raise ValueError("need 0 < t_min <= t_max")
    l_min = int(math.floor(math.log2(t_abs_min / psi_pv.arg_hi)))
    l_max = int(math.ceil(math.log2(t_abs_max / psi_pv.arg_lo)))
    return l_min, l_max


@dataclass(frozen=True)
class ABCDecomposition:
    """Dyadic pieces of the real-part multiplier at parameter z.

    a_levels: l < l0, symbol  (t+a)/((t+a)^2+b^2) varphi(2^-l (t+a))
    b_levels: l >= l0, symbol -b^2/((t+a)^2+b^2) 2^-l psi(2^-l (t+a))
    c_levels: l >= l0, symbol  2^-l psi(2^-l (t+a))
    """

    z: SpectralParameter
    psi: PsiFunction
    l0: int
    window: Tuple[int, int]

    def a_piece(self, l: int, tq) -> np.ndarray:
        s = np.asarray(tq, dtype=float) + self.z.a
        b = self.z.b
        return s / (s * s + b * b) * self.psi.varphi(s / 2.0**l)

    def b_piece(self, l: int, tq) -> np.ndarray:
        s = np.asarray(tq, dtype=float) + self.z.a
        b = self.z.b
        return -(b * b) / (s * s + b * b) * 2.0 ** (-l) * self.psi(s / 2.0**l)

    def c_piece(self, l: int, tq) -> np.ndarray:
        s = np.asarray(tq, dtype=float) + self.z.a
        return 2.0 ** (-l) * self.psi(s / 2.0**l)

    @property
    def a_levels(self) -> range:
        return range(self.window[0], self.l0)

    @property
    def bc_levels(self) -> range:
        return range(self.l0, self.window[1] + 1)

    def sum_all(self, tq) -> np.ndarray:
        out = np.zeros_like(np.asarray(tq, dtype=float))
        for l in self.a_levels:
            out += self.a_piece(l, tq)
        for l in self.bc_levels:
            out += self.b_piece(l, tq) + self.c_piece(l, tq)
        return out

    def residual(self, tq) -> np.ndarray:
        """Pointwise gap between the windowed sum and the real multiplier."""
        s = np.asarray(tq, dtype=float) + self.z.a
        b = self.z.b
        true = s / (s * s + b * b)
        return self.sum_all(tq) - true


def decompose_ABC(form: QuadraticForm, z: SpectralParameter, psi_pv: PsiFunction,
                  window: Optional[Tuple[int, int]] = None,
                  t_values: Optional[np.ndarray] = None,
                  residual_tol: float = 1e-8) -> ABCDecomposition:
    """Build the dyadic A/B/C decomposition; the window must cover the dyadic
    scales present in t = Q + a (supplied either explicitly or via t_values).
    When t_values are given the windowed completeness residual is validated
    against residual_tol and a too-small window is rejected."""
    if z.b == 0.0:
        raise ValueError("the decomposition requires b != 0")
    if psi_pv.kind != "pv":
        raise ValueError("decompose_ABC needs the pv profile")
    if window is None:
        if t_values is None:
            raise ValueError("give either a window or the grid t-values")
        s = np.abs(np.asarray(t_values, dtype=float) + z.a)
        nz = s[s > 0.0]
        if nz.size == 0:
            raise ValueError("all grid values sit exactly on the singularity")
        window = default_level_window(psi_pv, float(nz.min()), float(nz.max()))
    l_min, l_max = window
    if l_min > l_max:
        raise ValueError("empty level window")
    dec = ABCDecomposition(z=z, psi=psi_pv, l0=z.level_l0, window=(l_min, l_max))
    if t_values is not None:
        probe = np.asarray(t_values, dtype=float).ravel()
        probe = probe[: min(probe.size, 2048)]
        res = float(np.abs(dec.residual(probe)).max())
        if res > residual_tol:
            raise QuadratureError(
                f"level window {window} leaves completeness residual "
                f"{res:.2e} > {residual_tol:.0e}")
    return dec


def pv_apply(f: SampledField, form: QuadraticForm, a: float, psi_pv: PsiFunction,
             window: Optional[Tuple[int, int]] = None,
             residual_tol: float = 1e-8) -> SampledField:
    """Principal-value multiplier p.v. 1/(Q + a), realized as the sum of the
    dyadic pieces 2^-l psi(2^-l (Q + a)).  Grid points with tiny |Q + a|
    contribute through psi's bounded values; no division is performed."""
    if psi_pv.kind != "pv":
        raise ValueError("pv_apply needs the pv profile")
    tq = q_symbol(form, f.grid) + a
    s = np.abs(tq)
    nz = s[s > 0.0]
    if nz.size == 0:
        raise ValueError("all grid values sit exactly on the singularity")
    if window is None:
        window = default_level_window(psi_pv, float(nz.min()), float(nz.max()))
    l_min, l_max = window
    sym = np.zeros_like(tq)
    for l in range(l_min, l_max + 1):
        sym += 2.0 ** (-l) * psi_pv(tq / 2.0**l)
    # windowed partition completeness on the covered range
    probe = nz[:: max(1, nz.size // 4096)]
    partition = np.zeros_like(probe)
    for l in range(l_min, l_max + 1):
        partition += psi_pv.varphi(probe / 2.0**l)
    res = float(np.abs(partition - 1.0).max())
    if res > residual_tol:
        raise QuadratureError(
            f"level window {window} leaves partition residual {res:.2e} > {residual_tol:.0e}")
    fh = fourier(f)
    return inv_fourier(field_from_values(f.grid, sym * fh.values, FREQUENCY))


# ---------------------------------------------------------------------------
# localized slab multiplier


@dataclass(frozen=True)
class LocalizedMultiplier:
    """Slab multiplier of width lambda around the graph of {Q = rho}.

    m_choice 'constant-one' uses m = 1.  'two-eta1' realizes the weight
    2*eta_1: since 2*eta_1 ranges in [2, 4] on the chart while the admissible
    weight range is [1/2, 2], it is implemented as m = eta_1 with lambda
    halved, which multiplies out to the identical symbol.
    """

    lam: float
    rho: float
    psi: PsiFunction
    chart: GraphChart
    m_choice: str = "constant-one"

    def __post_init__(self):
        if self.lam <= 0.0:
            raise ValueError("lambda must be positive")
        if self.rho == 0.0:
            raise ValueError("rho must be nonzero")
        if self.m_choice not in ("constant-one", "two-eta1"):
            raise ValueError(f"unknown m_choice {self.m_choice!r}")

    @property
    def lam_eff(self) -> float:
        return self.lam / 2.0 if self.m_choice == "two-eta1" else self.lam

    def m_of_eta1(self, eta1):
        if self.m_choice == "two-eta1":
            return np.asarray(eta1, dtype=float)
        return np.ones_like(np.asarray(eta1, dtype=float))

    @property
    def m_range(self) -> Tuple[float, float]:
        return (1.0, 2.0) if self.m_choice == "two-eta1" else (1.0, 1.0)

    def slab_support(self) -> Tuple[float, float]:
        """Exact |x_d| support of the kernel, from supp(hat psi) = +-[1/2, 2]."""
        m_lo, m_hi = self.m_range
        return 0.5 * m_lo / self.lam_eff, 2.0 * m_hi / self.lam_eff


def t_symbol(lm: LocalizedMultiplier, grid: Grid) -> np.ndarray:
    """Slab symbol over the grid read as a lattice in graph coordinates."""
    form = lm.chart.form
    if grid.d != form.d:
        raise ValueError("grid dimension does not match the chart's form")
    mesh = grid.freq_mesh()
    e1 = mesh[0]
    ep = mesh[1 : form.k]
    epp = mesh[form.k : form.d - 1]
    ed = mesh[form.d - 1]
    prime_sq = sum(c * c for c in ep) if ep else 0.0
    dprime_sq = sum(c * c for c in epp) if epp else 0.0
    height = height_from_blocks(lm.rho, np.maximum(e1, 1e-300), prime_sq, dprime_sq)
    shape = np.broadcast_shapes(*(m.shape for m in mesh))
    cut = np.broadcast_to(lm.chart.cutoff_blocks(e1, ep, epp), shape)
    arg = np.broadcast_to(lm.m_of_eta1(e1) * (ed - height) / lm.lam_eff, shape)
    out = np.zeros(shape)
    # the cutoff vanishes for eta_1 <= 1, where the height formula degenerates
    live = cut > 0.0
    out[live] = cut[live] * lm.psi(arg[live])
    return out


def t_rho_lambda_apply(f: SampledField, lm: LocalizedMultiplier) -> SampledField:
    sym = t_symbol(lm, f.grid)
    fh = fourier(f)
    return inv_fourier(field_from_values(f.grid, sym * fh.values, FREQUENCY))


def _kernel_prefactor(lm: LocalizedMultiplier, xd: float):
    def pref(e1):
        m = lm.m_of_eta1(e1)
        return (lm.lam_eff / m) * lm.psi.psi_hat(-lm.lam_eff * xd / m)

    return pref


def kernel_K(lm: LocalizedMultiplier, x: Sequence[float], rtol: float = 1e-6,
             n_cap: int = 4096) -> complex:
    """Kernel of the slab multiplier at the point x, via the reduced form

        lam int (1/m) hat-psi(-lam x_d / m) e^{2 pi i (x~.eta~ + x_d h(eta~))}
            cutoff(eta~) d eta~

    evaluated by adaptive separable Gauss-Legendre over the chart block.
    Exactly zero outside the slab given by slab_support().
    """
    form = lm.chart.form
    x = np.asarray(x, dtype=float)
    if x.shape != (form.d,):
        raise ValueError(f"point must have length {form.d}")
    xd = float(x[-1])
    lo, hi = lm.slab_support()
    if not (lo <= abs(xd) <= hi):
        return 0.0 + 0.0j
    return separable_oscillatory_integral(
        form=form, rho=lm.chart.rho, x=x, chart=lm.chart,
        eta1_factor=_kernel_prefactor(lm, xd), rtol=rtol, n_cap=n_cap,
        atol=1e-16)


def kernel_peak(lm: LocalizedMultiplier, xd_values: Sequence[float],
                x1_step: float = 0.25) -> np.ndarray:
    """max over the transverse ray scan of |K(x1, 0, .., xd)| for each xd.

    The maximum over x~ of the kernel magnitude sits near the ray
    x1 ~ x_d rho / (2 eta_1^2) (other coordinates at 0); the profile over
    eta_1 is computed once per xd and scanned over a fine x1 grid.
    """
    from .oscprofile import axis_profile_max

    out = np.empty(len(xd_values))
    lo, hi = lm.slab_support()
    for i, xd in enumerate(xd_values):
        xd = float(xd)
        if not (lo <= abs(xd) <= hi):
            out[i] = 0.0
            continue
        out[i], _ = axis_profile_max(
            form=lm.chart.form, rho=lm.chart.rho, chart=lm.chart, xd=xd,
            eta1_factor=_kernel_prefactor(lm, xd), x1_step=x1_step)
    return out


def kernel_ray_peak(lm: LocalizedMultiplier, n_xd: int = 25, eta0: float = 1.5,
                    rtol: float = 1e-6) -> float:
    """sup over the slab of |K| sampled on the stationary ray.

    Evaluates the kernel at x = (x_d rho / (2 eta0^2), 0, ..., x_d) for x_d
    log-spaced across the exact support slab and returns the largest value;
    this is where the kernel's size envelope is attained asymptotically.
    """
    from .oscprofile import ray_point, separable_oscillatory_integral

    form = lm.chart.form
    lo, hi = lm.slab_support()
    best = 0.0
    for xd in np.geomspace(lo * 1.001, hi * 0.999, n_xd):
        val = separable_oscillatory_integral(
            form, lm.chart.rho, ray_point(form, lm.chart.rho, float(xd), eta0),
            lm.chart, eta1_factor=_kernel_prefactor(lm, float(xd)), rtol=rtol,
            atol=1e-16)
        best = max(best, abs(val))
    return best
