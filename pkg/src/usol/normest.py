"""Lower bounds on Lp -> Lq operator norms, and spectral-parameter sweeps.

The core estimator is the duality-map power iteration

    u = T f_n,   g = |u|^{q-2} u / ||.||,   f_{n+1} = |T* g|^{p'-2} T* g / ||.||

whose Rayleigh quotients ||T f_n||_q / ||f_n||_p are nondecreasing (each step
chains two sharp Holder pairings), so every iterate certifies a lower bound
and the best quotient seen is returned.  Restricted-weak-type quotients
||T f||_{q,inf} / ||f||_{p,1} are maximized over simple functions built from
at most eight level sets of a warm start, by coordinate ascent on the level
coefficients; indicator-type inputs are exactly the inputs that matter for
that operator class.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .field import (FREQUENCY, PHYSICAL, Grid, SampledField, field_from_values,
                    fourier, inv_fourier, lorentz_p1, lorentz_qinf, lp_norm)
from .multipliers import SpectralParameter, q_symbol, resolvent_symbol
from .quadform import QuadraticForm

__all__ = [
    "NormProbe",
    "NormEstimate",
    "SweepEntry",
    "SweepReport",
    "MultiplierOperator",
    "RankOneOperator",
    "opnorm_lower",
    "restricted_weak_quotient",
    "uniform_sweep",
]

_CLIP = 1e-300


@dataclass(frozen=True)
class NormProbe:
    p: float
    q: float
    mode: str = "lebesgue"  # lebesgue | lorentz
    iterations: int = 8
    seed: int = 0
    warm_start: Optional[SampledField] = None

    def __post_init__(self):
        if self.mode not in ("lebesgue", "lorentz"):
            raise ValueError(f"unknown probe mode {self.mode!r}")
        if not (1.0 < self.p <= 2.0 and 2.0 <= self.q):
            raise ValueError("the estimator expects p in (1, 2] and q in [2, inf)")


@dataclass(frozen=True)
class NormEstimate:
    lower_bound: float
    quotients: Tuple[float, ...]

    def __float__(self):
        return self.lower_bound


class MultiplierOperator:
    """Fourier multiplier with a fixed symbol array on a grid."""

    def __init__(self, grid: Grid, symbol: np.ndarray):
        if tuple(symbol.shape) != grid.shape:
            raise ValueError("symbol shape does not match the grid")
        self.grid = grid
        self.symbol = np.ascontiguousarray(symbol)

    @classmethod
    def resolvent(cls, form: QuadraticForm, grid: Grid, z: SpectralParameter):
        return cls(grid, resolvent_symbol(form, grid, z))

    def apply(self, f: SampledField) -> SampledField:
        fh = fourier(f)
        return inv_fourier(field_from_values(self.grid, self.symbol * fh.values,
                                             FREQUENCY))

    def apply_adjoint(self, f: SampledField) -> SampledField:
        fh = fourier(f)
        return inv_fourier(field_from_values(self.grid,
                                             np.conj(self.symbol) * fh.values,
                                             FREQUENCY))

    def peak_mode_field(self) -> SampledField:
        """Physical field of the single lattice mode maximizing |symbol|.

        Its L2 -> L2 Rayleigh quotient equals max |symbol| exactly, which
        makes it the canonical warm start for p = q = 2 probes.
        """
        idx = np.unravel_index(int(np.argmax(np.abs(self.symbol))),
                               self.symbol.shape)
        vals = np.zeros(self.grid.shape, dtype=complex)
        vals[idx] = 1.0
        return inv_fourier(field_from_values(self.grid, vals, FREQUENCY))


class RankOneOperator:
    """T f = <f, u> v with the discrete pairing <f, u> = h^d sum f conj(u)."""

    def __init__(self, u: SampledField, v: SampledField):
        if u.grid.shape != v.grid.shape:
            raise ValueError("u and v must share a grid")
        self.u = u
        self.v = v
        self.grid = u.grid

    def _inner(self, a: SampledField, b: SampledField) -> complex:
        return complex(a.grid.cell_volume * np.sum(a.values * np.conj(b.values)))

    def apply(self, f: SampledField) -> SampledField:
        c = self._inner(f, self.u)
        return field_from_values(self.grid, c * self.v.values, PHYSICAL)

    def apply_adjoint(self, g: SampledField) -> SampledField:
        c = self._inner(g, self.v)
        return field_from_values(self.grid, c * self.u.values, PHYSICAL)


def _duality_map(values: np.ndarray, expo: float) -> np.ndarray:
    """|v|^(expo-2) v with underflow clipping (expo >= 1)."""
    mags = np.abs(values)
    out = np.zeros_like(values)
    live = mags > _CLIP
    out[live] = mags[live] ** (expo - 2.0) * values[live]
    return out


def _check_linear(op, grid: Grid, seed: int) -> None:
    rng = np.random.default_rng(seed ^ 0x5F3759DF)
    a = field_from_values(grid, rng.standard_normal(grid.shape)
                          + 1j * rng.standard_normal(grid.shape), PHYSICAL)
    b = field_from_values(grid, rng.standard_normal(grid.shape)
                          + 1j * rng.standard_normal(grid.shape), PHYSICAL)
    c1, c2 = 0.7 - 0.2j, -1.3 + 0.5j
    lhs = op.apply(field_from_values(grid, c1 * a.values + c2 * b.values, PHYSICAL))
    rhs = c1 * op.apply(a).values + c2 * op.apply(b).values
    scale = np.abs(rhs).max() + _CLIP
    if np.abs(lhs.values - rhs).max() > 1e-10 * scale:
        raise ValueError("operator failed the superposition test")


def opnorm_lower(op, probe: NormProbe, check_linear: bool = True) -> NormEstimate:
    """Best Rayleigh quotient of the duality-map power iteration.

    Quotients are asserted nondecreasing up to a 1e-9 relative slack; the
    returned bound is the best quotient seen (monotone in iteration count).
    """
    grid = op.grid
    if check_linear:
        _check_linear(op, grid, probe.seed)
    if probe.warm_start is not None:
        f = probe.warm_start
    elif probe.p == probe.q == 2.0 and isinstance(op, MultiplierOperator):
        f = op.peak_mode_field()
    else:
        rng = np.random.default_rng(probe.seed)
        f = field_from_values(grid, rng.standard_normal(grid.shape)
                              + 1j * rng.standard_normal(grid.shape), PHYSICAL)
    p_dual = probe.p / (probe.p - 1.0)
    quotients: List[float] = []
    best = 0.0
    for _ in range(probe.iterations):
        nf = lp_norm(f, probe.p)
        if nf <= _CLIP:
            raise ValueError("iterate collapsed to zero")
        f = field_from_values(grid, f.values / nf, PHYSICAL)
        u = op.apply(f)
        quot = lp_norm(u, probe.q)
        if quotients and quot < quotients[-1] * (1.0 - 1e-9):
            raise AssertionError(
                f"power-iteration quotient decreased: {quotients[-1]} -> {quot}")
        quotients.append(quot)
        best = max(best, quot)
        if quot <= _CLIP:
            break
        gv = _duality_map(u.values, probe.q)
        gv = gv / (np.abs(gv).max() + _CLIP)
        v = op.apply_adjoint(field_from_values(grid, gv, PHYSICAL))
        fv = _duality_map(v.values, p_dual)
        fv = fv / (np.abs(fv).max() + _CLIP)
        f = field_from_values(grid, fv, PHYSICAL)
    return NormEstimate(lower_bound=best, quotients=tuple(quotients))


def _level_fields(warm: SampledField, n_levels: int) -> List[np.ndarray]:
    """Indicator-times-phase pieces from quantile level sets of |warm|."""
    mags = np.abs(warm.values)
    phase = np.where(mags > _CLIP, warm.values / np.maximum(mags, _CLIP), 1.0)
    qs = np.quantile(mags[mags > 0], np.linspace(0.0, 1.0, n_levels + 1))
    pieces = []
    for i in range(n_levels):
        lo, hi = qs[i], qs[i + 1]
        mask = (mags > lo) & (mags <= hi) if i else (mags >= lo) & (mags <= hi)
        if mask.any():
            pieces.append(mask.astype(float) * phase)
    return pieces


def restricted_weak_quotient(op, p: float, q: float, warm: SampledField,
                             n_levels: int = 8, sweeps: int = 3,
                             candidates: int = 9) -> Tuple[float, np.ndarray]:
    """max over simple functions of ||T f||_{q,inf} / ||f||_{p,1}.

    f = sum_i c_i (phase * indicator of level set i); the images T(piece_i)
    are precomputed once, so each candidate evaluation is a linear
    combination plus two rearrangement norms.  Coordinate ascent over the
    nonnegative coefficients, deterministic for a fixed warm start.
    """
    grid = op.grid
    pieces = _level_fields(warm, n_levels)
    if not pieces:
        raise ValueError("warm start has no nonzero level sets")
    images = [op.apply(field_from_values(grid, pc, PHYSICAL)).values
              for pc in pieces]

    def quotient(coef: np.ndarray) -> float:
        fv = sum(c * pc for c, pc in zip(coef, pieces))
        uv = sum(c * im for c, im in zip(coef, images))
        f = field_from_values(grid, fv, PHYSICAL)
        u = field_from_values(grid, uv, PHYSICAL)
        den = lorentz_p1(f, p)
        if den <= _CLIP:
            return 0.0
        return lorentz_qinf(u, q) / den

    coef = np.ones(len(pieces))
    best = quotient(coef)
    for _ in range(sweeps):
        for i in range(len(pieces)):
            grid_c = np.geomspace(0.05, 20.0, candidates)
            for c in grid_c:
                trial = coef.copy()
                trial[i] = c
                val = quotient(trial)
                if val > best:
                    best, coef = val, trial
    return best, coef


@dataclass(frozen=True)
class SweepEntry:
    z: complex
    lower_bound: float


@dataclass(frozen=True)
class SweepReport:
    entries: Tuple[SweepEntry, ...]
    ratio_threshold: float

    @property
    def max_bound(self) -> float:
        return max(e.lower_bound for e in self.entries)

    @property
    def min_bound(self) -> float:
        return min(e.lower_bound for e in self.entries)

    @property
    def ratio(self) -> float:
        return self.max_bound / self.min_bound

    @property
    def passed(self) -> bool:
        return math.isfinite(self.ratio) and self.ratio < self.ratio_threshold


def _shell_warm_start(form: QuadraticForm, grid: Grid, z: SpectralParameter) -> SampledField:
    """Bump concentrated on the singular shell {|Q + a| <= |b|}."""
    tq = q_symbol(form, grid) + z.a
    width = max(abs(z.b), 1e-6)
    vals = np.exp(-(tq / width) ** 2).astype(complex)
    return inv_fourier(field_from_values(grid, vals, FREQUENCY))


def _kernel_warm_start(op) -> SampledField:
    """T applied to a one-cell indicator at the origin: the operator's own
    kernel, whose level sets are the natural restricted-type candidates."""
    grid = op.grid
    vals = np.zeros(grid.shape)
    vals[tuple(n // 2 for n in grid.ns)] = 1.0
    return op.apply(field_from_values(grid, vals, PHYSICAL))


def uniform_sweep(form: QuadraticForm, pair, z_list: Sequence[complex],
                  probe: NormProbe, grid: Grid,
                  ratio_threshold: float = 5.0,
                  require_unit: bool = True) -> SweepReport:
    """Resolvent-norm lower bounds across spectral parameters.

    pair is an exponent pair (1/p, 1/q); lebesgue mode runs the power
    iteration from the singular-shell warm start, lorentz mode the
    simple-function ascent.  The ratio threshold is an artifact acceptance
    knob (no quantitative constant is claimed by the theory), recorded in
    the report.
    """
    ip, iq = float(pair.ip), float(pair.iq)
    p, q = 1.0 / ip, 1.0 / iq
    entries = []
    for zc in z_list:
        z = SpectralParameter(a=float(np.real(zc)), b=float(np.imag(zc)))
        if require_unit:
            z.require_unit(tol=1e-9)
        elif z.modulus < 1.0 - 1e-9:
            raise ValueError("sweep parameters must satisfy |z| >= 1")
        if z.b == 0.0:
            raise ValueError("sweep parameters need b != 0; "
                             "the b = 0 multiplier runs through pv_apply")
        op = MultiplierOperator.resolvent(form, grid, z)
        if probe.mode == "lebesgue":
            warm = _shell_warm_start(form, grid, z)
            est = opnorm_lower(op, NormProbe(p=p, q=q, iterations=probe.iterations,
                                             seed=probe.seed, warm_start=warm),
                               check_linear=False)
            bound = est.lower_bound
        else:
            warm = _kernel_warm_start(op)
            bound, _ = restricted_weak_quotient(op, p, q, warm)
            # the one-cell indicator is itself admissible; keep the better bound
            cell = np.zeros(grid.shape)
            cell[tuple(n // 2 for n in grid.ns)] = 1.0
            delta = field_from_values(grid, cell, PHYSICAL)
            direct = lorentz_qinf(op.apply(delta), q) / lorentz_p1(delta, p)
            bound = max(bound, direct)
        entries.append(SweepEntry(z=z.z, lower_bound=bound))
    return SweepReport(entries=tuple(entries), ratio_threshold=ratio_threshold)
