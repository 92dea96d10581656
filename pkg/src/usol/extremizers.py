"""Lower-bound families with known scaling laws.

Four constructions drive the necessity experiments:

  glambda     frequency box stretched to eta_1 ~ lambda^-2 along a null
              direction of the graph; its extension is essentially constant
              on a dual box, giving the quotient exponent 2 - d(1/p - 1/q).
  knapp       curvature-adapted cap of size lambda x .. x lambda^2 at the
              positive pole of {Q = 1}; quotient exponent (d+1)(1/p-1/q) - 2.
  stationary  fixed cap at the pole; the extension decays like
              |x_d|^-(d-1)/2 inside a spatial cone.
  cone        kernel of the extension at the null cone {Q = 0}; decays like
              |x_d|^-(d-2)/2 on a paraboloidal slab, with the critical
              L^q mass diverging logarithmically at q = 2(d-1)/(d-2).

Sampled fields are stored in a modulated frame (the frequency center is
subtracted so the box fits a small symmetric lattice); Lebesgue norms are
modulation-invariant, and each family records its center.  Partial L^q
masses are fitted on dyadic shells (the shell exponent reaches its
asymptote at desk scale; cumulative masses do not when they diverge
logarithmically).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from .bumps import BumpKit
from .chebprofile import PiecewiseChebyshev, build_profile
from .field import FREQUENCY, Grid, SampledField, field_from_values, inv_fourier, lp_norm
from .quadform import QuadraticForm
from .quadrules import gauss_legendre, gauss_legendre_panels, tensor_rule

__all__ = [
    "GLambdaFamily",
    "KnappFamily",
    "StationaryFamily",
    "ConeFamily",
    "make_glambda",
    "make_knapp",
    "make_stationary",
    "make_cone_K",
]

TWO_PI = 2.0 * np.pi


def _tensor_field(grid: Grid, profiles) -> SampledField:
    """Frequency-space product field on the lattice (centered frame)."""
    vals = np.ones(grid.shape, dtype=complex)
    for a, prof in enumerate(profiles):
        axis = prof(grid.freq_axis(a))
        shape = [1] * grid.d
        shape[a] = grid.ns[a]
        vals = vals * axis.reshape(shape)
    return field_from_values(grid, vals, FREQUENCY)


def _box_rule(box, order: int):
    nodes, w = tensor_rule(box, order)
    return nodes, w


def _grid_axis(half_width: float, n: int = 64):
    """(n, L) so the frequency lattice resolves and contains [-hw, hw].

    The sample count across the support scales with n, so doubling n halves
    the frequency spacing at a fixed relative Nyquist margin.
    """
    samples_across = (3 * n) // 8
    spacing = 2.0 * half_width / samples_across
    return n, 1.0 / spacing


@dataclass(frozen=True)
class _CapProfiles:
    """Quarter-bump helpers shared by the families."""

    kit: BumpKit
    phys: PiecewiseChebyshev  # inverse transform of the quarter bump

    def bump(self, u):
        return self.kit.quarter(u)


def _cap_profiles(kit: BumpKit) -> _CapProfiles:
    xq, wq = gauss_legendre(0.0, 0.25, 96)
    bw = kit.quarter(xq) * wq

    def direct(x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return 2.0 * (np.cos(TWO_PI * np.outer(x, xq)) @ bw)

    phys = build_profile(direct, 192.0, parity=+1)
    return _CapProfiles(kit=kit, phys=phys)


# ---------------------------------------------------------------------------
# the long-rectangle family


@dataclass(frozen=True)
class GLambdaFamily:
    form: QuadraticForm
    lam: float
    rho: float
    field: SampledField
    center: np.ndarray  # frequency modulation applied to the stored field
    box_R: Tuple[Tuple[float, float], ...]  # true frequency-support box
    box_R_prime: Tuple[Tuple[float, float], ...]
    caps: _CapProfiles = field(repr=False, default=None)

    @property
    def box_R_volume(self) -> float:
        return float(np.prod([hi - lo for lo, hi in self.box_R]))

    def field_norm(self, p) -> float:
        return lp_norm(inv_fourier(self.field), p)

    def _surface_density(self, nodes):
        """ghat restricted to eta_d = height(eta~), times 1/(2 eta_1)."""
        d, k = self.form.d, self.form.k
        lam = self.lam
        e1 = nodes[:, 0]
        ep = nodes[:, 1:k]
        epp = nodes[:, k : d - 1]
        height = (np.sum(ep * ep, axis=1) - np.sum(epp * epp, axis=1)
                  + self.rho) / (2.0 * e1)
        B = self.caps.bump
        dens = B(lam * lam * (e1 - lam**-2)) * B(height)
        for j in range(1, d - 1):
            dens = dens * B(lam * nodes[:, j])
        return dens / (2.0 * e1), height

    def extension_values(self, points: np.ndarray, order: int = 28) -> np.ndarray:
        """E g at physical points, by quadrature over the support box."""
        lam = self.lam
        d = self.form.d
        box = [(lam**-2 - 0.25 * lam**-2, lam**-2 + 0.25 * lam**-2)]
        box += [(-0.25 / lam, 0.25 / lam)] * (d - 2)
        nodes, w = _box_rule(box, order)
        dens, height = self._surface_density(nodes)
        coef = w * dens
        pts = np.asarray(points, dtype=float)
        full = np.concatenate([nodes, height[:, None]], axis=1)
        out = np.zeros(pts.shape[0], dtype=complex)
        for lo in range(0, pts.shape[0], 1024):
            sl = slice(lo, lo + 1024)
            out[sl] = np.exp(2j * np.pi * (pts[sl] @ full.T)) @ coef
        return out

    def box_norm(self, q: float, order: int = 6) -> float:
        nodes, w = _box_rule(list(self.box_R_prime), order)
        vals = np.abs(self.extension_values(nodes))
        return float(np.sum(w * vals**q) ** (1.0 / q))

    def min_extension_over_box(self, order: int = 5) -> float:
        nodes, _ = _box_rule(list(self.box_R_prime), order)
        return float(np.abs(self.extension_values(nodes)).min())


def make_glambda(d: int, k: int, lam: float, kit: BumpKit,
                 rho: float = 1.0, grid_n: int = 64) -> GLambdaFamily:
    """Long-rectangle family at scale lambda (frequency box at eta_1 ~ 1/lambda^2)."""
    if not 0.0 < lam < 1.0:
        raise ValueError("lambda must lie in (0, 1)")
    if lam < 2.0**-10:
        raise ValueError("lambda below 2^-10 exceeds the desk-scale grid budget")
    form = QuadraticForm(d, k)
    if not form.is_nonelliptic:
        raise ValueError("the construction needs a non-elliptic form")
    caps = _cap_profiles(kit)
    hw = (lam**-2 / 4.0, ) + (1.0 / (4.0 * lam),) * (d - 2) + (0.25,)
    center = np.zeros(d)
    center[0] = lam**-2
    ns, Ls = [], []
    for h in hw:
        n, L = _grid_axis(h, n=grid_n)
        ns.append(n)
        Ls.append(L)
    grid = Grid(d, ns, Ls)
    B = kit.quarter
    profiles = [lambda u, c=lam**2: B(c * u)]
    profiles += [lambda u, c=lam: B(c * u) for _ in range(d - 2)]
    profiles += [lambda u: B(u)]
    fld = _tensor_field(grid, profiles)
    box_R = tuple((c - h, c + h) for c, h in zip(center, hw))
    rp = (lam**2 / (125.0 * d),) + (lam / (25.0 * d),) * (d - 2) + (1.0 / (20.0 * d),)
    box_Rp = tuple((-h, h) for h in rp)
    return GLambdaFamily(form=form, lam=lam, rho=rho, field=fld, center=center,
                         box_R=box_R, box_R_prime=box_Rp, caps=caps)


# ---------------------------------------------------------------------------
# curvature-adapted caps on {Q = 1}


def _cap_surface_radius(form: QuadraticForm, xi_tilde: np.ndarray) -> np.ndarray:
    """xi_d = r(xi~) on the positive sheet of {Q = 1} near the pole."""
    k = form.k
    neg = xi_tilde[:, :k]
    pos = xi_tilde[:, k:]
    return np.sqrt(1.0 + np.sum(neg * neg, axis=1) - np.sum(pos * pos, axis=1))


@dataclass(frozen=True)
class KnappFamily:
    form: QuadraticForm
    lam: float
    field: SampledField
    center: np.ndarray
    dual_box: Tuple[Tuple[float, float], ...]
    aperture: float
    caps: _CapProfiles = field(repr=False, default=None)

    def field_norm(self, p) -> float:
        return lp_norm(inv_fourier(self.field), p)

    def extension_values(self, points: np.ndarray, order: int = 24) -> np.ndarray:
        lam, d = self.lam, self.form.d
        box = [(-0.25 * lam, 0.25 * lam)] * (d - 1)
        nodes, w = _box_rule(box, order)
        r = _cap_surface_radius(self.form, nodes)
        B = self.caps.bump
        dens = B((r - 1.0) / lam**2)
        for j in range(d - 1):
            dens = dens * B(nodes[:, j] / lam)
        coef = w * dens / (2.0 * r)
        pts = np.asarray(points, dtype=float)
        full = np.concatenate([nodes, r[:, None]], axis=1)
        out = np.zeros(pts.shape[0], dtype=complex)
        for lo in range(0, pts.shape[0], 1024):
            sl = slice(lo, lo + 1024)
            out[sl] = np.exp(2j * np.pi * (pts[sl] @ full.T)) @ coef
        return out

    def box_norm(self, q: float, order: int = 6) -> float:
        nodes, w = _box_rule(list(self.dual_box), order)
        vals = np.abs(self.extension_values(nodes))
        return float(np.sum(w * vals**q) ** (1.0 / q))

    def min_extension_over_box(self, order: int = 5) -> float:
        nodes, _ = _box_rule(list(self.dual_box), order)
        return float(np.abs(self.extension_values(nodes)).min())


def make_knapp(d: int, k: int, lam: float, kit: BumpKit,
               aperture: float = 0.01, grid_n: int = 64) -> KnappFamily:
    """Cap family at scale lambda near the pole (0, ..., 0, 1) of {Q = 1}.

    The dual box uses the configurable small constant `aperture` (default
    1/100) for both the lambda^-1 and lambda^-2 half-widths.
    """
    if not 0.0 < lam < 1.0:
        raise ValueError("lambda must lie in (0, 1)")
    form = QuadraticForm(d, k)
    if not form.is_nonelliptic:
        raise ValueError("the construction needs a non-elliptic form")
    caps = _cap_profiles(kit)
    hw = (lam / 4.0,) * (d - 1) + (lam**2 / 4.0,)
    center = np.zeros(d)
    center[-1] = 1.0
    ns, Ls = [], []
    for h in hw:
        n, L = _grid_axis(h, n=grid_n)
        ns.append(n)
        Ls.append(L)
    grid = Grid(d, ns, Ls)
    B = kit.quarter
    profiles = [lambda u, c=1.0 / lam: B(c * u) for _ in range(d - 1)]
    profiles += [lambda u, c=lam**-2: B(c * u)]
    fld = _tensor_field(grid, profiles)
    dual = tuple((-aperture / lam, aperture / lam) for _ in range(d - 1))
    dual += ((-aperture / lam**2, aperture / lam**2),)
    return KnappFamily(form=form, lam=lam, field=fld, center=center,
                       dual_box=dual, aperture=aperture, caps=caps)


@dataclass(frozen=True)
class StationaryFamily:
    form: QuadraticForm
    cap_radius: float
    field: SampledField
    center: np.ndarray
    caps: _CapProfiles = field(repr=False, default=None)

    def extension_values(self, points: np.ndarray, order: int = 160) -> np.ndarray:
        d = self.form.d
        r0 = self.cap_radius
        box = [(-r0, r0)] * (d - 1)
        nodes, w = _box_rule(box, order)
        r = _cap_surface_radius(self.form, nodes)
        B = self.caps.bump
        dens = np.ones(nodes.shape[0])
        for j in range(d - 1):
            dens = dens * B(nodes[:, j] / (4.0 * r0))
        coef = w * dens / (2.0 * r)
        pts = np.asarray(points, dtype=float)
        full = np.concatenate([nodes, r[:, None]], axis=1)
        out = np.zeros(pts.shape[0], dtype=complex)
        for lo in range(0, pts.shape[0], 256):
            sl = slice(lo, lo + 256)
            out[sl] = np.exp(2j * np.pi * (pts[sl] @ full.T)) @ coef
        return out

    def axis_decay_samples(self, xd_values, order: int = 160) -> np.ndarray:
        pts = np.zeros((len(xd_values), self.form.d))
        pts[:, -1] = xd_values
        return np.abs(self.extension_values(pts, order=order))

    def shell_mass(self, q: float, t_lo: float, t_hi: float,
                   cone_aperture: float = 0.04, n_xd: int = 4,
                   n_radial: int = 6, n_angular: int = 8) -> float:
        """int over {t_lo <= x_d <= t_hi, |x~| <= aperture x_d} of |E f|^q."""
        d = self.form.d
        if d != 3:
            raise NotImplementedError("shell masses implemented for d = 3")
        xd, wd = gauss_legendre(t_lo, t_hi, n_xd)
        total = 0.0
        th = 2.0 * np.pi * (np.arange(n_angular) + 0.5) / n_angular
        for x, wx in zip(xd, wd):
            rr, wr = gauss_legendre(0.0, cone_aperture * x, n_radial)
            R, TH = np.meshgrid(rr, th, indexing="ij")
            pts = np.stack([R * np.cos(TH), R * np.sin(TH),
                            np.full_like(R, x)], axis=-1).reshape(-1, 3)
            vals = np.abs(self.extension_values(pts)) ** q
            w2 = (np.outer(wr * rr, np.full(n_angular, 2.0 * np.pi / n_angular))
                  ).ravel()
            total += wx * float(np.sum(w2 * vals))
        return total


def make_stationary(d: int, k: int, kit: BumpKit,
                    cap_radius: float = 0.125) -> StationaryFamily:
    """Fixed cap at the pole of {Q = 1}; drives the on-axis decay check."""
    form = QuadraticForm(d, k)
    if not form.is_nonelliptic:
        raise ValueError("the construction needs a non-elliptic form")
    caps = _cap_profiles(kit)
    hw = (cap_radius,) * (d - 1) + (cap_radius**2,)
    center = np.zeros(d)
    center[-1] = 1.0
    ns, Ls = [], []
    for h in hw:
        n, L = _grid_axis(h)
        ns.append(n)
        Ls.append(L)
    grid = Grid(d, ns, Ls)
    B = kit.quarter
    profiles = [lambda u, c=1.0 / (4.0 * cap_radius): B(c * u)
                for _ in range(d - 1)]
    profiles += [lambda u, c=1.0 / (4.0 * cap_radius**2): B(c * u)]
    fld = _tensor_field(grid, profiles)
    return StationaryFamily(form=form, cap_radius=cap_radius, field=fld,
                            center=center, caps=caps)


# ---------------------------------------------------------------------------
# the null-cone kernel


@dataclass(frozen=True)
class ConeFamily:
    """Kernel K of the extension at {Q = 0} with separated cap weights.

    The reduced representation (exact for x_d != 0)

      K(x) = phase * |x_d|^-(d-2)/2 * int w2hat(y) w3hat(z)
             e^{2 pi i s} w1hat(-s) dy dz,
      s = x_1 - (|x'+y|^2 - |x''+z|^2)/(2 x_d),

    converts the wildly oscillatory frequency integral into an absolutely
    convergent one over the decaying transforms, so x_d up to 1e6 costs the
    same as x_d ~ 1.  w1hat is nonnegative, <= 2, and >= 1 on [-1, 1];
    w2hat, w3hat are nonnegative (squares of bump transforms).
    """

    form: QuadraticForm
    M: float
    bump_width: float
    mass_B: float  # iint w2hat w3hat
    tail_lambda: float  # radius holding >= 99% of the (y, z) mass
    kit: BumpKit = field(repr=False, default=None)

    def _w1hat(self, t):
        """2 (beta_hat(t)/beta_hat(0))^2 for the narrow bump beta."""
        w = self.bump_width
        xq, wq = gauss_legendre(0.0, w, 48)
        bw = self.kit.quarter(xq / (4.0 * w)) * wq
        t = np.asarray(t, dtype=float)
        vals = 2.0 * (np.cos(TWO_PI * np.outer(np.atleast_1d(t), xq)) @ bw)
        v0 = 2.0 * float(np.sum(bw))
        return 2.0 * (vals / v0) ** 2

    def _gamma_hat(self, y):
        """Transform of the radial bump supported in [-M/4, M/4]."""
        xq, wq = gauss_legendre(0.0, self.M / 4.0, 96)
        gw = self.kit.quarter(xq / self.M) * wq
        y = np.atleast_1d(np.asarray(y, dtype=float))
        return 2.0 * (np.cos(TWO_PI * np.outer(y, xq)) @ gw)

    def _block_dims(self):
        return self.form.k - 1, self.form.d - self.form.k - 1

    def kernel_values(self, points: np.ndarray, n_nodes: int = 384,
                      y_span: float = None) -> np.ndarray:
        dp, dq = self._block_dims()
        if dp > 1 or dq > 1:
            raise NotImplementedError("cone kernel blocks of dimension <= 1")
        if y_span is None:
            y_span = 4.0 * self.tail_lambda
        pts = np.asarray(points, dtype=float)
        d = self.form.d
        x1 = pts[:, 0]
        xd = pts[:, -1]
        if np.any(xd == 0.0):
            raise ValueError("the reduced kernel needs x_d != 0")
        xp = pts[:, 1 : 1 + dp]
        xq_ = pts[:, 1 + dp : 1 + dp + dq]

        def block_rule(dim):
            if dim == 0:
                return np.zeros((1, 0)), np.array([1.0])
            nodes, w = gauss_legendre_panels(-y_span, y_span,
                                             max(8, n_nodes // 16), 16)
            return nodes[:, None], w

        ynod, yw = block_rule(dp)
        znod, zw = block_rule(dq)
        wy = yw * (self._gamma_hat(ynod[:, 0]) ** 2 if dp else 1.0)
        wz = zw * (self._gamma_hat(znod[:, 0]) ** 2 if dq else 1.0)

        out = np.empty(pts.shape[0], dtype=complex)
        for i in range(pts.shape[0]):
            ysh = (xp[i] + ynod) if dp else ynod
            zsh = (xq_[i] + znod) if dq else znod
            ysq = np.sum(ysh * ysh, axis=1)
            zsq = np.sum(zsh * zsh, axis=1)
            s = x1[i] - (ysq[:, None] - zsq[None, :]) / (2.0 * xd[i])
            integ = np.exp(2j * np.pi * s) * self._w1hat(-s.ravel()).reshape(s.shape)
            val = np.einsum("y,z,yz->", wy, wz, integ)
            phase = np.exp(1j * np.pi * np.sign(xd[i]) * (2 * self.form.k - d) / 4.0)
            out[i] = phase * abs(xd[i]) ** (-(d - 2) / 2.0) * val
        return out

    def in_slab(self, points: np.ndarray) -> np.ndarray:
        """Membership in the paraboloidal slab where |K| >~ B |x_d|^-(d-2)/2."""
        pts = np.asarray(points, dtype=float)
        dp, dq = self._block_dims()
        x1 = pts[:, 0]
        xd = pts[:, -1]
        xp = pts[:, 1 : 1 + dp]
        xq_ = pts[:, 1 + dp : 1 + dp + dq]
        psq = np.sum(xp * xp, axis=1)
        qsq = np.sum(xq_ * xq_, axis=1)
        lam = self.tail_lambda
        ok = np.abs(x1 - (psq - qsq) / (2.0 * xd)) <= 0.5
        ok &= xd >= 1e3 * lam**2
        bound = 1e-3 * xd / lam**2
        ok &= np.sqrt(psq) <= bound
        ok &= np.sqrt(qsq) <= bound
        return ok

    def axis_decay_samples(self, xd_values) -> np.ndarray:
        pts = np.zeros((len(xd_values), self.form.d))
        pts[:, -1] = xd_values
        return np.abs(self.kernel_values(pts))

    def shell_mass(self, q: float, t_lo: float, t_hi: float, n_xd: int = 4,
                   n_u: int = 8, n_trans: int = 10) -> float:
        """int over the slab portion with t_lo <= x_d <= t_hi of |K|^q."""
        dp, dq = self._block_dims()
        if dp + dq != 1:
            raise NotImplementedError("shell masses for one transverse dim")
        lam = self.tail_lambda
        xd, wd = gauss_legendre(t_lo, t_hi, n_xd)
        us, wu = gauss_legendre(-0.5, 0.5, n_u)
        total = 0.0
        for x, wx in zip(xd, wd):
            bound = 1e-3 * x / lam**2
            ts, wt = gauss_legendre(-bound, bound, n_trans)
            sign = +1.0 if dp == 1 else -1.0
            U, T = np.meshgrid(us, ts, indexing="ij")
            X1 = U + sign * (T * T) / (2.0 * x)
            pts = np.empty((U.size, self.form.d))
            pts[:, 0] = X1.ravel()
            pts[:, 1] = T.ravel()
            pts[:, -1] = x
            vals = np.abs(self.kernel_values(pts)) ** q
            total += wx * float(np.sum(np.outer(wu, wt).ravel() * vals))
        return total


def make_cone_K(d: int, k: int, M: float, kit: BumpKit,
                bump_width: float = 5e-3) -> ConeFamily:
    """Null-cone kernel with transverse weights supported in radius M/2."""
    form = QuadraticForm(d, k)
    if not form.is_nonelliptic:
        raise ValueError("the construction needs a non-elliptic form")
    dp, dq = k - 1, d - k - 1
    if dp > 1 or dq > 1:
        raise NotImplementedError("cone kernel blocks of dimension <= 1")
    fam = ConeFamily(form=form, M=M, bump_width=bump_width, mass_B=0.0,
                     tail_lambda=0.0, kit=kit)
    # B = iint w2hat w3hat (Parseval, exact) and the 99%-mass radius per
    # active block; the scan stays within the resolvable frequency range
    mass = 1.0
    lam_tail = 0.5
    xq, wq = gauss_legendre(0.0, M / 4.0, 96)
    block_mass = 2.0 * float(np.sum(wq * kit.quarter(xq / M) ** 2))
    dy = 0.01 * (4.0 / M)
    ys = (np.arange(4000) + 0.5) * dy
    gh2 = fam._gamma_hat(ys) ** 2
    cum = np.cumsum(gh2) * dy * 2.0
    for dim in (dp, dq):
        if dim == 0:
            continue
        mass *= block_mass
        idx = int(np.searchsorted(cum, 0.99 * block_mass))
        lam_tail = max(lam_tail, float(ys[min(idx, len(ys) - 1)]))
    return ConeFamily(form=form, M=M, bump_width=bump_width, mass_B=mass,
                      tail_lambda=lam_tail, kit=kit)
