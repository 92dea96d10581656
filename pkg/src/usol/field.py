"""Complex fields sampled on a torus, with transforms and norm estimators.

Conventions.  An axis with n samples and box length L carries the physical
lattice x = m*h, h = L/n, m = -n/2 .. n/2-1, and the frequency lattice
xi = m/L over the same index range.  The forward transform approximates
int exp(-2 pi i x.xi) f(x) dx, so a unit Gaussian maps to a unit Gaussian and
Parseval reads  h^d sum |f|^2 = L^-d sum |fhat|^2.

Axes may have distinct (n, L); several constructions need strongly
anisotropic boxes.  The flat binary format is defined for cubic grids only.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "Grid",
    "SampledField",
    "fourier",
    "inv_fourier",
    "lp_norm",
    "lorentz_p1",
    "lorentz_qinf",
    "save_field",
    "load_field",
    "field_from_values",
    "synthesize",
]

_MAGIC = b"USOL"
_VERSION = 1


def _as_tuple(v, d, cast):
    if np.isscalar(v):
        return tuple(cast(v) for _ in range(d))
    t = tuple(cast(x) for x in v)
    if len(t) != d:
        raise ValueError(f"expected {d} per-axis values, got {len(t)}")
    return t


@dataclass(frozen=True)
class Grid:
    """Uniform torus lattice; n per axis must be a power of two."""

    d: int
    ns: tuple
    Ls: tuple

    def __init__(self, d: int, n, L):
        ns = _as_tuple(n, d, int)
        Ls = _as_tuple(L, d, float)
        for nv in ns:
            if nv < 2 or nv & (nv - 1):
                raise ValueError(f"samples per axis must be a power of two, got {nv}")
        for Lv in Ls:
            if Lv <= 0:
                raise ValueError("box length must be positive")
        object.__setattr__(self, "d", int(d))
        object.__setattr__(self, "ns", ns)
        object.__setattr__(self, "Ls", Ls)

    @property
    def shape(self):
        return self.ns

    @property
    def is_cubic(self) -> bool:
        return len(set(self.ns)) == 1 and len(set(self.Ls)) == 1

    @property
    def n(self) -> int:
        if len(set(self.ns)) != 1:
            raise ValueError("grid is anisotropic; use .ns")
        return self.ns[0]

    @property
    def L(self) -> float:
        if len(set(self.Ls)) != 1:
            raise ValueError("grid is anisotropic; use .Ls")
        return self.Ls[0]

    @property
    def spacings(self):
        return tuple(L / n for n, L in zip(self.ns, self.Ls))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacings))

    def freq_axis(self, a: int) -> np.ndarray:
        n, L = self.ns[a], self.Ls[a]
        return (np.arange(n) - n // 2) / L

    def phys_axis(self, a: int) -> np.ndarray:
        n, L = self.ns[a], self.Ls[a]
        return (np.arange(n) - n // 2) * (L / n)

    def freq_mesh(self):
        """Per-axis frequency arrays shaped for broadcasting over the grid."""
        out = []
        for a in range(self.d):
            shape = [1] * self.d
            shape[a] = self.ns[a]
            out.append(self.freq_axis(a).reshape(shape))
        return out

    def phys_mesh(self):
        out = []
        for a in range(self.d):
            shape = [1] * self.d
            shape[a] = self.ns[a]
            out.append(self.phys_axis(a).reshape(shape))
        return out

    def nyquist(self):
        return tuple(n / (2.0 * L) for n, L in zip(self.ns, self.Ls))


PHYSICAL = "physical"
FREQUENCY = "frequency"


@dataclass(frozen=True)
class SampledField:
    grid: Grid
    values: np.ndarray
    space: str

    def __post_init__(self):
        if self.space not in (PHYSICAL, FREQUENCY):
            raise ValueError(f"space must be physical|frequency, got {self.space!r}")
        if tuple(self.values.shape) != self.grid.shape:
            raise ValueError("value array does not match grid shape")
        self.values.flags.writeable = False


def field_from_values(grid: Grid, values, space: str = PHYSICAL) -> SampledField:
    vals = np.ascontiguousarray(values, dtype=np.complex128)
    return SampledField(grid=grid, values=vals, space=space)


def synthesize(grid: Grid, fn: Callable, space: str = PHYSICAL) -> SampledField:
    """Sample a callable of the per-axis mesh arrays onto the grid."""
    mesh = grid.phys_mesh() if space == PHYSICAL else grid.freq_mesh()
    vals = np.asarray(fn(*mesh), dtype=np.complex128)
    vals = np.broadcast_to(vals, grid.shape).copy()
    return field_from_values(grid, vals, space)


def fourier(f: SampledField) -> SampledField:
    """Forward transform, physical -> frequency."""
    if f.space != PHYSICAL:
        raise ValueError("fourier expects a physical-space field")
    vals = np.fft.fftshift(np.fft.fftn(np.fft.ifftshift(f.values)))
    vals *= f.grid.cell_volume
    return field_from_values(f.grid, vals, FREQUENCY)


def inv_fourier(f: SampledField) -> SampledField:
    """Inverse transform, frequency -> physical."""
    if f.space != FREQUENCY:
        raise ValueError("inv_fourier expects a frequency-space field")
    vals = np.fft.fftshift(np.fft.ifftn(np.fft.ifftshift(f.values)))
    vals /= f.grid.cell_volume
    return field_from_values(f.grid, vals, PHYSICAL)


def lp_norm(f: SampledField, p) -> float:
    """(h^d sum |f|^p)^(1/p); p = inf gives the max."""
    if f.space != PHYSICAL:
        raise ValueError("norms are defined on physical-space fields")
    mags = np.abs(f.values)
    if p == np.inf or p == "inf":
        return float(mags.max())
    p = float(p)
    if p < 1.0:
        raise ValueError("p must be >= 1")
    return float((f.grid.cell_volume * np.sum(mags**p)) ** (1.0 / p))


def _sorted_mags(f: SampledField) -> np.ndarray:
    mags = np.sort(np.abs(f.values), axis=None)[::-1]
    # decreasing rearrangement; monotone by construction of the sort
    assert np.all(np.diff(mags) <= 0.0)
    return mags


def lorentz_p1(f: SampledField, p: float) -> float:
    """L^{p,1} norm: integral of mu(t)^{1/p} dt, mu = measure of {|f| > t}.

    The distribution function of a sampled field is a step function, so the
    integral is evaluated exactly from the sorted magnitudes.
    """
    if f.space != PHYSICAL:
        raise ValueError("norms are defined on physical-space fields")
    p = float(p)
    if not p > 1.0:
        raise ValueError("lorentz_p1 needs 1 < p < inf")
    mags = _sorted_mags(f)
    h = f.grid.cell_volume
    j = np.arange(1, mags.size + 1, dtype=float)
    steps = (j * h) ** (1.0 / p) - ((j - 1.0) * h) ** (1.0 / p)
    return float(np.sum(mags * steps))


def lorentz_qinf(f: SampledField, q: float) -> float:
    """Weak-L^q norm: sup_t t mu(t)^{1/q} over the sampled distribution."""
    if f.space != PHYSICAL:
        raise ValueError("norms are defined on physical-space fields")
    q = float(q)
    if not q > 1.0:
        raise ValueError("lorentz_qinf needs 1 < q < inf")
    mags = _sorted_mags(f)
    h = f.grid.cell_volume
    j = np.arange(1, mags.size + 1, dtype=float)
    return float(np.max(mags * (j * h) ** (1.0 / q)))


def save_field(f: SampledField, path) -> None:
    """Flat binary format (cubic grids): magic, version/d/n u32, L f64,
    space flag u8, then little-endian f64 re/im pairs in row-major order."""
    if not f.grid.is_cubic:
        raise ValueError("the flat format stores cubic grids only")
    header = _MAGIC + struct.pack("<III", _VERSION, f.grid.d, f.grid.n)
    header += struct.pack("<d", f.grid.L)
    header += struct.pack("<B", 0 if f.space == PHYSICAL else 1)
    flat = np.ascontiguousarray(f.values).ravel()
    body = np.empty(2 * flat.size, dtype="<f8")
    body[0::2] = flat.real
    body[1::2] = flat.imag
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(body.tobytes())


def load_field(path) -> SampledField:
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:4] != _MAGIC:
        raise ValueError("not a usol field file")
    version, d, n = struct.unpack("<III", blob[4:16])
    if version != _VERSION:
        raise ValueError(f"unsupported version {version}")
    (L,) = struct.unpack("<d", blob[16:24])
    (flag,) = struct.unpack("<B", blob[24:25])
    count = n**d
    body = np.frombuffer(blob[25:], dtype="<f8", count=2 * count)
    vals = (body[0::2] + 1j * body[1::2]).reshape((n,) * d)
    grid = Grid(d, n, L)
    return field_from_values(grid, vals, PHYSICAL if flag == 0 else FREQUENCY)
