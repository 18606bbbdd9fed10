"""Spectral discretization of the channel T x [-Ly, Ly).

The domain is periodic in x with period 2*pi and periodic in y after
truncating the real line to [-Ly, Ly).  Fields are stored as complex
Fourier coefficients ``coef[i, j]`` on the integer mode lattice
``(mx[i], my[j])`` with physical wavenumbers ``kx = mx`` and
``ky = my * pi / Ly``.

Normalization: ``coef[0, 0]`` equals the domain mean of the field (the
forward transform divides by Nx*Ny).  This is the single place the
convention is fixed; everything else (norms, projections, solvers)
derives from it.

A field may live in a shear-following frame: with phase ``shear = s`` the
stored coefficient multiplies ``exp(i*(kx*x + (ky - s*kx)*y))``, and the
collocation samples returned by :func:`from_spectral` sit on the tilted
points ``x = X + s*y (mod 2*pi)``.  Pointwise products and collocation
quadrature are frame-agnostic; only the y-derivative weight changes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Grid",
    "SpectralField",
    "ZeroModeField",
    "make_grid",
    "to_spectral",
    "from_spectral",
    "zeros_like",
    "ddx",
    "ddy",
    "laplacian",
    "dealias",
    "project_zero",
    "project_nonzero",
    "lp_norm",
    "spectral_l2",
    "zero_mode_from_samples",
]


def _mode_index(n: int) -> np.ndarray:
    # integer labels 0, 1, ..., n/2-1, then the Nyquist slot carries +n/2
    m = np.rint(np.fft.fftfreq(n, 1.0 / n)).astype(np.int64)
    m[n // 2] = n // 2
    return m


@dataclass(frozen=True)
class Grid:
    """Immutable spectral grid. Build with :func:`make_grid`."""

    Nx: int
    Ny: int
    Ly: float

    def __post_init__(self):
        if self.Nx < 8 or self.Ny < 8 or self.Nx % 2 or self.Ny % 2:
            raise ValueError(f"resolutions must be even and >= 8, got ({self.Nx}, {self.Ny})")
        if not self.Ly > 0:
            raise ValueError(f"Ly must be positive, got {self.Ly}")
        set_ = object.__setattr__
        set_(self, "Lx", 2.0 * np.pi)
        set_(self, "dx", 2.0 * np.pi / self.Nx)
        set_(self, "dy", 2.0 * self.Ly / self.Ny)
        set_(self, "area", 2.0 * np.pi * 2.0 * self.Ly)
        set_(self, "x", np.arange(self.Nx) * self.dx)
        set_(self, "y", -self.Ly + np.arange(self.Ny) * self.dy)
        mx = _mode_index(self.Nx)
        my = _mode_index(self.Ny)
        set_(self, "mx", mx)
        set_(self, "my", my)
        set_(self, "kx", mx.astype(np.float64))
        set_(self, "ky", my.astype(np.float64) * (np.pi / self.Ly))
        # 2/3-rule retention mask and the self-conjugate Nyquist lines
        keep = (np.abs(mx)[:, None] <= self.Nx // 3) & (np.abs(my)[None, :] <= self.Ny // 3)
        nyq = (np.abs(mx)[:, None] == self.Nx // 2) | (np.abs(my)[None, :] == self.Ny // 2)
        keep.flags.writeable = False
        nyq.flags.writeable = False
        set_(self, "dealias_mask", keep)
        set_(self, "nyquist_mask", nyq)
        for name in ("x", "y", "mx", "my", "kx", "ky"):
            getattr(self, name).flags.writeable = False

    @property
    def ky_unit(self) -> float:
        """Spacing of the y-wavenumber lattice, pi/Ly."""
        return np.pi / self.Ly

    def ky_eff(self, shear: float) -> np.ndarray:
        """Effective y-wavenumbers (Nx, Ny) in a frame with phase ``shear``."""
        return self.ky[None, :] - shear * self.kx[:, None]


@dataclass(frozen=True)
class SpectralField:
    """A scalar field as Fourier coefficients on ``grid``, in frame ``shear``."""

    grid: Grid
    coef: np.ndarray
    shear: float = 0.0

    def __post_init__(self):
        if self.coef.shape != (self.grid.Nx, self.grid.Ny):
            raise ValueError(f"coefficient shape {self.coef.shape} does not match grid")
        if self.coef.dtype != np.complex128:
            object.__setattr__(self, "coef", self.coef.astype(np.complex128))
        self.coef.flags.writeable = False

    def with_coef(self, coef: np.ndarray) -> "SpectralField":
        return SpectralField(self.grid, coef, self.shear)


@dataclass(frozen=True)
class ZeroModeField:
    """The x-independent part of a field: the kx = 0 coefficient line."""

    grid: Grid
    coef: np.ndarray  # (Ny,) complex, ky-coefficients

    def __post_init__(self):
        if self.coef.shape != (self.grid.Ny,):
            raise ValueError("zero-mode coefficient line must have shape (Ny,)")
        if self.coef.dtype != np.complex128:
            object.__setattr__(self, "coef", self.coef.astype(np.complex128))
        self.coef.flags.writeable = False

    def values(self) -> np.ndarray:
        """Real samples on the y collocation points."""
        return np.real(np.fft.ifft(self.coef) * self.grid.Ny)

    def ddy(self) -> "ZeroModeField":
        w = 1j * self.grid.ky.copy()
        w[self.grid.Ny // 2] = 0.0
        return ZeroModeField(self.grid, self.coef * w)

    def lp(self, p) -> float:
        """L^p norm over y alone (trapezoidal = uniform weights on the torus)."""
        v = self.values()
        if p == np.inf or p == "inf":
            return float(np.max(np.abs(v)))
        if p not in (1, 2, 4):
            raise ValueError(f"unsupported norm order {p}")
        return float(np.sum(np.abs(v) ** p) * self.grid.dy) ** (1.0 / p)


def make_grid(Nx: int, Ny: int, Ly: float) -> Grid:
    """Validated grid constructor; see :class:`Grid` for the conventions."""
    return Grid(int(Nx), int(Ny), float(Ly))


def to_spectral(grid: Grid, samples: np.ndarray, shear: float = 0.0) -> SpectralField:
    """Transform real collocation samples (Nx, Ny) to coefficients."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.shape != (grid.Nx, grid.Ny):
        raise ValueError(f"sample shape {samples.shape} does not match grid ({grid.Nx}, {grid.Ny})")
    return SpectralField(grid, np.fft.fft2(samples) / (grid.Nx * grid.Ny), shear)


def from_spectral(f: SpectralField) -> np.ndarray:
    """Real samples on the (possibly shear-tilted) collocation points."""
    return np.real(np.fft.ifft2(f.coef)) * (f.grid.Nx * f.grid.Ny)


def zeros_like(grid: Grid, shear: float = 0.0) -> SpectralField:
    return SpectralField(grid, np.zeros((grid.Nx, grid.Ny), dtype=np.complex128), shear)


def ddx(f: SpectralField) -> SpectralField:
    g = f.grid
    w = 1j * g.kx[:, None] * np.ones((1, g.Ny))
    w[g.nyquist_mask] = 0.0
    return f.with_coef(f.coef * w)


def ddy(f: SpectralField) -> SpectralField:
    g = f.grid
    w = 1j * g.ky_eff(f.shear)
    w[g.nyquist_mask] = 0.0
    return f.with_coef(f.coef * w)


def laplacian(f: SpectralField) -> SpectralField:
    g = f.grid
    sym = -(g.kx[:, None] ** 2 + g.ky_eff(f.shear) ** 2)
    return f.with_coef(f.coef * sym)


def dealias(f: SpectralField) -> SpectralField:
    """2/3-rule truncation: zero all modes with |mx| > Nx/3 or |my| > Ny/3."""
    return f.with_coef(np.where(f.grid.dealias_mask, f.coef, 0.0))


def project_zero(f: SpectralField) -> ZeroModeField:
    return ZeroModeField(f.grid, f.coef[0, :].copy())


def project_nonzero(f: SpectralField) -> SpectralField:
    coef = f.coef.copy()
    coef[0, :] = 0.0
    return f.with_coef(coef)


def lp_norm(f: SpectralField, p) -> float:
    """Collocation-grid L^p norm over the full channel, p in {1, 2, 4, inf}."""
    v = from_spectral(f)
    if p == np.inf or p == "inf":
        return float(np.max(np.abs(v)))
    if p not in (1, 2, 4):
        raise ValueError(f"unsupported norm order {p}")
    return float(np.sum(np.abs(v) ** p) * f.grid.dx * f.grid.dy) ** (1.0 / p)


def spectral_l2(f: SpectralField) -> float:
    """L^2 norm straight from coefficients (Parseval); equals lp_norm(f, 2)."""
    return float(np.sqrt(f.grid.area * np.sum(np.abs(f.coef) ** 2)))


def zero_mode_from_samples(grid: Grid, samples: np.ndarray) -> ZeroModeField:
    """Build a zero-mode (y-only) field from real samples on grid.y."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.shape != (grid.Ny,):
        raise ValueError("samples must have shape (Ny,)")
    return ZeroModeField(grid, np.fft.fft(samples) / grid.Ny)
