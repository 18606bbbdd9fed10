"""Shared helpers: independent oracles and random field families."""

import numpy as np

from couette_ks.grid import Grid, SpectralField, to_spectral


def truncated_convolution(a: SpectralField, b: SpectralField) -> SpectralField:
    """Brute-force spectral product: exact lattice convolution of the two
    coefficient arrays, truncated to the 2/3-rule retained set.

    Independent of the FFT path: a direct double sum over retained output
    modes.  Only usable at small resolutions.
    """
    g = a.grid
    assert a.shear == b.shear
    out = np.zeros((g.Nx, g.Ny), dtype=np.complex128)
    cutx, cuty = g.Nx // 3, g.Ny // 3
    # index of integer mode m in fft ordering
    ix = {int(m): i for i, m in enumerate(g.mx)}
    iy = {int(m): j for j, m in enumerate(g.my)}
    modes_x = [m for m in ix if abs(m) <= 2 * cutx]
    modes_y = [m for m in iy if abs(m) <= 2 * cuty]
    for mo in range(-cutx, cutx + 1):
        for no in range(-cuty, cuty + 1):
            s = 0.0 + 0.0j
            for m1 in modes_x:
                m2 = mo - m1
                if m2 not in ix:
                    continue
                for n1 in modes_y:
                    n2 = no - n1
                    if n2 not in iy:
                        continue
                    s += a.coef[ix[m1], iy[n1]] * b.coef[ix[m2], iy[n2]]
            out[ix[mo], iy[no]] = s
    return SpectralField(g, out, a.shear)


def random_real_field(grid: Grid, rng, decay: float = 6.0, dealiased: bool = True) -> SpectralField:
    """Smooth random real field: Gaussian-decaying spectrum, random phases."""
    kx = grid.kx[:, None]
    ky = grid.ky[None, :]
    amp = np.exp(-(kx**2 + ky**2) / (2.0 * decay**2))
    raw = rng.standard_normal((grid.Nx, grid.Ny)) * amp
    f = to_spectral(grid, raw)  # transform of real samples => Hermitian
    if dealiased:
        from couette_ks.grid import dealias

        f = dealias(f)
    return f


def random_profile(grid: Grid, rng, n_bumps: int = 3, ymax_frac: float = 0.5) -> np.ndarray:
    """Nonnegative smooth bump profile on grid.y, compactly centered."""
    y = grid.y
    f = np.zeros_like(y)
    for _ in range(n_bumps):
        c = rng.uniform(-ymax_frac, ymax_frac) * grid.Ly * 0.5
        w = rng.uniform(0.4, 1.5)
        a = rng.uniform(0.2, 2.0)
        f += a * np.exp(-((y - c) ** 2) / (2.0 * w**2))
    return f
