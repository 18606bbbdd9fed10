"""Chemoattractant and Biot-Savart solves, diagonal in Fourier space.

Both operators respect the shear frame of their input: the effective
y-wavenumber ``ky - s*kx`` replaces ``ky`` in every symbol, so the same
code serves the lab frame (s = 0) and the tilted frame used by the
integrator.
"""

from __future__ import annotations

import numpy as np

from .grid import Grid, SpectralField, ddx, ddy, spectral_l2

__all__ = ["solve_chemo", "solve_stream", "StreamSolution"]


def _symbols(grid: Grid, shear: float):
    kx2 = grid.kx[:, None] ** 2
    return kx2 + grid.ky_eff(shear) ** 2


def solve_chemo(n: SpectralField) -> SpectralField:
    """Solve -lap(c) + c = n.  Uniformly invertible: c_hat = n_hat/(1 + |k|^2)."""
    return n.with_coef(n.coef / (1.0 + _symbols(n.grid, n.shear)))


class StreamSolution:
    """Stream function and velocity recovered from a vorticity field."""

    __slots__ = ("phi", "v1", "v2")

    def __init__(self, phi: SpectralField, v1: SpectralField, v2: SpectralField):
        self.phi = phi
        self.v1 = v1
        self.v2 = v2


def solve_stream(omega: SpectralField, mean_tol: float = 1e-10) -> StreamSolution:
    """Invert lap(phi) = omega and return v = (d_y phi, -d_x phi).

    The vorticity must have zero mean on the periodic truncation (the
    inversion is ill-posed otherwise); the stream function is gauged by
    phi_hat(0, 0) = 0.  The kx = 0 slice reproduces
    v1_0 = d_y (d_yy)^{-1} omega_0 with the ky = 0 mode annihilated, and
    v2_0 = 0 identically.
    """
    g = omega.grid
    mean = abs(omega.coef[0, 0])
    if mean > mean_tol * max(1.0, spectral_l2(omega)):
        raise ValueError(
            f"vorticity has nonzero total circulation ({mean:.3e}); "
            "Biot-Savart is ill-posed on the periodic truncation"
        )
    k2 = _symbols(g, omega.shear)
    k2safe = k2.copy()
    k2safe[0, 0] = 1.0
    phi_coef = -omega.coef / k2safe
    phi_coef[0, 0] = 0.0
    phi = omega.with_coef(phi_coef)
    return StreamSolution(phi, ddy(phi), ddx(phi).with_coef(-ddx(phi).coef))
