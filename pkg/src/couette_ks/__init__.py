"""Pseudo-spectral simulator and diagnostics for volume-filling chemotaxis
near a strong Couette shear, with a sweep harness over (A, M)."""

__version__ = "0.1.0"
