"""Sharp constants, the critical-mass threshold, and 1D inequality oracles.

The suppression threshold for the volume-filling system is controlled by
the sharp one-dimensional interpolation constant

    ||f||_L4 <= C* ||f||_L1^(1/2) ||f'||_L2^(1/2),   C* = (4 pi^2 / 9)^(-1/4),

whose fourth power enters the margin tau(M) = 1 - C*^4 M^2 / 3.  The
margin vanishes exactly at M = 2 pi / sqrt(3).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .grid import Grid, zero_mode_from_samples

__all__ = [
    "sharp_gn_constant",
    "critical_mass",
    "tau",
    "threshold_report",
    "ThresholdReport",
    "gn_ratio",
    "nash_ratio",
]


def sharp_gn_constant() -> float:
    """Best constant of the 1D L4 <-> L1/gradient interpolation inequality."""
    return float((4.0 * np.pi**2 / 9.0) ** -0.25)


def critical_mass() -> float:
    """Mass below which strong shear suppresses blow-up: 2*pi/sqrt(3)."""
    return float(2.0 * np.pi / np.sqrt(3.0))


def tau(M: float) -> float:
    """Suppression margin 1 - C*^4 M^2 / 3; positive iff M < critical_mass()."""
    if M < 0:
        raise ValueError("mass must be nonnegative")
    return 1.0 - sharp_gn_constant() ** 4 * M**2 / 3.0


@dataclass(frozen=True)
class ThresholdReport:
    C_star: float
    M_crit: float
    mass: float
    tau: float
    verdict: str  # "below" | "above"

    def to_json(self) -> str:
        return json.dumps(
            {
                "C_star": self.C_star,
                "M_crit": self.M_crit,
                "mass": self.mass,
                "tau": self.tau,
                "verdict": self.verdict,
            },
            indent=2,
        )


def threshold_report(M: float) -> ThresholdReport:
    t = tau(M)
    return ThresholdReport(
        C_star=sharp_gn_constant(),
        M_crit=critical_mass(),
        mass=float(M),
        tau=t,
        verdict="below" if t > 0 else "above",
    )


def _profile_norms(grid: Grid, f: np.ndarray):
    f = np.asarray(f, dtype=np.float64)
    if f.shape != (grid.Ny,):
        raise ValueError("profile must be sampled on grid.y")
    zm = zero_mode_from_samples(grid, f)
    df = zm.ddy().values()
    dy = grid.dy
    l1 = np.sum(np.abs(f)) * dy
    l2 = np.sqrt(np.sum(f**2) * dy)
    l4 = (np.sum(f**4) * dy) ** 0.25
    dl2 = np.sqrt(np.sum(df**2) * dy)
    return l1, l2, l4, dl2


def gn_ratio(grid: Grid, f: np.ndarray) -> float:
    """||f||_L4 / (||f||_L1^(1/2) ||f'||_L2^(1/2)) on the truncated line."""
    l1, _, l4, dl2 = _profile_norms(grid, f)
    denom = np.sqrt(l1) * np.sqrt(dl2)
    if denom == 0:
        raise ValueError("profile has vanishing L1 or gradient norm")
    return float(l4 / denom)


def nash_ratio(grid: Grid, f: np.ndarray) -> float:
    """||f'||_L2^2 ||f||_L1^4 / ||f||_L2^6; dilation invariant, bounded below."""
    l1, l2, _, dl2 = _profile_norms(grid, f)
    if l2 == 0:
        raise ValueError("profile is identically zero")
    return float(dl2**2 * l1**4 / l2**6)
