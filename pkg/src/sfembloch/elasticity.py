"""Isotropic linear elasticity under plane strain (in-plane P/SV motion)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Material:
    name: str
    E: float
    nu: float
    rho: float

    def __post_init__(self):
        if not self.E > 0:
            raise ValueError(f"{self.name}: Young's modulus must be positive")
        if not self.rho > 0:
            raise ValueError(f"{self.name}: density must be positive")
        if not -1.0 < self.nu < 0.5:
            raise ValueError(f"{self.name}: Poisson ratio must lie in (-1, 0.5)")


ALUMINUM = Material("aluminum", 7.31e10, 0.325, 2770.0)
BRASS = Material("brass", 9.2e10, 0.33, 8270.0)


def lame_constants(m: Material) -> tuple[float, float]:
    lam = m.E * m.nu / ((1 + m.nu) * (1 - 2 * m.nu))
    mu = m.E / (2 * (1 + m.nu))
    return lam, mu


def wave_speeds(m: Material) -> tuple[float, float]:
    """Bulk (P, S) speeds."""
    lam, mu = lame_constants(m)
    return float(np.sqrt((lam + 2 * mu) / m.rho)), float(np.sqrt(mu / m.rho))


def constitutive(m: Material) -> np.ndarray:
    """Plane-strain D mapping (e_xx, e_yy, g_xy) to (s_xx, s_yy, s_xy)."""
    lam, mu = lame_constants(m)
    return np.array([[lam + 2 * mu, lam, 0.0],
                     [lam, lam + 2 * mu, 0.0],
                     [0.0, 0.0, mu]])
