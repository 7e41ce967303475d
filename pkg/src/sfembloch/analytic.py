"""
Closed-form dispersion relations used as oracles.

* folded homogeneous medium: w = c sqrt((k + n pi/d)^2 + (m pi/d)^2)
* Rayleigh's two-layer laminate (layers of equal thickness ``d``, period 2d):
  cos(2dk) = cos(a1) cos(a2) - (Z1^2 + Z2^2) / (2 Z1 Z2) sin(a1) sin(a2),
  a_i = w d / c_i, Z_i = rho_i c_i.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .elasticity import Material, wave_speeds

_STOP_TOL = 1e-12


@dataclass(frozen=True)
class FoldedBranchSpec:
    c: float
    d: float
    n: int = 0
    m: int = 0

    def __post_init__(self):
        if not (self.c > 0 and self.d > 0):
            raise ValueError("speed and half-side must be positive")


@dataclass(frozen=True)
class BilayerSpec:
    rho1: float
    c1: float
    rho2: float
    c2: float
    d: float

    def __post_init__(self):
        if min(self.rho1, self.c1, self.rho2, self.c2, self.d) <= 0:
            raise ValueError("bilayer parameters must be positive")

    @classmethod
    def from_materials(cls, m1: Material, m2: Material, d: float, wave: str) -> "BilayerSpec":
        """``wave`` is ``"P"`` (longitudinal) or ``"S"`` (shear)."""
        idx = {"P": 0, "S": 1}[wave]
        return cls(m1.rho, wave_speeds(m1)[idx], m2.rho, wave_speeds(m2)[idx], d)

    @property
    def impedance_factor(self) -> float:
        z1, z2 = self.rho1 * self.c1, self.rho2 * self.c2
        return (z1 ** 2 + z2 ** 2) / (2 * z1 * z2)


def folded_homogeneous(spec: FoldedBranchSpec, k):
    k = np.asarray(k, dtype=float)
    return spec.c * np.hypot(k + spec.n * np.pi / spec.d, spec.m * np.pi / spec.d)


def homogeneous_spectrum(speeds, d_a: float, d_b: float, kx, ky, n_range=(-2, 2), m_range=(0, 2)):
    """All folded plane-wave frequencies c |k + G| at one wave vector.

    ``n`` folds along y (reciprocal step pi/d_b), ``m`` along x (pi/d_a);
    both signs of ``m`` are included. Returns a sorted array.
    """
    out = []
    for c in speeds:
        for n in range(n_range[0], n_range[1] + 1):
            for m in range(-m_range[1], m_range[1] + 1):
                if abs(m) < m_range[0]:
                    continue
                out.append(c * np.hypot(kx + m * np.pi / d_a, ky + n * np.pi / d_b))
    return np.sort(np.array(out))


def homogeneous_curves(speeds, d: float, k, n_range=(-3, 3), m_range=(0, 3), omega_max=None):
    """Folded branches along vertical incidence, one row per (c, n, m).

    Returns ``(labels, curves)``; curves entirely above ``omega_max`` are dropped.
    """
    k = np.asarray(k, dtype=float)
    labels, rows = [], []
    for c in speeds:
        for n in range(n_range[0], n_range[1] + 1):
            for m in range(m_range[0], m_range[1] + 1):
                w = folded_homogeneous(FoldedBranchSpec(c, d, n, m), k)
                if omega_max is not None and w.min() > omega_max:
                    continue
                labels.append((c, n, m))
                rows.append(w)
    return labels, np.array(rows)


def rayleigh_rhs(spec: BilayerSpec, omega):
    w = np.asarray(omega, dtype=float)
    a1, a2 = w * spec.d / spec.c1, w * spec.d / spec.c2
    return np.cos(a1) * np.cos(a2) - spec.impedance_factor * np.sin(a1) * np.sin(a2)


def rayleigh_k(spec: BilayerSpec, omega):
    """Wave number in [0, pi/(2d)] for pass-band frequencies, NaN in stop bands."""
    r = rayleigh_rhs(spec, omega)
    k = np.arccos(np.clip(r, -1.0, 1.0)) / (2 * spec.d)
    return np.where(np.abs(r) <= 1.0 + _STOP_TOL, k, np.nan)


def rayleigh_residual(spec: BilayerSpec, k, omega):
    return np.abs(np.cos(2 * spec.d * np.asarray(k)) - rayleigh_rhs(spec, omega))


@dataclass
class BilayerBands:
    segments: list = field(default_factory=list)   # arrays of shape (n, 2): columns k, omega
    gaps: list = field(default_factory=list)       # (omega_lo, omega_hi)
    edges: list = field(default_factory=list)      # every refined band edge


def _excess(spec, w):
    return np.abs(rayleigh_rhs(spec, w)) - 1.0


def bilayer_branches(spec: BilayerSpec, omega_max: float, n_samples: int = 2000) -> BilayerBands:
    """Pass bands inverted to (k, omega) segments, plus the stop bands between them."""
    if not omega_max > 0:
        raise ValueError("omega_max must be positive")
    if n_samples < 100:
        raise ValueError("need at least 100 frequency samples")
    w = np.linspace(0.0, omega_max, n_samples)
    stop = _excess(spec, w) > _STOP_TOL
    stop[0] = False

    def refine(a, b):
        fa, fb = _excess(spec, a), _excess(spec, b)
        if fa == 0 or fb == 0:
            return a if fa == 0 else b
        if (fa > 0) == (fb > 0):
            return a if abs(fa) < abs(fb) else b
        return brentq(lambda t: _excess(spec, t), a, b, xtol=1e-14 * omega_max, rtol=1e-12)

    bands = BilayerBands()
    lo = 0.0
    i = 1
    while i < n_samples:
        if stop[i] and not stop[i - 1]:
            hi_pass = refine(w[i - 1], w[i])
            j = i
            while j < n_samples and stop[j]:
                j += 1
            inner = w[(w > lo) & (w < hi_pass)]
            bands.segments.append(_segment(spec, np.concatenate([[lo], inner, [hi_pass]])))
            bands.edges.append(hi_pass)
            if j == n_samples:
                lo = None
                break
            lo = refine(w[j - 1], w[j])
            bands.edges.append(lo)
            bands.gaps.append((hi_pass, lo))
            i = j
        i += 1
    if lo is not None:
        inner = w[w > lo]
        bands.segments.append(_segment(spec, np.concatenate([[lo], inner])))
    return bands


def _segment(spec, omegas):
    k = np.arccos(np.clip(rayleigh_rhs(spec, omegas), -1.0, 1.0)) / (2 * spec.d)
    return np.column_stack([k, omegas])
