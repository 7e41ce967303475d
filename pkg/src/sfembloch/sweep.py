"""
Wave-vector paths, the end-to-end dispersion sweep and oracle comparisons.

Dimensionless axes: Omega = omega L_ref / (pi c_ref) and xi = s L_ref / pi,
where ``s`` is the cumulative path length in rad/m.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import analytic
from .assembly import assemble
from .basis import ElementSpec
from .bloch import WaveVector, build_transform, reduce
from .cellmesh import Bilayer, Homogeneous, UnitCell, build_mesh, classify_dofs
from .elasticity import wave_speeds
from .eigensolve import solve_gevp
from .errors import ReportError, SfemBlochError

VERTEX_NAMES = {"G": "Gamma", "X": "X", "M": "M", "Y": "Y"}


def default_route(cell: UnitCell) -> str:
    return "GY" if isinstance(cell.layout, (Homogeneous, Bilayer)) else "GX"


@dataclass(frozen=True)
class PathSpec:
    """Piecewise-linear path through named vertices, e.g. ``route="GXMG"``."""

    vertices: dict
    route: str
    samples: int

    def __post_init__(self):
        if len(self.route) < 2:
            raise ValueError("a path needs at least two vertices")
        unknown = set(self.route) - set(self.vertices)
        if unknown:
            raise ValueError(f"unknown path vertices {sorted(unknown)}")
        if self.samples < 2:
            raise ValueError("need at least 2 samples per segment")

    @classmethod
    def for_cell(cls, cell: UnitCell, route: Optional[str] = None, samples: int = 30) -> "PathSpec":
        X = np.pi / (2 * cell.d_a)
        Y = np.pi / (2 * cell.d_b)
        vertices = {"G": (0.0, 0.0), "X": (X, 0.0), "M": (X, Y), "Y": (0.0, Y)}
        return cls(vertices, route or default_route(cell), samples)


def sample_path(path: PathSpec) -> list[WaveVector]:
    """Inclusive linear samples per segment; shared junction points appear once."""
    out = []
    t = np.linspace(0.0, 1.0, path.samples)
    for i, (a, b) in enumerate(zip(path.route[:-1], path.route[1:])):
        ka, kb = np.asarray(path.vertices[a]), np.asarray(path.vertices[b])
        for j, tj in enumerate(t):
            if i > 0 and j == 0:
                continue
            kx, ky = ka + tj * (kb - ka)
            if j == len(t) - 1:
                kx, ky = kb
            out.append(WaveVector(float(kx), float(ky)))
    return out


def path_coordinate(kpoints) -> np.ndarray:
    k = np.asarray(kpoints, dtype=float)
    steps = np.linalg.norm(np.diff(k, axis=0), axis=1)
    return np.concatenate([[0.0], np.cumsum(steps)])


@dataclass(frozen=True, eq=False)
class DispersionResult:
    kpoints: np.ndarray      # (n_k, 2) rad/m
    path_s: np.ndarray       # (n_k,) cumulative path length, rad/m
    omegas: np.ndarray       # (n_k, n_branches) rad/s, ascending per row
    c_ref: float
    L_ref: float
    meta: dict = field(default_factory=dict)

    @property
    def n_branches(self) -> int:
        return self.omegas.shape[1]

    @property
    def Omega(self) -> np.ndarray:
        return self.omegas * self.L_ref / (np.pi * self.c_ref)

    @property
    def xi(self) -> np.ndarray:
        return self.path_s * self.L_ref / np.pi

    def wave_vectors(self) -> list[WaveVector]:
        return [WaveVector(float(a), float(b)) for a, b in self.kpoints]


def _cell_description(cell: UnitCell) -> dict:
    layout = cell.layout
    desc = {"d_a": cell.d_a, "d_b": cell.d_b, "layout": type(layout).__name__}
    for name, value in vars(layout).items():
        desc[name] = value.name if hasattr(value, "name") else value
    return desc


def default_reference(cell: UnitCell) -> tuple[float, float]:
    """(c_ref, L_ref): shear speed of the first material and the longest cell side."""
    return wave_speeds(cell.reference_material)[1], 2.0 * max(cell.d_a, cell.d_b)


def compute_dispersion(cell: UnitCell, nx: int, ny: int, spec: ElementSpec,
                       lumping: Optional[str] = None, path: Optional[PathSpec] = None,
                       n_modes: int = 10, threads: int = 1) -> DispersionResult:
    """Assemble once, then reduce and solve at every path sample.

    The per-k jobs are independent; with ``threads > 1`` they run on a
    thread pool and are merged back by index, so the output does not depend
    on the worker count.
    """
    path = path or PathSpec.for_cell(cell)
    mesh = build_mesh(cell, nx, ny, spec)
    part = classify_dofs(mesh)
    system = assemble(mesh, spec, lumping=lumping)
    kpoints = sample_path(path)

    def job(k):
        try:
            T = build_transform(part, cell, k)
            return solve_gevp(*reduce(system, T), n_modes, k=k).omegas
        except SfemBlochError as exc:
            raise type(exc)(f"at k=({k.kx:.6g}, {k.ky:.6g}) rad/m: {exc}") from exc

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(job, kpoints))
    else:
        rows = [job(k) for k in kpoints]

    c_ref, L_ref = default_reference(cell)
    k = np.array(kpoints, dtype=float)
    meta = {
        "cell": _cell_description(cell),
        "nx": nx, "ny": ny,
        "element": spec.label,
        "node_family": spec.nodal.family,
        "quadrature": spec.quadrature.kind,
        "lumping": lumping or "none",
        "route": path.route,
        "samples": path.samples,
        "n_modes": n_modes,
        "n_dofs": mesh.n_dofs,
    }
    return DispersionResult(k, path_coordinate(k), np.array(rows), c_ref, L_ref, meta)


def normalize(result: DispersionResult, c_ref: float, L_ref: float) -> DispersionResult:
    """Same data with a new normalization record; only Omega and xi change."""
    if not (c_ref > 0 and L_ref > 0):
        raise ValueError("reference speed and length must be positive")
    return replace(result, c_ref=float(c_ref), L_ref=float(L_ref))


def denormalize(Omega, xi, c_ref: float, L_ref: float):
    """Inverse map: (Omega, xi) -> (omega [rad/s], s [rad/m])."""
    return np.asarray(Omega) * np.pi * c_ref / L_ref, np.asarray(xi) * np.pi / L_ref


# ---------------------------------------------------------------------------
# Oracle comparison

@dataclass(frozen=True)
class HomogeneousOracle:
    speeds: tuple
    d_a: float
    d_b: float
    n_range: tuple = (-2, 2)
    m_range: tuple = (0, 2)

    @classmethod
    def for_cell(cls, cell: UnitCell, **kw) -> "HomogeneousOracle":
        if not isinstance(cell.layout, Homogeneous):
            raise ReportError("the folded plane-wave oracle only applies to homogeneous cells")
        return cls(wave_speeds(cell.layout.material), cell.d_a, cell.d_b, **kw)


@dataclass(frozen=True)
class BilayerOracle:
    families: tuple     # BilayerSpec per wave family (P, S)

    @classmethod
    def for_cell(cls, cell: UnitCell) -> "BilayerOracle":
        if not isinstance(cell.layout, Bilayer):
            raise ReportError("the Rayleigh oracle only applies to bilayer cells")
        lay = cell.layout
        return cls(tuple(analytic.BilayerSpec.from_materials(lay.bottom, lay.top, cell.d_b, w)
                         for w in ("P", "S")))


def oracle_for(cell: UnitCell):
    if isinstance(cell.layout, Homogeneous):
        return HomogeneousOracle.for_cell(cell)
    if isinstance(cell.layout, Bilayer):
        return BilayerOracle.for_cell(cell)
    raise ReportError(f"no closed-form oracle for a {type(cell.layout).__name__} cell")


@dataclass(frozen=True, eq=False)
class ErrorReport:
    kind: str               # "relative" or "residual"
    errors: np.ndarray      # (n_k, n_branches)

    @property
    def branch_max(self) -> np.ndarray:
        return self.errors.max(axis=0)

    @property
    def branch_median(self) -> np.ndarray:
        return np.median(self.errors, axis=0)

    def resolved_count(self, tol: float) -> int:
        """Number of leading branches whose error stays below ``tol`` everywhere."""
        ok = self.branch_max < tol
        return int(len(ok) if ok.all() else np.argmin(ok))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "branch_max": [float(v) for v in self.branch_max],
            "branch_median": [float(v) for v in self.branch_median],
        }


def compare_to_oracle(result: DispersionResult, oracle) -> ErrorReport:
    """Per-point error of every numerical branch against a closed form.

    Homogeneous: relative distance to the nearest folded plane-wave
    frequency; where that frequency is exactly zero (k = 0 rigid modes)
    the distance is scaled by the slowest zone-edge frequency instead.
    Bilayer: the residual |cos(2dk) - rhs(omega)|, minimized over the
    P and S families; only valid at vertical incidence.
    """
    W = result.omegas
    err = np.empty_like(W)
    if isinstance(oracle, HomogeneousOracle):
        scale = min(oracle.speeds) * np.pi / (2 * max(oracle.d_a, oracle.d_b))
        for i, (kx, ky) in enumerate(result.kpoints):
            ref = analytic.homogeneous_spectrum(oracle.speeds, oracle.d_a, oracle.d_b, kx, ky,
                                                oracle.n_range, oracle.m_range)
            near = ref[np.argmin(np.abs(ref[:, None] - W[i][None, :]), axis=0)]
            denom = np.where(near > 1e-12 * scale, near, scale)
            err[i] = np.abs(W[i] - near) / denom
        return ErrorReport("relative", err)
    if isinstance(oracle, BilayerOracle):
        if np.any(np.abs(result.kpoints[:, 0]) > 0):
            raise ReportError("the Rayleigh oracle needs vertical incidence (k_x = 0)")
        ky = result.kpoints[:, 1][:, None]
        err = np.min([analytic.rayleigh_residual(f, ky, W) for f in oracle.families], axis=0)
        return ErrorReport("residual", err)
    raise ReportError(f"unsupported oracle {oracle!r}")


def complete_gaps(result: DispersionResult, ceiling: Optional[float] = None, min_width: float = 0.0):
    """Frequency intervals (rad/s) below ``ceiling`` that no branch reaches on the path.

    Only intervals between consecutive computed branches are found, so the
    ceiling should not exceed the lowest point of the top branch.
    """
    top = result.omegas.max(axis=0)
    bottom = result.omegas.min(axis=0)
    gaps = []
    for j in range(result.n_branches - 1):
        lo, hi = top[: j + 1].max(), bottom[j + 1:].min()
        if ceiling is not None and lo >= ceiling:
            break
        if hi - lo > min_width:
            gaps.append((float(lo), float(hi) if ceiling is None else float(min(hi, ceiling))))
    return gaps
