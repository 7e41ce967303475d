"""
Unit-cell layouts, structured quadrilateral meshes and the Bloch DOF partition.

The cell occupies [-d_a, d_a] x [-d_b, d_b]. Nodes are numbered in
lexicographic (y, x) order; DOF ``i`` is u_x of node ``i`` and DOF
``n_nodes + i`` is its u_y.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .basis import ElementSpec
from .elasticity import Material
from .errors import ConfigurationError, PartitionError

DEFAULT_SIDE_FRACTION = 0.5


@dataclass(frozen=True)
class Homogeneous:
    material: Material

    @property
    def materials(self):
        return [self.material]


@dataclass(frozen=True)
class Bilayer:
    """``bottom`` fills y < 0, ``top`` fills y > 0."""

    bottom: Material
    top: Material

    @property
    def materials(self):
        return [self.bottom, self.top]


@dataclass(frozen=True)
class MatrixInclusion:
    matrix: Material
    inclusion: Material
    side_fraction: float = DEFAULT_SIDE_FRACTION

    def __post_init__(self):
        if not 0 < self.side_fraction < 1:
            raise ValueError("side_fraction must lie in (0, 1)")

    @property
    def materials(self):
        return [self.matrix, self.inclusion]


@dataclass(frozen=True)
class MatrixPore:
    matrix: Material
    side_fraction: float = DEFAULT_SIDE_FRACTION

    def __post_init__(self):
        if not 0 < self.side_fraction < 1:
            raise ValueError("side_fraction must lie in (0, 1)")

    @property
    def materials(self):
        return [self.matrix]


Layout = Union[Homogeneous, Bilayer, MatrixInclusion, MatrixPore]


@dataclass(frozen=True)
class UnitCell:
    d_a: float
    d_b: float
    layout: Layout

    def __post_init__(self):
        if not (self.d_a > 0 and self.d_b > 0):
            raise ValueError("cell half-sizes must be positive")

    @property
    def tol(self) -> float:
        """Coordinate matching tolerance."""
        return 1e-10 * min(self.d_a, self.d_b)

    @property
    def reference_material(self) -> Material:
        """Matrix (or bottom layer) material; sets the default speed scale."""
        return self.layout.materials[0]


@dataclass(frozen=True, eq=False)
class Mesh:
    cell: UnitCell
    nx: int
    ny: int
    spec: ElementSpec
    coords: np.ndarray            # (n_nodes, 2)
    connectivity: np.ndarray      # (n_elements, n*n); -1 marks nodes dropped with a pore
    bounds: np.ndarray            # (n_elements, 4): x0, x1, y0, y1
    materials: tuple = field(repr=False)   # Material or None per element
    active: np.ndarray = field(repr=False)

    @property
    def n_nodes(self) -> int:
        return len(self.coords)

    @property
    def n_dofs(self) -> int:
        return 2 * len(self.coords)

    @property
    def n_elements(self) -> int:
        return len(self.connectivity)

    def element_dofs(self, e: int) -> np.ndarray:
        """Global DOFs of element ``e`` in local order [u_x..., u_y...]."""
        nodes = self.connectivity[e]
        return np.concatenate([nodes, nodes + self.n_nodes])

    def active_elements(self):
        return np.flatnonzero(self.active)

    def permuted(self, order) -> "Mesh":
        """Same mesh with new node ``j`` equal to old node ``order[j]``."""
        order = np.asarray(order)
        inv = np.empty_like(order)
        inv[order] = np.arange(len(order))
        conn = np.where(self.connectivity >= 0, inv[np.maximum(self.connectivity, 0)], -1)
        return Mesh(self.cell, self.nx, self.ny, self.spec, self.coords[order], conn,
                    self.bounds, self.materials, self.active)


def _grid_lines(half: float, n_el: int, ref: np.ndarray) -> np.ndarray:
    edges = np.linspace(-half, half, n_el + 1)
    edges[0], edges[-1] = -half, half
    M = len(ref) - 1
    lines = np.empty(n_el * M + 1)
    for e in range(n_el):
        a, b = edges[e], edges[e + 1]
        lines[e * M:(e + 1) * M + 1] = a + 0.5 * (ref + 1.0) * (b - a)
        lines[e * M], lines[(e + 1) * M] = a, b
    return lines


def _check_aligned(n_el: int, fraction: float, axis: str, key: str):
    # inclusion edge at -d + i * 2d/n_el requires i = n_el (1 - s) / 2 integral
    i = n_el * (1.0 - fraction) / 2.0
    if abs(i - round(i)) > 1e-9:
        raise ConfigurationError(
            f"inclusion boundary at +-{fraction} of the half-width does not fall on an element "
            f"boundary with {axis}={n_el}; choose {axis} so that {axis}*(1-side_fraction)/2 is an integer",
            key=key)


def _element_material(layout: Layout, cx: float, cy: float, d_a: float, d_b: float) -> Optional[Material]:
    if isinstance(layout, Homogeneous):
        return layout.material
    if isinstance(layout, Bilayer):
        return layout.bottom if cy < 0 else layout.top
    inside = abs(cx) < layout.side_fraction * d_a and abs(cy) < layout.side_fraction * d_b
    if isinstance(layout, MatrixInclusion):
        return layout.inclusion if inside else layout.matrix
    if isinstance(layout, MatrixPore):
        return None if inside else layout.matrix
    raise TypeError(f"unknown layout {layout!r}")


def build_mesh(cell: UnitCell, nx: int, ny: int, spec: ElementSpec) -> Mesh:
    if nx < 1 or ny < 1:
        raise ConfigurationError("need at least one element per direction", key="nx/ny")
    layout = cell.layout
    if isinstance(layout, Bilayer) and ny % 2:
        raise ConfigurationError(
            f"bilayer cells need an even ny so the layer interface lies on element edges (got ny={ny})",
            key="ny")
    if isinstance(layout, (MatrixInclusion, MatrixPore)):
        _check_aligned(nx, layout.side_fraction, "nx", "nx")
        _check_aligned(ny, layout.side_fraction, "ny", "ny")

    ref = spec.nodal.coords
    M = spec.order
    xs = _grid_lines(cell.d_a, nx, ref)
    ys = _grid_lines(cell.d_b, ny, ref)
    NX = len(xs)

    n = M + 1
    local = np.arange(n)
    n_el = nx * ny
    grid_conn = np.empty((n_el, n * n), dtype=int)
    bounds = np.empty((n_el, 4))
    materials = []
    for ey in range(ny):
        for ex in range(nx):
            e = ey * nx + ex
            gi = ex * M + local
            gj = ey * M + local
            grid_conn[e] = (gj[:, None] * NX + gi[None, :]).ravel()
            x0, x1 = xs[ex * M], xs[(ex + 1) * M]
            y0, y1 = ys[ey * M], ys[(ey + 1) * M]
            bounds[e] = (x0, x1, y0, y1)
            materials.append(_element_material(layout, 0.5 * (x0 + x1), 0.5 * (y0 + y1),
                                               cell.d_a, cell.d_b))
    active = np.array([m is not None for m in materials])
    if not active.any():
        raise ConfigurationError("every element is inactive", key="side_fraction")

    used = np.zeros(NX * len(ys), dtype=bool)
    used[grid_conn[active].ravel()] = True
    renumber = np.full(len(used), -1)
    renumber[used] = np.arange(used.sum())
    gx, gy = np.meshgrid(xs, ys)
    coords = np.column_stack([gx.ravel(), gy.ravel()])[used]
    conn = renumber[grid_conn]
    active.setflags(write=False)
    return Mesh(cell, nx, ny, spec, coords, conn, bounds, tuple(materials), active)


SET_NAMES = ("left", "right", "bottom", "top", "lb", "rb", "lt", "rt", "interior")


@dataclass(frozen=True, eq=False)
class DofPartition:
    """The nine boundary/interior node sets of the Bloch reduction.

    ``left[i]`` pairs with ``right[i]`` (same y) and ``bottom[i]`` with
    ``top[i]`` (same x). DOF sets follow from :meth:`dofs`.
    """

    n_nodes: int
    nodes: dict

    def __getitem__(self, name: str) -> np.ndarray:
        return self.nodes[name]

    def dofs(self, name: str) -> np.ndarray:
        nodes = self.nodes[name]
        return np.concatenate([nodes, nodes + self.n_nodes])

    @property
    def n_dofs(self) -> int:
        return 2 * self.n_nodes


def classify_dofs(mesh: Mesh) -> DofPartition:
    cell = mesh.cell
    tol = cell.tol
    x, y = mesh.coords[:, 0], mesh.coords[:, 1]
    on_l, on_r = np.abs(x + cell.d_a) < tol, np.abs(x - cell.d_a) < tol
    on_b, on_t = np.abs(y + cell.d_b) < tol, np.abs(y - cell.d_b) < tol
    mask = {
        "left": on_l & ~on_b & ~on_t,
        "right": on_r & ~on_b & ~on_t,
        "bottom": on_b & ~on_l & ~on_r,
        "top": on_t & ~on_l & ~on_r,
        "lb": on_l & on_b,
        "rb": on_r & on_b,
        "lt": on_l & on_t,
        "rt": on_r & on_t,
    }
    mask["interior"] = ~(on_l | on_r | on_b | on_t)
    nodes = {}
    for name, m in mask.items():
        idx = np.flatnonzero(m)
        if name in ("left", "right"):
            idx = idx[np.argsort(y[idx], kind="stable")]
        elif name in ("bottom", "top"):
            idx = idx[np.argsort(x[idx], kind="stable")]
        else:
            idx = idx[np.lexsort((x[idx], y[idx]))]
        idx.setflags(write=False)
        nodes[name] = idx
    for c in ("lb", "rb", "lt", "rt"):
        if len(nodes[c]) != 1:
            raise PartitionError(f"corner set {c!r} holds {len(nodes[c])} nodes, expected 1")
    for a, b, axis in (("left", "right", 1), ("bottom", "top", 0)):
        na, nb = nodes[a], nodes[b]
        if len(na) != len(nb):
            raise PartitionError(f"{a} edge has {len(na)} nodes but {b} edge has {len(nb)}")
        gap = np.abs(mesh.coords[na, axis] - mesh.coords[nb, axis])
        if np.any(gap > tol):
            raise PartitionError(f"{a}/{b} edge nodes do not pair up (max offset {gap.max():.3e})")
    return DofPartition(mesh.n_nodes, nodes)
