"""Element stiffness/mass integration, global assembly and mass lumping."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .basis import ElementSpec, lagrange_table
from .cellmesh import Mesh
from .elasticity import Material, constitutive
from .errors import AssemblyError

LUMP_BLOCK = "block"
LUMP_TRACE = "trace"
LUMPING_MODES = (LUMP_BLOCK, LUMP_TRACE)


@dataclass(frozen=True, eq=False)
class SystemMatrices:
    K: np.ndarray
    M: np.ndarray
    lumped: bool = False

    @property
    def n(self) -> int:
        return len(self.K)

    @property
    def mass_is_diagonal(self) -> bool:
        off = self.M - np.diag(np.diag(self.M))
        return not np.any(off)


@lru_cache(maxsize=32)
def _reference_tables(spec: ElementSpec):
    """Tensor shape values/gradients at the tensor quadrature points."""
    q = spec.quadrature
    val, der = lagrange_table(spec.nodal, q.points)
    # quadrature point (qy, qx) -> row qy*nq + qx ; node (Qy, Qx) -> col Qy*n + Qx
    N = np.einsum("ab,cd->acbd", val, val).reshape(len(q) ** 2, -1)
    dNx = np.einsum("ab,cd->acbd", val, der).reshape(len(q) ** 2, -1)
    dNy = np.einsum("ab,cd->acbd", der, val).reshape(len(q) ** 2, -1)
    w = np.outer(q.weights, q.weights).ravel()
    return N, dNx, dNy, w


def element_matrices(bounds, spec: ElementSpec, mat: Material):
    """Stiffness and consistent mass of one axis-aligned rectangle.

    ``bounds`` is ``(x0, x1, y0, y1)``. Local DOFs are ordered [u_x..., u_y...].
    """
    x0, x1, y0, y1 = bounds
    hx, hy = x1 - x0, y1 - y0
    if not (hx > 0 and hy > 0):
        raise AssemblyError(f"degenerate element with bounds {tuple(bounds)}")
    N, dNx, dNy, w = _reference_tables(spec)
    detJ = 0.25 * hx * hy
    Bx, By = dNx * (2.0 / hx), dNy * (2.0 / hy)
    wq = w * detJ

    D = constitutive(mat)
    nn = N.shape[1]
    zeros = np.zeros_like(Bx)
    # strain rows (e_xx, e_yy, g_xy) per quadrature point: (nq, 3, 2*nn)
    B = np.stack([np.hstack([Bx, zeros]),
                  np.hstack([zeros, By]),
                  np.hstack([By, Bx])], axis=1)
    Ke = np.einsum("q,qia,ij,qjb->ab", wq, B, D, B)
    m = np.einsum("q,qa,qb->ab", wq * mat.rho, N, N)
    Me = np.zeros((2 * nn, 2 * nn))
    Me[:nn, :nn] = m
    Me[nn:, nn:] = m
    return 0.5 * (Ke + Ke.T), 0.5 * (Me + Me.T)


def element_mass_total(bounds, mat: Material) -> float:
    x0, x1, y0, y1 = bounds
    return mat.rho * (x1 - x0) * (y1 - y0)


def lump_element(Me: np.ndarray, total_mass: float, mode: str = LUMP_BLOCK) -> np.ndarray:
    """Diagonal scaling: keep the diagonal, rescale it to conserve the element mass.

    ``block`` normalizes the u_x and u_y diagonals separately so each sums to
    ``total_mass``; ``trace`` scales the whole diagonal to sum to twice that.
    """
    d = np.diag(Me).copy()
    nn = len(d) // 2
    if mode == LUMP_BLOCK:
        for s in (slice(0, nn), slice(nn, None)):
            tr = d[s].sum()
            if not tr > 0:
                raise AssemblyError("element mass block has non-positive trace")
            d[s] *= total_mass / tr
    elif mode == LUMP_TRACE:
        tr = d.sum()
        if not tr > 0:
            raise AssemblyError("element mass matrix has non-positive trace")
        d *= 2 * total_mass / tr
    else:
        raise ValueError(f"unknown lumping mode {mode!r}")
    return np.diag(d)


def _element_stream(mesh: Mesh):
    for e in mesh.active_elements():
        yield e, mesh.element_dofs(e), mesh.bounds[e], mesh.materials[e]


def assemble(mesh: Mesh, spec: ElementSpec | None = None, lumping: str | None = None) -> SystemMatrices:
    """Global (K, M). Inactive (pore) elements contribute nothing.

    With ``lumping`` set, each element mass is diagonally scaled before the
    scatter, see :func:`lump_element`.
    """
    spec = spec or mesh.spec
    n = mesh.n_dofs
    K = np.zeros((n, n))
    M = np.zeros((n, n))
    for _, dofs, bounds, mat in _element_stream(mesh):
        Ke, Me = element_matrices(bounds, spec, mat)
        if lumping is not None:
            Me = lump_element(Me, element_mass_total(bounds, mat), lumping)
        ix = np.ix_(dofs, dofs)
        K[ix] += Ke
        M[ix] += Me
    return SystemMatrices(0.5 * (K + K.T), 0.5 * (M + M.T), lumped=lumping is not None)


def lump(mesh: Mesh, mode: str = LUMP_BLOCK, spec: ElementSpec | None = None) -> np.ndarray:
    """Diagonal global mass built from per-element diagonal scaling."""
    spec = spec or mesh.spec
    d = np.zeros(mesh.n_dofs)
    for _, dofs, bounds, mat in _element_stream(mesh):
        _, Me = element_matrices(bounds, spec, mat)
        d[dofs] += np.diag(lump_element(Me, element_mass_total(bounds, mat), mode))
    return np.diag(d)


def total_mass(mesh: Mesh) -> float:
    return sum(element_mass_total(b, m) for _, _, b, m in _element_stream(mesh))
