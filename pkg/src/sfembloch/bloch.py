"""
Bloch-periodic reduction of the assembled cell matrices.

The reduced unknowns are the reference sets (left, bottom, lb corner,
interior); every image DOF is its reference DOF times a phase factor:

    right = e^{i psi_x} left        top = e^{i psi_y} bottom
    rb = e^{i psi_x} lb   lt = e^{i psi_y} lb   rt = e^{i (psi_x + psi_y)} lb

with psi_x = 2 k_x d_a and psi_y = 2 k_y d_b. Conjugating with the resulting
transform, K_R = T^H K T, enforces the matching force balance on the image
boundaries without assembling it explicitly.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp

from .assembly import SystemMatrices
from .cellmesh import DofPartition, UnitCell
from .errors import TransformError

REFERENCE_SETS = ("left", "bottom", "lb", "interior")


class WaveVector(NamedTuple):
    kx: float
    ky: float


def phases(cell: UnitCell, k: WaveVector) -> tuple[float, float]:
    return 2.0 * k.kx * cell.d_a, 2.0 * k.ky * cell.d_b


@dataclass(frozen=True, eq=False)
class BlochTransform:
    """Sparse n_full x n_reduced map; each row has one unit-modulus entry."""

    column: np.ndarray   # reduced column carrying each full DOF
    phase: np.ndarray    # complex factor of each full DOF
    n_reduced: int
    psi: tuple

    @property
    def n_full(self) -> int:
        return len(self.column)

    @property
    def sparse(self) -> sp.csr_matrix:
        rows = np.arange(self.n_full)
        return sp.csr_matrix((self.phase, (rows, self.column)),
                             shape=(self.n_full, self.n_reduced))

    @property
    def T(self) -> np.ndarray:
        return self.sparse.toarray()


def build_transform(part: DofPartition, cell: UnitCell, k: WaveVector) -> BlochTransform:
    psi_x, psi_y = phases(cell, k)
    px, py = np.exp(1j * psi_x), np.exp(1j * psi_y)
    n = part.n_dofs
    column = np.full(n, -1)
    phase = np.zeros(n, dtype=complex)

    start = 0
    ref_cols = {}
    for name in REFERENCE_SETS:
        dofs = part.dofs(name)
        cols = np.arange(start, start + len(dofs))
        column[dofs] = cols
        phase[dofs] = 1.0
        ref_cols[name] = cols
        start += len(dofs)

    images = (("right", "left", px), ("top", "bottom", py),
              ("rb", "lb", px), ("lt", "lb", py), ("rt", "lb", px * py))
    for image, ref, factor in images:
        dofs = part.dofs(image)
        if len(dofs) != len(ref_cols[ref]):
            raise TransformError(f"image set {image!r} does not match reference set {ref!r}")
        column[dofs] = ref_cols[ref]
        phase[dofs] = factor
    if np.any(column < 0):
        raise TransformError("partition leaves DOFs unassigned")
    return BlochTransform(column, phase, start, (psi_x, psi_y))


def reduce(sys: SystemMatrices, T: BlochTransform) -> tuple[np.ndarray, np.ndarray]:
    """Hermitian reduced pair (K_R, M_R) = (T^H K T, T^H M T)."""
    if sys.n != T.n_full:
        raise TransformError(f"matrices have {sys.n} DOFs but the transform expects {T.n_full}")
    Ts = T.sparse
    TH = Ts.conj().T.tocsr()

    def conj(A):
        AT = (Ts.T @ A.T).T          # A @ T, dense
        R = np.asarray(TH @ AT)
        return 0.5 * (R + R.conj().T)

    return conj(sys.K), conj(sys.M)
