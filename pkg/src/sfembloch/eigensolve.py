"""Dense solution of the reduced Hermitian pencil K_R - w^2 M_R."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as sla

from .bloch import WaveVector
from .errors import NegativeEigenvalueError, SolverError

ZERO_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class ModalSet:
    k: Optional[WaveVector]
    omegas: np.ndarray
    n_modes: int
    vectors: Optional[np.ndarray] = None
    eigenvalues: Optional[np.ndarray] = None


def _hermitian_part(A):
    A = np.asarray(A)
    return 0.5 * (A + A.conj().T)


def standard_form(K, M, method: str = "auto"):
    """Map the pencil (K, M) to a standard Hermitian matrix.

    Returns ``(A, back)`` where ``back`` turns eigenvectors of ``A`` into
    eigenvectors of the pencil. ``method`` is ``"diagonal"`` (M^{-1/2}
    scaling), ``"cholesky"`` (M = L L^H) or ``"auto"``.
    """
    K = _hermitian_part(K)
    M = _hermitian_part(M)
    if method == "auto":
        method = "diagonal" if not np.any(M - np.diag(np.diag(M))) else "cholesky"
    if method == "diagonal":
        d = np.real(np.diag(M))
        if np.any(d <= 0):
            raise SolverError("diagonal mass has non-positive entries")
        s = 1.0 / np.sqrt(d)
        A = K * s[:, None] * s[None, :]
        return _hermitian_part(A), lambda Y: Y * s[:, None]
    if method == "cholesky":
        try:
            L = np.linalg.cholesky(M)
        except np.linalg.LinAlgError as exc:
            raise SolverError("mass matrix is not positive definite") from exc
        X = sla.solve_triangular(L, K, lower=True)
        A = sla.solve_triangular(L, X.conj().T, lower=True).conj().T
        return _hermitian_part(A), lambda Y: sla.solve_triangular(L.conj().T, Y, lower=False)
    raise ValueError(f"unknown reduction method {method!r}")


def solve_gevp(K_R, M_R, n_modes: int, k: Optional[WaveVector] = None,
               method: str = "auto", vectors: bool = False) -> ModalSet:
    """Lowest ``n_modes`` angular frequencies of the pencil, ascending.

    All eigenvalues are computed and then truncated, so asking for more
    modes never perturbs the lower ones.
    """
    A, back = standard_form(K_R, M_R, method)
    if vectors:
        lam, Y = np.linalg.eigh(A)
    else:
        lam, Y = np.linalg.eigvalsh(A), None
    tol = ZERO_TOL * np.max(np.abs(lam)) if len(lam) else 0.0
    if np.any(lam < -tol):
        raise NegativeEigenvalueError(
            f"eigenvalue {lam.min():.6e} below -{tol:.3e}; stiffness is not semidefinite")
    lam = np.where(lam < 0, 0.0, lam)
    count = min(n_modes, len(lam))
    omegas = np.sqrt(lam[:count])
    vec = back(Y[:, :count]) if vectors else None
    return ModalSet(k, omegas, n_modes, vec, lam[:count])


def residuals(K, M, modes: ModalSet) -> np.ndarray:
    """||K v - lam M v|| / (||K|| ||v||) for every returned pair."""
    if modes.vectors is None:
        raise ValueError("modal set carries no eigenvectors")
    V = modes.vectors
    R = K @ V - (M @ V) * modes.eigenvalues[None, :]
    return np.linalg.norm(R, axis=0) / (np.linalg.norm(K, 2) * np.linalg.norm(V, axis=0))
