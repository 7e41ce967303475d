import numpy as np
import pytest
from scipy.linalg import eigh

from sfembloch.assembly import assemble
from sfembloch.basis import ElementSpec
from sfembloch.bloch import WaveVector, build_transform, reduce
from sfembloch.cellmesh import build_mesh, classify_dofs
from sfembloch.eigensolve import residuals, solve_gevp, standard_form
from sfembloch.elasticity import ALUMINUM, wave_speeds
from sfembloch.errors import NegativeEigenvalueError, SolverError


def _random_pencil(n, seed, diagonal_mass=False, complex_=True):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, n)) + (1j * rng.normal(size=(n, n)) if complex_ else 0)
    K = A @ A.conj().T
    if diagonal_mass:
        M = np.diag(rng.uniform(0.5, 2.0, n)).astype(complex)
    else:
        B = rng.normal(size=(n, n)) + (1j * rng.normal(size=(n, n)) if complex_ else 0)
        M = B @ B.conj().T + n * np.eye(n)
    return K, M


def test_identity_pencil():
    modes = solve_gevp(np.eye(6), np.eye(6), 4)
    np.testing.assert_array_equal(modes.omegas, np.ones(4))
    assert modes.n_modes == 4


def test_ascending_and_truncated():
    K, M = _random_pencil(12, 1)
    modes = solve_gevp(K, M, 5)
    assert len(modes.omegas) == 5
    assert np.all(np.diff(modes.omegas) >= 0)
    np.testing.assert_allclose(modes.omegas ** 2, eigh(K, M, eigvals_only=True)[:5], rtol=1e-10)


def test_more_modes_than_dofs():
    K, M = _random_pencil(4, 2)
    assert len(solve_gevp(K, M, 10).omegas) == 4


@pytest.mark.parametrize("seed", range(5))
def test_cholesky_and_diagonal_paths_agree(seed):
    K, M = _random_pencil(15, seed, diagonal_mass=True)
    a = solve_gevp(K, M, 15, method="diagonal").omegas
    b = solve_gevp(K, M, 15, method="cholesky").omegas
    assert np.max(np.abs(a - b)) < 1e-10 * a.max()


@pytest.mark.parametrize("diag", [True, False])
def test_residuals(diag):
    K, M = _random_pencil(20, 7, diagonal_mass=diag)
    modes = solve_gevp(K, M, 8, vectors=True)
    assert np.all(residuals(K, M, modes) < 1e-8)


def test_residuals_need_vectors():
    K, M = _random_pencil(5, 3)
    with pytest.raises(ValueError):
        residuals(K, M, solve_gevp(K, M, 2))


def test_standard_form_auto_picks_diagonal():
    K, M = _random_pencil(6, 4, diagonal_mass=True)
    A, back = standard_form(K, M)
    d = np.real(np.diag(M))
    np.testing.assert_allclose(A, K / np.sqrt(np.outer(d, d)), rtol=1e-14)


def test_negative_eigenvalue_raises():
    with pytest.raises(NegativeEigenvalueError):
        solve_gevp(np.diag([-1.0, 1.0, 2.0]), np.eye(3), 3)


def test_roundoff_negative_is_clamped():
    modes = solve_gevp(np.diag([-1e-12, 1.0, 2.0]), np.eye(3), 3)
    assert modes.omegas[0] == 0.0


def test_indefinite_mass_raises():
    M = np.diag([1.0, -1.0, 1.0])
    K = np.eye(3)
    with pytest.raises(SolverError):
        solve_gevp(K, M + 0.1 * np.ones((3, 3)), 2)
    with pytest.raises(SolverError):
        solve_gevp(K, M, 2)


def test_unknown_method():
    with pytest.raises(ValueError):
        standard_form(np.eye(2), np.eye(2), "qz")


def test_long_wave_limit(homogeneous_cell):
    # near Gamma along vertical incidence the acoustic branches are c_S k and c_P k
    mesh = build_mesh(homogeneous_cell, 1, 1, ElementSpec.spectral(8))
    part = classify_dofs(mesh)
    sys_ = assemble(mesh)
    cP, cS = wave_speeds(ALUMINUM)
    for ky in (1e-3, 1e-2, 5e-2):
        w = solve_gevp(*reduce(sys_, build_transform(part, homogeneous_cell, WaveVector(0.0, ky))), 2).omegas
        np.testing.assert_allclose(w, [cS * ky, cP * ky], rtol=1e-6)
