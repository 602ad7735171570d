import numpy as np
import pytest

from dissmap import numkit
from dissmap.errors import NumericError
from dissmap.numkit import DEFAULT_TOL, TolerancePolicy


def test_as_matrix_coerces_and_validates():
    M = numkit.as_matrix([[1, 2], [3, 4]])
    assert M.dtype == np.complex128 and M.shape == (2, 2)
    with pytest.raises(NumericError):
        numkit.as_matrix([1.0, np.inf])


def test_reduced_svd_rank_and_blocks():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((6, 4))
    A[:, 3] = A[:, 0] + A[:, 1]  # rank 3 generically stays 4? force:
    B = A[:, :3] @ np.array([[1, 0, 0, 1], [0, 1, 0, 1], [0, 0, 1, 0.0]])
    f = numkit.reduced_svd(B)
    assert f.rank == 3
    assert f.U1.shape == (6, 3) and f.U2.shape == (6, 3)
    # unitary completion
    U = np.hstack([f.U1, f.U2])
    assert np.allclose(U.conj().T @ U, np.eye(6), atol=1e-12)


def test_pseudoinverse_and_projector():
    rng = np.random.default_rng(1)
    X = rng.standard_normal((5, 3)) + 1j * rng.standard_normal((5, 3))
    Xd = numkit.pseudoinverse(X)
    assert np.allclose(X @ Xd @ X, X, atol=1e-10)
    P = numkit.null_projector(X)
    assert np.allclose(P @ X, 0, atol=1e-10)
    assert np.allclose(P @ P, P, atol=1e-10)


def test_hermitian_split():
    rng = np.random.default_rng(2)
    A = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    H, S = numkit.hermitian_split(A)
    assert np.allclose(H, H.conj().T)
    assert np.allclose(S, -S.conj().T)
    assert np.allclose(H + S, A)


def test_is_psd_tolerance():
    assert numkit.is_psd(np.diag([1.0, 0.0]))
    assert numkit.is_psd(np.diag([1.0, -1e-12]))
    assert not numkit.is_psd(np.diag([1.0, -1e-3]))


def test_cholesky_factor_reconstructs():
    rng = np.random.default_rng(3)
    S = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    A = S @ S.conj().T + np.eye(4)
    L = numkit.cholesky_factor(A)
    assert np.allclose(L @ L.conj().T, A, atol=1e-10)
    assert np.allclose(np.triu(L, 1), 0)


def test_null_space_basis():
    A = np.array([[1.0, 1.0, 0.0]])
    N = numkit.null_space_basis(A)
    assert N.shape == (3, 2)
    assert np.allclose(A @ N, 0, atol=1e-12)
    # zero matrix: full space
    Z = numkit.null_space_basis(np.zeros((2, 3)))
    assert Z.shape == (3, 3)


def test_singular_value_indexing():
    A = np.diag([3.0, 2.0, 1.0])
    assert numkit.singular_value(A, 1) == pytest.approx(3.0)
    assert numkit.singular_value(A, 3) == pytest.approx(1.0)


def test_rank_threshold_default():
    tol = TolerancePolicy()
    A = np.eye(5)
    thr = tol.rank_threshold(A)
    assert 0 < thr < 1e-12
    custom = TolerancePolicy(rank_rtol=0.5)
    assert custom.rank_threshold(A) == pytest.approx(0.5)
    assert DEFAULT_TOL.psd_tol == 1e-10
