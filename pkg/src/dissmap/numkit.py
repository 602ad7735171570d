"""Dense complex/real linear-algebra kernel.

Rank-revealing SVD, pseudoinverse and null-space projectors, Hermitian
splits, semidefiniteness tests, Cholesky, and selected singular values.
All functions are pure and operate on 2-D numpy arrays (complex128).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DefinitenessError, NumericError, ShapeError, StructureError

_EPS = np.finfo(np.float64).eps


def as_matrix(a) -> np.ndarray:
    """Coerce input to a finite 2-D complex128 array."""
    A = np.asarray(a)
    if A.ndim == 1:
        A = A[:, None]
    if A.ndim != 2:
        raise ShapeError(f"expected a matrix, got ndim={A.ndim}")
    A = np.ascontiguousarray(A, dtype=np.complex128)
    if A.size and not np.all(np.isfinite(A.view(np.float64))):
        raise NumericError("matrix has non-finite entries")
    return A


@dataclass(frozen=True)
class TolerancePolicy:
    """Numerical thresholds shared by all modules.

    rank_rtol=None means the per-matrix default max(n, m) * eps.
    """

    rank_rtol: float | None = None
    psd_tol: float = 1e-10
    residual_tol: float = 1e-8

    def __post_init__(self):
        for name in ("rank_rtol", "psd_tol", "residual_tol"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ValueError(f"{name} must be nonnegative")

    def rank_threshold(self, A: np.ndarray) -> float:
        rtol = self.rank_rtol
        if rtol is None:
            rtol = max(A.shape) * _EPS
        return rtol


DEFAULT_TOL = TolerancePolicy()


@dataclass(frozen=True)
class SVDFactors:
    """Reduced SVD of a matrix A = U1 @ diag(Sigma1) @ V1.conj().T.

    U2 spans the orthogonal complement of range(A); rank is the count of
    singular values above rank_tol.
    """

    U1: np.ndarray
    U2: np.ndarray
    Sigma1: np.ndarray
    V1: np.ndarray
    rank: int
    rank_tol: float


def reduced_svd(A, tol: TolerancePolicy = DEFAULT_TOL) -> SVDFactors:
    """Rank-revealing reduced SVD with the orthogonal range complement."""
    A = as_matrix(A)
    if A.size == 0:
        raise ShapeError("empty matrix")
    U, s, Vh = np.linalg.svd(A, full_matrices=True)
    smax = s[0] if s.size else 0.0
    thresh = tol.rank_threshold(A) * smax
    rank = int(np.sum(s > thresh))
    return SVDFactors(
        U1=np.ascontiguousarray(U[:, :rank]),
        U2=np.ascontiguousarray(U[:, rank:]),
        Sigma1=s[:rank].copy(),
        V1=np.ascontiguousarray(Vh[:rank].conj().T),
        rank=rank,
        rank_tol=thresh,
    )


def pseudoinverse(A, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse via the rank-revealing SVD."""
    A = as_matrix(A)
    if A.size == 0 or not np.any(A):
        return np.zeros((A.shape[1], A.shape[0]), dtype=np.complex128)
    f = reduced_svd(A, tol)
    return (f.V1 / f.Sigma1) @ f.U1.conj().T


def null_projector(A, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Orthogonal projector I - A @ pinv(A) onto the null space of A*."""
    A = as_matrix(A)
    n = A.shape[0]
    return np.eye(n, dtype=np.complex128) - A @ pseudoinverse(A, tol)


def hermitian_split(A) -> tuple[np.ndarray, np.ndarray]:
    """Split a square matrix into its Hermitian and skew-Hermitian parts."""
    A = as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise ShapeError("hermitian_split needs a square matrix")
    AH = (A + A.conj().T) / 2.0
    return AH, A - AH


def _check_hermitian(A: np.ndarray, rtol: float = 1e-10) -> np.ndarray:
    if A.shape[0] != A.shape[1]:
        raise ShapeError("expected a square matrix")
    dev = np.linalg.norm(A - A.conj().T)
    scale = np.linalg.norm(A)
    if dev > rtol * max(scale, 1e-300):
        raise StructureError(f"matrix not Hermitian: deviation {dev:.3e}")
    return (A + A.conj().T) / 2.0


def is_psd(A, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    """Whether a Hermitian matrix is PSD up to a relative eigenvalue slack."""
    A = as_matrix(A)
    H = _check_hermitian(A)
    if H.size == 0:
        return True
    evals = np.linalg.eigvalsh(H)
    norm2 = max(abs(evals[0]), abs(evals[-1]))
    return bool(evals[0] >= -tol.psd_tol * max(1.0, norm2))


def min_eig_herm(A) -> float:
    """Smallest eigenvalue of the Hermitian part of A (diagnostic helper)."""
    A = as_matrix(A)
    H = (A + A.conj().T) / 2.0
    if H.size == 0:
        return 0.0
    return float(np.linalg.eigvalsh(H)[0])


def cholesky_factor(A, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Lower-triangular L with L @ L* = A for Hermitian positive definite A."""
    A = as_matrix(A)
    H = _check_hermitian(A)
    evals = np.linalg.eigvalsh(H)
    if evals[0] <= tol.psd_tol * max(abs(evals[-1]), abs(evals[0])):
        raise DefinitenessError(
            f"matrix not positive definite: lambda_min = {evals[0]:.3e}"
        )
    return np.linalg.cholesky(H)


def null_space_basis(A, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal columns spanning the numerical null space of A.

    Returns an (m, 0) array when the null space is trivial. The basis is
    not unique; compare projectors downstream, not bases.
    """
    A = as_matrix(A)
    if not np.any(A):
        return np.eye(A.shape[1], dtype=np.complex128)
    U, s, Vh = np.linalg.svd(A, full_matrices=True)
    thresh = tol.rank_threshold(A) * s[0]
    rank = int(np.sum(s > thresh))
    return np.ascontiguousarray(Vh[rank:].conj().T)


def singular_value(A, k: int) -> float:
    """k-th largest singular value (1-based)."""
    A = as_matrix(A)
    s = np.linalg.svd(A, compute_uv=False)
    if not 1 <= k <= s.size:
        raise IndexError(f"singular value index {k} out of range 1..{s.size}")
    return float(s[k - 1])


def frob(A) -> float:
    return float(np.linalg.norm(A))


def spec_norm(A) -> float:
    A = np.asarray(A)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))
