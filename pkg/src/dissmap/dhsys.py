"""Dissipative-Hamiltonian system model.

A DH system is x' = (J - R) Q x with J skew-Hermitian, R Hermitian PSD
and Q Hermitian positive definite. Provides validation, stability
classification, transfer-function evaluation, the restricted null-space
bases used by the backward-error formulas, and seeded random instances.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import numkit
from .errors import (
    DissmapError,
    FrequencyError,
    ShapeError,
    StructureError,
)
from .numkit import DEFAULT_TOL, TolerancePolicy, as_matrix, frob

_EPS = np.finfo(np.float64).eps


@dataclass(frozen=True)
class DHSystem:
    J: np.ndarray
    R: np.ndarray
    Q: np.ndarray
    real_flag: bool
    tol: TolerancePolicy

    @property
    def n(self) -> int:
        return self.J.shape[0]

    @property
    def A(self) -> np.ndarray:
        """System operator (J - R) Q."""
        return (self.J - self.R) @ self.Q


@dataclass(frozen=True)
class Restriction:
    """Restriction matrices (B, C); C defaults to B* for structured radii."""

    B: np.ndarray
    C: np.ndarray | None = None

    def effective_C(self) -> np.ndarray:
        if self.C is not None:
            return self.C
        return self.B.conj().T


@dataclass(frozen=True)
class OmegaBasis:
    """Orthonormal basis of null((I - B B^+)(iw I - (J-R)Q)) at frequency w,
    with the Cholesky factor W of the gram U* Q B B* Q U."""

    w: float
    U: np.ndarray
    W: np.ndarray

    @property
    def dim(self) -> int:
        return self.U.shape[1]


def validate_dh(J, R, Q, real_flag: bool = False,
                tol: TolerancePolicy = DEFAULT_TOL) -> DHSystem:
    """Validate (J, R, Q) as a DH triple; raises StructureError otherwise."""
    J = as_matrix(J)
    R = as_matrix(R)
    Q = as_matrix(Q)
    n = J.shape[0]
    for name, M in (("J", J), ("R", R), ("Q", Q)):
        if M.shape != (n, n):
            raise ShapeError(f"{name} must be {n} x {n}, got {M.shape}")
    if real_flag:
        for name, M in (("J", J), ("R", R), ("Q", Q)):
            if np.max(np.abs(M.imag), initial=0.0) > 0.0:
                raise StructureError(f"real system requested but {name} is complex")
    skew_dev = frob(J + J.conj().T)
    if skew_dev > 1e-10 * max(1.0, frob(J)):
        raise StructureError(f"J not skew-Hermitian: deviation {skew_dev:.3e}")
    if not numkit.is_psd(R, tol):
        raise StructureError("R not positive semidefinite")
    Qh = (Q + Q.conj().T) / 2.0
    if frob(Q - Q.conj().T) > 1e-10 * max(1.0, frob(Q)):
        raise StructureError("Q not Hermitian")
    lam = np.linalg.eigvalsh(Qh)
    if lam[0] <= tol.psd_tol * abs(lam[-1]):
        raise StructureError(f"Q not positive definite: lambda_min = {lam[0]:.3e}")
    return DHSystem(J=J, R=R, Q=Q, real_flag=bool(real_flag), tol=tol)


def stability_class(sys: DHSystem) -> str:
    """'asymptotically_stable' or 'marginally_stable'.

    DH systems cannot be unstable; an eigenvalue with real part beyond
    tolerance in the right half-plane indicates inconsistent input.
    """
    A = sys.A
    evals = np.linalg.eigvals(A)
    scale = max(1.0, numkit.spec_norm(A))
    margin = sys.tol.psd_tol * scale
    re_max = float(np.max(evals.real))
    if re_max > 1e-8 * scale:
        raise DissmapError(
            f"eigenvalue with positive real part {re_max:.3e}: not a DH operator"
        )
    return "asymptotically_stable" if re_max < -margin else "marginally_stable"


def _resolvent_factor(sys: DHSystem, w: float):
    """LU factorization of iw I - (J-R)Q with a conditioning guard."""
    Rw = 1j * w * np.eye(sys.n) - sys.A
    s = np.linalg.svd(Rw, compute_uv=False)
    if s[-1] <= 0.0 or s[0] / s[-1] > 1e-3 / _EPS:
        raise FrequencyError(f"frequency {w} is (numerically) on the spectrum")
    return Rw, scipy.linalg.lu_factor(Rw)


def transfer_G(sys: DHSystem, rst: Restriction, w: float) -> np.ndarray:
    """Transfer function C Q (iw I - (J-R)Q)^(-1) B."""
    B = as_matrix(rst.B)
    C = as_matrix(rst.effective_C())
    _, lu = _resolvent_factor(sys, w)
    return C @ sys.Q @ scipy.linalg.lu_solve(lu, B)


def omega_basis(sys: DHSystem, rst: Restriction, w: float) -> OmegaBasis | None:
    """Basis of the admissible subspace at frequency w.

    Returns None when the null space is trivial. W is built from the gram
    U* Q B B* Q U, positive definite whenever iw is off the spectrum.
    """
    B = as_matrix(rst.B)
    f = numkit.reduced_svd(B, sys.tol)
    if f.rank < B.shape[1]:
        raise StructureError("B must have full column rank")
    Rw = 1j * w * np.eye(sys.n) - sys.A
    if f.rank == sys.n:
        # B spans the whole state space: every direction is admissible
        U = np.eye(sys.n, dtype=complex)
    else:
        # orthonormal projector from the SVD keeps the noise floor at
        # eps * ||Rw|| instead of eps * cond(B) * ||Rw||
        PB = np.eye(sys.n) - f.U1 @ f.U1.conj().T
        U = numkit.null_space_basis(PB @ Rw, sys.tol)
    if U.shape[1] == 0:
        return None
    BsQU = B.conj().T @ sys.Q @ U
    gram = BsQU.conj().T @ BsQU
    gram = (gram + gram.conj().T) / 2.0
    W = numkit.cholesky_factor(gram, sys.tol)
    return OmegaBasis(w=float(w), U=U, W=W)


def random_dh(seed: int, n: int, real_flag: bool = False,
              tol: TolerancePolicy = DEFAULT_TOL) -> DHSystem:
    """Seeded random DH system: Gaussian draws projected on the feasible
    set, with Q regularized to be safely positive definite."""
    if n < 1:
        raise ShapeError("n must be >= 1")
    rng = np.random.default_rng(seed)

    def draw():
        M = rng.standard_normal((n, n))
        if not real_flag:
            M = M + 1j * rng.standard_normal((n, n))
        return M

    A = draw()
    S = draw()
    T = draw()
    J = (A - A.conj().T) / 2.0
    R = S @ S.conj().T
    Q = T @ T.conj().T + 1e-3 * np.eye(n)
    return validate_dh(J, R, Q, real_flag=real_flag, tol=tol)
