"""Dissipative mapping problems.

Given matrices X, Y of the same shape, a dissipative mapping is a square
Delta with Delta @ X = Y and Delta + Delta* positive semidefinite. This
module provides existence tests, two full parameterizations of the
solution set, the unique minimal-Frobenius-norm solution, the real
variant, and skew-Hermitian mappings as a sub-solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numkit
from .errors import (
    DefinitenessError,
    FeasibilityError,
    ParameterError,
    ShapeError,
)
from .numkit import DEFAULT_TOL, SVDFactors, TolerancePolicy, as_matrix, frob


@dataclass(frozen=True)
class MappingProblem:
    """An (X, Y) pair with cached SVD factors of X.

    Immutable; safe to share across threads.
    """

    X: np.ndarray
    Y: np.ndarray
    svd: SVDFactors
    Xdag: np.ndarray
    PX: np.ndarray
    tol: TolerancePolicy

    @property
    def n(self) -> int:
        return self.X.shape[0]


def mapping_problem(X, Y, tol: TolerancePolicy = DEFAULT_TOL) -> MappingProblem:
    X = as_matrix(X)
    Y = as_matrix(Y)
    if X.shape != Y.shape:
        raise ShapeError(f"X and Y shapes differ: {X.shape} vs {Y.shape}")
    if X.shape[0] == 0:
        raise ShapeError("empty problem")
    f = numkit.reduced_svd(X, tol)
    Xdag = (f.V1 / f.Sigma1) @ f.U1.conj().T if f.rank else np.zeros(
        (X.shape[1], X.shape[0]), dtype=np.complex128
    )
    PX = np.eye(X.shape[0], dtype=np.complex128) - X @ Xdag
    return MappingProblem(X=X, Y=Y, svd=f, Xdag=Xdag, PX=PX, tol=tol)


@dataclass(frozen=True)
class FamilyParams:
    """Free parameters (K, G, Z) of either characterization."""

    K: np.ndarray
    G: np.ndarray
    Z: np.ndarray
    variant: str = "first"


@dataclass(frozen=True)
class MappingSolution:
    delta: np.ndarray
    frob_norm_sq: float
    feasible: bool
    residual: float
    lambda_min: float


@dataclass(frozen=True)
class ExistsResult:
    exists: bool
    range_ok: bool
    psd_ok: bool
    range_residual: float
    min_eig: float

    def __bool__(self) -> bool:
        return self.exists


def _solution(delta: np.ndarray, Y: np.ndarray, X: np.ndarray,
              tol: TolerancePolicy, norm_sq: float | None = None) -> MappingSolution:
    residual = frob(delta @ X - Y)
    lam = numkit.min_eig_herm(delta + delta.conj().T)
    feasible = (
        residual <= tol.residual_tol * max(1.0, frob(Y))
        and lam >= -tol.psd_tol * max(1.0, numkit.spec_norm(delta))
    )
    if norm_sq is None:
        norm_sq = frob(delta) ** 2
    return MappingSolution(
        delta=delta,
        frob_norm_sq=float(norm_sq),
        feasible=bool(feasible),
        residual=float(residual),
        lambda_min=float(lam),
    )


def dissipative_exists(p: MappingProblem) -> ExistsResult:
    """Existence test: Y X^+ X = Y (range) and X*Y + Y*X PSD."""
    range_residual = frob(p.Y @ p.Xdag @ p.X - p.Y)
    range_ok = range_residual <= p.tol.residual_tol * max(1.0, frob(p.Y))
    S = p.X.conj().T @ p.Y
    S = S + S.conj().T
    S = (S + S.conj().T) / 2.0
    min_eig = numkit.min_eig_herm(S) if S.size else 0.0
    psd_ok = min_eig >= -p.tol.psd_tol * max(1.0, numkit.spec_norm(S))
    return ExistsResult(
        exists=bool(range_ok and psd_ok),
        range_ok=bool(range_ok),
        psd_ok=bool(psd_ok),
        range_residual=float(range_residual),
        min_eig=float(min_eig),
    )


def min_norm_sq_closed_form(p: MappingProblem) -> float:
    """Closed-form squared Frobenius norm of the canonical dissipative map
    returned by min_norm_dissipative: 2 ||YX+||^2 - tr((YX+)* XX+ (YX+))."""
    YXd = p.Y @ p.Xdag
    XXd = p.X @ p.Xdag
    return float(
        2.0 * frob(YXd) ** 2 - np.trace(YXd.conj().T @ XXd @ YXd).real
    )


def min_norm_dissipative(p: MappingProblem) -> MappingSolution:
    """The canonical small-norm dissipative mapping YX+ - (YX+)* P_X.

    This is the unique solution whose Hermitian part vanishes on the
    complement of range(X); it attains the closed-form norm from
    min_norm_sq_closed_form. Every dissipative mapping satisfies
    ||Delta||_F >= ||YX+||_F, and this map is the global Frobenius
    minimizer whenever the coupling block U2*(YX+)U1 vanishes or the
    compressed Hermitian part U1*(YX+ + (YX+)*)U1 is singular along it;
    in general a slightly smaller dissipative solution can exist.
    """
    ex = dissipative_exists(p)
    if not ex:
        raise FeasibilityError(
            "no dissipative mapping exists",
            diagnostics={
                "range_ok": ex.range_ok,
                "psd_ok": ex.psd_ok,
                "range_residual": ex.range_residual,
                "min_eig": ex.min_eig,
            },
        )
    YXd = p.Y @ p.Xdag
    delta = YXd - YXd.conj().T @ p.PX
    return _solution(delta, p.Y, p.X, p.tol, norm_sq=min_norm_sq_closed_form(p))


def min_norm_dissipative_vector(x, y, tol: TolerancePolicy = DEFAULT_TOL) -> MappingSolution:
    """Canonical small-norm dissipative map for the vector case (m = 1):
    yx*/|x|^2 - xy*/|x|^2 + (y*x) xx*/|x|^4, with the closed-form norm."""
    x = np.asarray(x, dtype=np.complex128).reshape(-1)
    y = np.asarray(y, dtype=np.complex128).reshape(-1)
    if x.shape != y.shape:
        raise ShapeError("x and y must have the same length")
    nx = np.linalg.norm(x)
    ny = np.linalg.norm(y)
    if nx == 0.0 or ny == 0.0:
        raise ShapeError("vector case requires nonzero x and y")
    xy = np.vdot(x, y)  # x* y
    if xy.real < -tol.psd_tol * nx * ny:
        raise FeasibilityError(
            "Re(x* y) < 0: no dissipative mapping", diagnostics={"re_xy": xy.real}
        )
    nx2 = nx * nx
    delta = (
        np.outer(y, x.conj()) / nx2
        - np.outer(x, y.conj()) / nx2
        + np.conj(xy) * np.outer(x, x.conj()) / (nx2 * nx2)
    )
    norm_sq = 2.0 * ny * ny / nx2 - abs(xy) ** 2 / (nx2 * nx2)
    return _solution(delta, y[:, None], x[:, None], tol, norm_sq=norm_sq)


# ---------------------------------------------------------------------------
# first characterization
# ---------------------------------------------------------------------------

def _first_blocks(p: MappingProblem):
    """Fixed blocks of the first characterization in the U = [U1 U2] frame."""
    U1, U2 = p.svd.U1, p.svd.U2
    YXd = p.Y @ p.Xdag
    A11 = U1.conj().T @ YXd @ U1
    A21 = U2.conj().T @ YXd @ U1
    A12fix = U1.conj().T @ YXd.conj().T @ U2
    N1 = A11 + A11.conj().T
    N1 = (N1 + N1.conj().T) / 2.0
    return YXd, A11, A21, A12fix, N1


def validate_first_params(p: MappingProblem, params: FamilyParams) -> list[str]:
    """Check the constraints of the first characterization.

    Returns an empty list when the parameters are admissible, otherwise the
    names of the violated conditions. The semidefinite coupling between K
    and Z is checked in its exact block form (Schur complement against the
    restriction of Y X^+ to the range of X).
    """
    violations = []
    K = as_matrix(params.K)
    G = as_matrix(params.G)
    Z = as_matrix(params.Z)
    n = p.n
    if K.shape != (n, n) or G.shape != (n, n) or Z.shape != (n, n):
        raise ShapeError("K, G, Z must be n x n")

    herm_dev = frob(K - K.conj().T)
    if herm_dev > 1e-10 * max(1.0, frob(K)):
        violations.append("cond1: K not Hermitian")
    else:
        Kh = (K + K.conj().T) / 2.0
        lam = numkit.min_eig_herm(Kh)
        if lam < -p.tol.psd_tol * max(1.0, numkit.spec_norm(Kh)):
            violations.append("cond1: K not PSD")
    if frob(G + G.conj().T) > 1e-10 * max(1.0, frob(G)):
        violations.append("cond1: G not skew-Hermitian")

    YXd, _, A21, _, N1 = _first_blocks(p)
    U1, U2 = p.svd.U1, p.svd.U2
    W = U2.conj().T @ (2.0 * YXd + Z.conj().T) @ U1
    if W.size:
        N1dag = numkit.pseudoinverse(N1, p.tol)
        proj_onto_range = N1 @ N1dag
        gap = frob(W @ (np.eye(N1.shape[0]) - proj_onto_range))
        if gap > p.tol.residual_tol * max(1.0, frob(W)):
            violations.append("cond2: null-space inclusion fails")
        Kblk = U2.conj().T @ K @ U2
        Kblk = (Kblk + Kblk.conj().T) / 2.0
        schur = Kblk - 0.5 * W @ N1dag @ W.conj().T
        schur = (schur + schur.conj().T) / 2.0
        lam = numkit.min_eig_herm(schur)
        if lam < -p.tol.psd_tol * max(1.0, numkit.spec_norm(schur)):
            violations.append("cond3: Schur condition fails")
    return violations


def minimal_first_params(p: MappingProblem) -> FamilyParams:
    """Parameters (K=0, G=0, Z) reproducing the minimal-norm mapping."""
    n = p.n
    U1, U2 = p.svd.U1, p.svd.U2
    YXd = p.Y @ p.Xdag
    Z = -2.0 * U1 @ U1.conj().T @ YXd.conj().T @ U2 @ U2.conj().T
    zero = np.zeros((n, n), dtype=np.complex128)
    return FamilyParams(K=zero, G=zero, Z=Z, variant="first")


def family_member_first(p: MappingProblem, params: FamilyParams) -> MappingSolution:
    """A member of the first characterization's solution set."""
    ex = dissipative_exists(p)
    if not ex:
        raise FeasibilityError("problem infeasible", diagnostics={"range_ok": ex.range_ok, "psd_ok": ex.psd_ok})
    violations = validate_first_params(p, params)
    if violations:
        raise ParameterError("invalid family parameters", violations=violations)
    U1, U2 = p.svd.U1, p.svd.U2
    _, A11, A21, A12fix, _ = _first_blocks(p)
    Z = as_matrix(params.Z)
    K = as_matrix(params.K)
    G = as_matrix(params.G)
    A12 = A12fix + U1.conj().T @ Z @ U2
    A22 = U2.conj().T @ (K + G) @ U2
    U = np.hstack([U1, U2])
    block = np.block([[A11, A12], [A21, A22]])
    delta = U @ block @ U.conj().T
    return _solution(delta, p.Y, p.X, p.tol)


def sample_first_member(p: MappingProblem, rng: np.random.Generator,
                        scale: float = 1.0) -> tuple[FamilyParams, float]:
    """Draw a random admissible (K, G, Z) and return it with the member's
    squared Frobenius norm (computed from the blocks, nothing formed)."""
    U1, U2 = p.svd.U1, p.svd.U2
    pk = p.svd.rank
    q = p.n - pk
    _, A11, A21, A12fix, N1 = _first_blocks(p)
    N1dag = numkit.pseudoinverse(N1, p.tol)
    proj = N1 @ N1dag

    def crand(r, c):
        return (rng.standard_normal((r, c)) + 1j * rng.standard_normal((r, c))) * scale

    V = crand(q, pk) @ proj if q and pk else np.zeros((q, pk), dtype=np.complex128)
    S12 = (V - A21).conj().T
    Z = 2.0 * U1 @ S12 @ U2.conj().T
    S0 = crand(q, q)
    Kblk = 2.0 * V @ N1dag @ V.conj().T + S0 @ S0.conj().T
    Kblk = (Kblk + Kblk.conj().T) / 2.0
    G0 = crand(q, q)
    G0 = (G0 - G0.conj().T) / 2.0
    K = U2 @ Kblk @ U2.conj().T
    G = U2 @ G0 @ U2.conj().T
    A12 = A12fix + 2.0 * S12
    norm_sq = (
        frob(A11) ** 2 + frob(A21) ** 2 + frob(A12) ** 2 + frob(Kblk + G0) ** 2
    )
    return FamilyParams(K=K, G=G, Z=Z, variant="first"), float(norm_sq)


# ---------------------------------------------------------------------------
# skew-Hermitian mappings
# ---------------------------------------------------------------------------

def _skew_check(p: MappingProblem):
    S = p.X.conj().T @ p.Y
    dev = frob(S + S.conj().T)
    if dev > p.tol.residual_tol * max(1.0, frob(S)):
        raise FeasibilityError(
            "X*Y not skew-Hermitian: no skew mapping", diagnostics={"skew_dev": dev}
        )
    range_residual = frob(p.Y @ p.Xdag @ p.X - p.Y)
    if range_residual > p.tol.residual_tol * max(1.0, frob(p.Y)):
        raise FeasibilityError(
            "range condition Y X^+ X = Y fails",
            diagnostics={"range_residual": range_residual},
        )


def skew_family_member(X, Y, Z_skew, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Member of the skew-Hermitian mapping family for parameter Z."""
    p = mapping_problem(X, Y, tol)
    _skew_check(p)
    Z = as_matrix(Z_skew)
    if frob(Z + Z.conj().T) > 1e-10 * max(1.0, frob(Z)):
        raise ParameterError("Z must be skew-Hermitian")
    YXd = p.Y @ p.Xdag
    return (
        YXd
        - YXd.conj().T
        + p.Xdag.conj().T @ (p.X.conj().T @ p.Y) @ p.Xdag
        + p.PX @ Z @ p.PX
    )


def skew_min_map(X, Y, tol: TolerancePolicy = DEFAULT_TOL) -> MappingSolution:
    """Minimal-norm skew-Hermitian mapping (the Z = 0 family member)."""
    p = mapping_problem(X, Y, tol)
    _skew_check(p)
    delta = skew_family_member(p.X, p.Y, np.zeros((p.n, p.n)), tol)
    return _solution(delta, p.Y, p.X, tol)


# ---------------------------------------------------------------------------
# real dissipative mappings
# ---------------------------------------------------------------------------

def real_min_norm_dissipative(X, Y, tol: TolerancePolicy = DEFAULT_TOL) -> MappingSolution:
    """Minimal-norm real dissipative mapping for possibly complex (X, Y).

    Works on the doubled pair ([X conj(X)], [Y conj(Y)]); the resulting
    minimal map is real up to roundoff and is truncated to exactly real.
    """
    X = as_matrix(X)
    Y = as_matrix(Y)
    CX = np.hstack([X, X.conj()])
    CY = np.hstack([Y, Y.conj()])
    dp = mapping_problem(CX, CY, tol)
    sol = min_norm_dissipative(dp)
    imag_mag = float(np.max(np.abs(sol.delta.imag))) if sol.delta.size else 0.0
    if imag_mag > 1e-10 * max(1.0, frob(sol.delta)):
        raise FeasibilityError(
            "computed map is not real", diagnostics={"imag_mag": imag_mag}
        )
    delta = np.ascontiguousarray(sol.delta.real)
    residual = frob(delta @ X - Y)
    feasible = (
        residual <= tol.residual_tol * max(1.0, frob(Y))
        and sol.lambda_min >= -tol.psd_tol * max(1.0, numkit.spec_norm(delta))
    )
    return MappingSolution(
        delta=delta,
        frob_norm_sq=sol.frob_norm_sq,
        feasible=bool(feasible),
        residual=float(residual),
        lambda_min=sol.lambda_min,
    )


# ---------------------------------------------------------------------------
# second characterization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SecondCharBase:
    """Base point H of the second characterization with M and its Cholesky
    factor; H + H* = B B* with B = Y M1 + (Y X^+)* X M1."""

    H: np.ndarray
    M: np.ndarray
    M1: np.ndarray


def second_char_base(p: MappingProblem) -> SecondCharBase:
    """Base mapping of the second characterization; needs X*Y + Y*X > 0."""
    S = p.X.conj().T @ p.Y
    S = S + S.conj().T
    S = (S + S.conj().T) / 2.0
    lam = np.linalg.eigvalsh(S)
    if lam[0] <= p.tol.psd_tol * max(1.0, abs(lam[-1])):
        raise DefinitenessError(
            "X*Y + Y*X not positive definite; use the first characterization"
        )
    range_residual = frob(p.Y @ p.Xdag @ p.X - p.Y)
    if range_residual > p.tol.residual_tol * max(1.0, frob(p.Y)):
        raise FeasibilityError("range condition Y X^+ X = Y fails")
    M = np.linalg.inv(S)
    M = (M + M.conj().T) / 2.0
    M1 = numkit.cholesky_factor(M, p.tol)
    YXd = p.Y @ p.Xdag
    H = 0.5 * (YXd - YXd.conj().T) + 0.5 * (
        p.Y @ M @ p.Y.conj().T
        + p.Y @ M @ p.X.conj().T @ YXd
        + YXd.conj().T @ p.X @ M @ p.Y.conj().T
        + YXd.conj().T @ p.X @ M @ p.X.conj().T @ YXd
    )
    return SecondCharBase(H=H, M=M, M1=M1)


def second_char_member(base: SecondCharBase, p: MappingProblem,
                       params: FamilyParams) -> MappingSolution:
    """Member H + Htilde(K, G, Z) of the second characterization."""
    K = as_matrix(params.K)
    G = as_matrix(params.G)
    Z = as_matrix(params.Z)
    if not numkit.is_psd(K, p.tol):
        raise ParameterError("K must be Hermitian PSD")
    if frob(G + G.conj().T) > 1e-10 * max(1.0, frob(G)):
        raise ParameterError("G must be skew-Hermitian")
    P = p.PX
    XXd = p.X @ p.Xdag
    YXd = p.Y @ p.Xdag
    M = base.M
    XM = p.X @ M
    YM = p.Y @ M
    ZP = Z @ P
    PZs = P @ Z.conj().T
    Htil = 0.5 * (
        P @ K @ P
        + P @ G @ P
        - PZs @ XXd
        + XXd @ ZP
        + YM @ p.X.conj().T @ ZP
        + YXd.conj().T @ XM @ p.X.conj().T @ ZP
        + PZs @ XM @ p.Y.conj().T
        + PZs @ XM @ p.X.conj().T @ YXd
        + PZs @ XM @ p.X.conj().T @ ZP
    )
    return _solution(base.H + Htil, p.Y, p.X, p.tol)
