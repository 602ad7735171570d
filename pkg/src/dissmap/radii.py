"""Distances to asymptotic instability for DH systems.

Unstructured complex/real stability radii, structured eigenvalue backward
errors with certificate perturbations, structured radius bounds, the real
mu function, and the shared frequency / gamma optimizers.

The infima over frequency and over the admissible subspace are nonconvex;
the sweeps use seeded grids with golden-section refinement and seeded
multistart simplex descent, so identical configurations give identical
reports. Per-frequency singular-value bounds are exact; optimized values
are upper bounds on the per-frequency infimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.optimize

from . import kernels, numkit
from .dhsys import DHSystem, Restriction, omega_basis, transfer_G
from .errors import (
    FrequencyError,
    NoCandidateError,
    NotApplicableError,
    ShapeError,
    StructureError,
)
from .mappings import min_norm_dissipative_vector, real_min_norm_dissipative
from .numkit import frob, spec_norm

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SweepConfig:
    """Frequency/gamma sweep parameters; None w_max means 2 ||(J-R)Q|| + 1."""

    w_max: float | None = None
    grid_points: int = 2001
    refine_iters: int = 60
    multistarts: int = 20
    rng_seed: int = 0
    gamma_min: float = 1e-8
    gamma_points: int = 200

    def __post_init__(self):
        if self.grid_points < 3:
            raise ValueError("grid_points must be >= 3")
        if self.w_max is not None and self.w_max <= 0:
            raise ValueError("w_max must be positive")

    def resolve_w_max(self, sys: DHSystem) -> float:
        if self.w_max is not None:
            return self.w_max
        return 2.0 * spec_norm(sys.A) + 1.0


@dataclass(frozen=True)
class EtaResult:
    """Structured eigenvalue backward error at one frequency."""

    w: float
    lower_bound: float
    upper_bound: float
    optimized_value: float
    x_hat: np.ndarray | None
    delta_J: np.ndarray | None
    delta_R: np.ndarray | None
    equality_certified: bool
    eig_residual: float
    no_candidate: bool = False


@dataclass(frozen=True)
class RadiusReport:
    kind: str
    value: float | None
    lower: float | None
    upper: float | None
    w_star: float | None
    certificate: dict | None
    sweep: SweepConfig
    certified: bool
    skipped_frequencies: int = 0
    omega_nontrivial_assumed: bool = False


@dataclass(frozen=True)
class MuEval:
    value: float
    gamma_star: float
    boundary_limit: bool


# ---------------------------------------------------------------------------
# generic 1-D minimizers
# ---------------------------------------------------------------------------

def _golden_refine(f, lo, hi, iters, best):
    """Golden-section shrink on [lo, hi]; returns the best (value, point)
    over all evaluations, seeded with `best`. Non-finite values are kept
    out of the running minimum but still shrink the bracket."""
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    best = min(best, (fc, abs(c), c), (fd, abs(d), d))
    for _ in range(iters):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
            best = min(best, (fc, abs(c), c))
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
            best = min(best, (fd, abs(d), d))
    return best


def frequency_minimize(f, cfg: SweepConfig, w_max: float):
    """Symmetric grid scan plus golden-section refinement.

    Skips frequencies where f is non-finite; ties break toward smaller |w|,
    then toward negative w. Returns (w_star, f_min, skipped_count).
    """
    grid = np.linspace(-w_max, w_max, cfg.grid_points)
    vals = np.empty(cfg.grid_points)
    skipped = 0
    for i, w in enumerate(grid):
        v = f(float(w))
        if not np.isfinite(v):
            v = np.inf
            skipped += 1
        vals[i] = v
    if not np.any(np.isfinite(vals)):
        raise NoCandidateError("objective non-finite on the whole grid")
    # tie-break: value, then |w|, then prefer negative w
    best_i = min(range(cfg.grid_points), key=lambda i: (vals[i], abs(grid[i]), grid[i]))
    best = (vals[best_i], abs(grid[best_i]), float(grid[best_i]))
    lo = grid[max(best_i - 1, 0)]
    hi = grid[min(best_i + 1, cfg.grid_points - 1)]

    def safe(w):
        v = f(float(w))
        return v if np.isfinite(v) else np.inf

    best = _golden_refine(safe, float(lo), float(hi), cfg.refine_iters, best)
    return best[2], best[0], skipped


# ---------------------------------------------------------------------------
# unstructured complex radius
# ---------------------------------------------------------------------------

def _require_stable(sys: DHSystem):
    from .dhsys import stability_class

    if stability_class(sys) != "asymptotically_stable":
        raise NotApplicableError("system is only marginally stable")


def unstructured_radius_complex(sys: DHSystem, rst: Restriction,
                                cfg: SweepConfig = SweepConfig()) -> RadiusReport:
    """Unstructured stability radius: (1/sqrt 2) inf_w 1 / ||G(w)||."""
    _require_stable(sys)
    w_max = cfg.resolve_w_max(sys)

    def f(w):
        try:
            g = spec_norm(transfer_G(sys, rst, w))
        except FrequencyError:
            return np.inf
        return 1.0 / g if g > 0.0 else np.inf

    try:
        w_star, fmin, skipped = frequency_minimize(f, cfg, w_max)
    except NoCandidateError:
        return RadiusReport(
            kind="not_finite", value=None, lower=None, upper=None, w_star=None,
            certificate=None, sweep=cfg, certified=False,
        )
    value = fmin / math.sqrt(2.0)

    G = transfer_G(sys, rst, w_star)
    U, s, Vh = np.linalg.svd(G)
    u = U[:, 0]
    v = Vh[0].conj()
    delta = np.outer(v, u.conj()) / s[0]
    delta_J = delta / 2.0
    delta_R = -delta / 2.0
    B = numkit.as_matrix(rst.B)
    C = numkit.as_matrix(rst.effective_C())
    Rw = 1j * w_star * np.eye(sys.n) - sys.A
    x_hat = np.linalg.solve(Rw, B @ v)
    pert = sys.A + B @ (delta_J - delta_R) @ C @ sys.Q
    resid = np.linalg.norm(pert @ x_hat - 1j * w_star * x_hat) / np.linalg.norm(x_hat)
    cert = {
        "delta_J": delta_J,
        "delta_R": delta_R,
        "eig_residual": float(resid),
        "x_hat": x_hat,
    }
    return RadiusReport(
        kind="unstructured_C", value=float(value), lower=None, upper=None,
        w_star=float(w_star), certificate=cert, sweep=cfg,
        certified=bool(resid <= 1e-6), skipped_frequencies=skipped,
    )


# ---------------------------------------------------------------------------
# structured complex backward error and radius
# ---------------------------------------------------------------------------

def _eta_setup(sys: DHSystem, rst: Restriction, w: float):
    """Per-frequency matrices: P = B^+ Rw U, Qm = B* Q U, T = U* Q Rw U,
    and the sigma-min lower bound from P W^{-*}."""
    ob = omega_basis(sys, rst, w)
    if ob is None:
        raise NoCandidateError(f"trivial admissible subspace at w={w}")
    B = numkit.as_matrix(rst.B)
    Bdag = numkit.pseudoinverse(B, sys.tol)
    Rw = 1j * w * np.eye(sys.n) - sys.A
    U = ob.U
    P = Bdag @ Rw @ U
    Qm = B.conj().T @ sys.Q @ U
    T = U.conj().T @ sys.Q @ Rw @ U
    Winv_star = np.linalg.inv(ob.W.conj().T)
    PW = P @ Winv_star
    sv = np.linalg.svd(PW, compute_uv=False)
    lower = float(sv[-1])
    _, _, Vh = np.linalg.svd(PW)
    y_min = Vh[-1].conj()
    alpha0 = Winv_star @ y_min
    return ob, P, Qm, T, lower, alpha0


def _start_vectors(alpha0, k, cfg: SweepConfig, w: float):
    """Deterministic multistart seeds derived from (seed, w bits, index)."""
    v0 = np.concatenate([alpha0.real, alpha0.imag])
    n0 = np.linalg.norm(v0)
    starts = [v0 / n0 if n0 > 0 else np.ones(2 * k) / math.sqrt(2 * k)]
    wbits = int(np.float64(w).view(np.uint64))
    for j in range(1, cfg.multistarts):
        rng = np.random.default_rng([cfg.rng_seed, wbits, j])
        v = rng.standard_normal(2 * k)
        starts.append(v / np.linalg.norm(v))
    return starts


def _multistart_min(fun, starts, k):
    best_val = np.inf
    best_v = starts[0]
    for v0 in starts:
        res = scipy.optimize.minimize(
            fun, v0, method="Nelder-Mead",
            options={"maxiter": 120 * 2 * k, "xatol": 1e-10, "fatol": 1e-13},
        )
        cand = fun(res.x)
        if cand < best_val:
            best_val = cand
            best_v = res.x
    return best_val, best_v


def eta_complex(sys: DHSystem, rst: Restriction, w: float,
                cfg: SweepConfig = SweepConfig()) -> EtaResult:
    """Structured backward error for eigenvalue iw, complex perturbations.

    The sigma-min sandwich brackets the true infimum; the optimized value
    comes from seeded multistart simplex descent over the admissible
    subspace and always lands inside the sandwich.
    """
    ob, P, Qm, T, lower, alpha0 = _eta_setup(sys, rst, w)
    k = ob.dim

    def fun(v):
        return kernels.quotient_value(P, Qm, T, v)

    best_val, best_v = _multistart_min(fun, _start_vectors(alpha0, k, cfg, w), k)
    optimized = math.sqrt(max(best_val, 0.0))

    alpha = best_v[:k] + 1j * best_v[k:]
    alpha /= np.linalg.norm(alpha)
    x_hat = ob.U @ alpha
    B = numkit.as_matrix(rst.B)
    xs = Qm @ alpha
    ys = P @ alpha
    sol = min_norm_dissipative_vector(xs, ys, sys.tol)
    delta = sol.delta
    delta_J = (delta - delta.conj().T) / 2.0
    delta_R = -(delta + delta.conj().T) / 2.0
    RB = sys.R + B @ delta_R @ B.conj().T
    RB = (RB + RB.conj().T) / 2.0
    certified = numkit.is_psd(RB, sys.tol)
    pert = sys.A + B @ (delta_J - delta_R) @ B.conj().T @ sys.Q
    resid = np.linalg.norm(pert @ x_hat - 1j * w * x_hat) / np.linalg.norm(x_hat)
    return EtaResult(
        w=float(w), lower_bound=lower, upper_bound=math.sqrt(2.0) * lower,
        optimized_value=float(optimized), x_hat=x_hat,
        delta_J=delta_J, delta_R=delta_R,
        equality_certified=bool(certified), eig_residual=float(resid),
    )


def _eta_sweep(sys: DHSystem, rst: Restriction, cfg: SweepConfig, eta_fn):
    """Shared frequency sweep for structured radii.

    Scans the sigma-min lower bound on the grid first; since every
    optimized value dominates its own lower bound, frequencies whose bound
    already exceeds the current best optimized value cannot improve the
    minimum and are skipped. Golden-section refinement then polishes w.
    """
    _require_stable(sys)
    B = numkit.as_matrix(rst.B)
    if numkit.reduced_svd(B, sys.tol).rank < B.shape[1]:
        raise StructureError("restriction matrix B must have full column rank")
    w_max = cfg.resolve_w_max(sys)
    grid = np.linspace(-w_max, w_max, cfg.grid_points)
    lowers = np.empty(cfg.grid_points)
    skipped = 0
    for i, w in enumerate(grid):
        try:
            _, _, _, _, lower, _ = _eta_setup(sys, rst, float(w))
            lowers[i] = lower
        except (NoCandidateError, FrequencyError):
            lowers[i] = np.inf
            skipped += 1
    if not np.any(np.isfinite(lowers)):
        raise NoCandidateError("admissible subspace trivial over the whole sweep")

    order = sorted(range(cfg.grid_points), key=lambda i: (lowers[i], abs(grid[i]), grid[i]))
    best = (np.inf, np.inf, 0.0)
    best_eta = None
    for i in order:
        if lowers[i] >= best[0]:
            break
        try:
            eta = eta_fn(float(grid[i]))
        except (NoCandidateError, FrequencyError):
            continue
        if eta.no_candidate:
            continue
        key = (eta.optimized_value, abs(grid[i]), float(grid[i]))
        if key < best:
            best = key
            best_eta = eta

    if best_eta is None:
        raise NoCandidateError("no admissible candidate at any sweep frequency")

    cache = {best[2]: best_eta}

    def g(w):
        try:
            eta = eta_fn(float(w))
        except (NoCandidateError, FrequencyError):
            return np.inf
        if eta.no_candidate:
            return np.inf
        cache[float(w)] = eta
        return eta.optimized_value

    i_star = int(np.argmin(np.abs(grid - best[2])))
    lo = grid[max(i_star - 1, 0)]
    hi = grid[min(i_star + 1, cfg.grid_points - 1)]
    refined = _golden_refine(g, float(lo), float(hi), cfg.refine_iters, best)
    w_star = refined[2]
    eta = cache.get(w_star, best_eta)
    return eta, w_star, skipped


def structured_radius_complex(sys: DHSystem, rst: Restriction,
                              cfg: SweepConfig = SweepConfig()) -> RadiusReport:
    """Structured stability radius: inf over w of the backward error.

    The result is certified only when the minimizing frequency carries the
    equality certificate (R + B DeltaR B* stays PSD); otherwise the value
    is an (upper-bound-of-a-) lower bound estimate and is labeled so.
    """
    if rst.C is not None and frob(numkit.as_matrix(rst.C) - numkit.as_matrix(rst.B).conj().T) > 0:
        raise ShapeError("structured radius requires C = B*")
    eta, w_star, skipped = _eta_sweep(
        sys, rst, cfg, lambda w: eta_complex(sys, rst, w, cfg)
    )
    cert = {
        "delta_J": eta.delta_J,
        "delta_R": eta.delta_R,
        "eig_residual": eta.eig_residual,
        "x_hat": eta.x_hat,
    }
    certified = bool(eta.equality_certified and eta.eig_residual <= 1e-6)
    return RadiusReport(
        kind="structured_C", value=float(eta.optimized_value),
        lower=None, upper=None, w_star=float(w_star), certificate=cert,
        sweep=cfg, certified=certified, skipped_frequencies=skipped,
        omega_nontrivial_assumed=True,
    )


def distance_to_singularity(sys: DHSystem, rst: Restriction,
                            cfg: SweepConfig = SweepConfig()) -> RadiusReport:
    """Structured distance to singularity: the backward error at w = 0."""
    s = np.linalg.svd(sys.A, compute_uv=False)
    if s[-1] <= sys.n * np.finfo(float).eps * s[0]:
        return RadiusReport(
            kind="singularity_distance", value=0.0, lower=None, upper=None,
            w_star=0.0, certificate=None, sweep=cfg, certified=True,
        )
    eta = eta_complex(sys, rst, 0.0, cfg)
    cert = {
        "delta_J": eta.delta_J,
        "delta_R": eta.delta_R,
        "eig_residual": eta.eig_residual,
        "x_hat": eta.x_hat,
    }
    return RadiusReport(
        kind="singularity_distance", value=float(eta.optimized_value),
        lower=None, upper=None, w_star=0.0, certificate=cert, sweep=cfg,
        certified=bool(eta.equality_certified and eta.eig_residual <= 1e-6),
        omega_nontrivial_assumed=True,
    )


# ---------------------------------------------------------------------------
# real mu and real radii
# ---------------------------------------------------------------------------

def _mu_block_sigma2(ReM, ImM, gamma):
    blk = np.block([[ReM, -gamma * ImM], [ImM / gamma, ReM]])
    s = np.linalg.svd(blk, compute_uv=False)
    return float(s[1])


def mu_real_2(M, cfg: SweepConfig = SweepConfig()) -> MuEval:
    """Real structured singular value mu_{R,2} via the gamma-parameterized
    second largest singular value, minimized over gamma in (0, 1]."""
    M = numkit.as_matrix(M)
    if M.size == 0:
        raise ShapeError("empty matrix")
    ReM = np.ascontiguousarray(M.real)
    ImM = np.ascontiguousarray(M.imag)
    gammas = np.logspace(math.log10(cfg.gamma_min), 0.0, cfg.gamma_points)
    vals = np.array([_mu_block_sigma2(ReM, ImM, g) for g in gammas])
    i = int(np.argmin(vals))
    if i == 0 and vals[0] < vals[1] - 1e-12 * max(1.0, vals[1]):
        # infimum approached at the gamma -> 0 boundary; extrapolate linearly
        g0, g1 = gammas[0], gammas[1]
        limit = vals[0] - (vals[1] - vals[0]) / (g1 - g0) * g0
        return MuEval(value=float(max(limit, 0.0)), gamma_star=float(g0),
                      boundary_limit=True)

    def f(logg):
        return _mu_block_sigma2(ReM, ImM, 10.0 ** logg)

    lo = math.log10(gammas[max(i - 1, 0)])
    hi = math.log10(gammas[min(i + 1, cfg.gamma_points - 1)])
    best = (float(vals[i]), 0.0, math.log10(gammas[i]))
    best = _golden_refine(f, lo, hi, cfg.refine_iters, best)
    return MuEval(value=float(best[0]), gamma_star=float(10.0 ** best[2]),
                  boundary_limit=False)


def mu_real_F_bounds(M, cfg: SweepConfig = SweepConfig()) -> tuple[float, float]:
    """Sandwich for the Frobenius-norm real mu: mu_2/sqrt(2) <= mu_F <= mu_2."""
    mu = mu_real_2(M, cfg)
    return mu.value / math.sqrt(2.0), mu.value


def _require_real(sys: DHSystem, rst: Restriction):
    if not sys.real_flag:
        raise StructureError("real radius requires a real system (real_flag)")
    for name, M in (("B", rst.B), ("C", rst.effective_C())):
        if np.max(np.abs(numkit.as_matrix(M).imag), initial=0.0) > 0.0:
            raise StructureError(f"real radius requires real {name}")


def unstructured_radius_real(sys: DHSystem, rst: Restriction,
                             cfg: SweepConfig = SweepConfig()) -> RadiusReport:
    """Bounds on the real unstructured radius from the real mu sweep."""
    _require_stable(sys)
    _require_real(sys, rst)
    w_max = cfg.resolve_w_max(sys)

    def f(w):
        try:
            G = transfer_G(sys, rst, w)
        except FrequencyError:
            return np.inf
        mu = mu_real_2(G, cfg)
        if mu.value <= 0.0:
            return np.inf
        return 1.0 / mu.value

    try:
        w_star, fmin, skipped = frequency_minimize(f, cfg, w_max)
    except NoCandidateError:
        return RadiusReport(
            kind="not_finite", value=None, lower=None, upper=None, w_star=None,
            certificate=None, sweep=cfg, certified=False,
        )
    return RadiusReport(
        kind="unstructured_R_bounds", value=None,
        lower=float(fmin / math.sqrt(2.0)), upper=float(fmin),
        w_star=float(w_star), certificate=None, sweep=cfg, certified=False,
        skipped_frequencies=skipped,
    )


def eta_real(sys: DHSystem, rst: Restriction, w: float,
             cfg: SweepConfig = SweepConfig()) -> EtaResult:
    """Real structured backward error at iw.

    Minimizes the real minimal-map objective over admissible candidates
    that satisfy the realness side condition; candidates violating it are
    penalized out. Returns a no-candidate result when nothing admissible
    was found.
    """
    _require_real(sys, rst)
    ob, P, Qm, T, lower, alpha0 = _eta_setup(sys, rst, w)
    k = ob.dim
    U = ob.U
    QRQ = sys.Q @ sys.R @ sys.Q
    S1 = U.conj().T @ QRQ @ U
    S2 = U.T @ (1j * w * sys.Q + QRQ) @ U
    PENALTY = 1e30

    def fun(v):
        a = v[:k] + 1j * v[k:]
        na = np.linalg.norm(a)
        if na == 0.0:
            return PENALTY
        a /= na
        c1 = float(np.real(np.vdot(a, S1 @ a)))
        c2 = abs(a @ (S2 @ a))
        slack = 1e-10 * max(1.0, c1 + c2)
        if c1 < c2 - slack:
            return PENALTY * (1.0 + (c2 - c1))
        xs = Qm @ a
        ys = P @ a
        CX = np.stack([xs, xs.conj()], axis=1)
        CY = np.stack([ys, ys.conj()], axis=1)
        CXd = np.linalg.pinv(CX)
        YXd = CY @ CXd
        if frob(YXd @ CX - CY) > sys.tol.residual_tol * max(1.0, frob(CY)):
            return PENALTY
        val = 2.0 * frob(YXd) ** 2 - np.trace(
            YXd.conj().T @ (CX @ CXd) @ YXd
        ).real
        return max(val, 0.0)

    best_val, best_v = _multistart_min(fun, _start_vectors(alpha0, k, cfg, w), k)
    if best_val >= PENALTY:
        return EtaResult(
            w=float(w), lower_bound=lower, upper_bound=np.inf,
            optimized_value=np.inf, x_hat=None, delta_J=None, delta_R=None,
            equality_certified=False, eig_residual=np.inf, no_candidate=True,
        )
    optimized = math.sqrt(max(best_val, 0.0))
    alpha = best_v[:k] + 1j * best_v[k:]
    alpha /= np.linalg.norm(alpha)
    x_hat = U @ alpha
    xs = Qm @ alpha
    ys = P @ alpha
    B = numkit.as_matrix(rst.B).real
    sol = real_min_norm_dissipative(xs[:, None], ys[:, None], sys.tol)
    delta = sol.delta
    delta_J = (delta - delta.T) / 2.0
    delta_R = -(delta + delta.T) / 2.0
    RB = sys.R.real + B @ delta_R @ B.T
    RB = (RB + RB.T) / 2.0
    certified = numkit.is_psd(RB, sys.tol)
    pert = sys.A + B @ (delta_J - delta_R) @ B.T @ sys.Q
    resid = np.linalg.norm(pert @ x_hat - 1j * w * x_hat) / np.linalg.norm(x_hat)
    return EtaResult(
        w=float(w), lower_bound=lower, upper_bound=np.inf,
        optimized_value=float(optimized), x_hat=x_hat,
        delta_J=delta_J, delta_R=delta_R,
        equality_certified=bool(certified), eig_residual=float(resid),
    )


def structured_radius_real(sys: DHSystem, rst: Restriction,
                           cfg: SweepConfig = SweepConfig()) -> RadiusReport:
    """Real structured stability radius estimate via the eta_real sweep."""
    _require_real(sys, rst)
    eta, w_star, skipped = _eta_sweep(
        sys, rst, cfg, lambda w: eta_real(sys, rst, w, cfg)
    )
    cert = {
        "delta_J": eta.delta_J,
        "delta_R": eta.delta_R,
        "eig_residual": eta.eig_residual,
        "x_hat": eta.x_hat,
    }
    certified = bool(eta.equality_certified and eta.eig_residual <= 1e-6)
    return RadiusReport(
        kind="structured_R", value=float(eta.optimized_value),
        lower=None, upper=None, w_star=float(w_star), certificate=cert,
        sweep=cfg, certified=certified, skipped_frequencies=skipped,
        omega_nontrivial_assumed=True,
    )
