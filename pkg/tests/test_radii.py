import math

import numpy as np
import pytest

from dissmap import radii
from dissmap.dhsys import Restriction, random_dh, validate_dh
from dissmap.errors import NotApplicableError
from dissmap.numkit import frob

FAST = radii.SweepConfig(grid_points=201, multistarts=5, refine_iters=40)


def scalar_system(r):
    return validate_dh([[0.0]], [[r]], [[1.0]], real_flag=True)


IDRST = Restriction(B=np.eye(1))


def test_sweep_config_validation():
    with pytest.raises(ValueError):
        radii.SweepConfig(grid_points=2)
    with pytest.raises(ValueError):
        radii.SweepConfig(w_max=-1.0)
    sys_ = scalar_system(1.0)
    assert radii.SweepConfig().resolve_w_max(sys_) == pytest.approx(3.0)
    assert radii.SweepConfig(w_max=5.0).resolve_w_max(sys_) == 5.0


def test_frequency_minimize_quadratic_and_ties():
    w, v, sk = radii.frequency_minimize(lambda w: (w - 0.5) ** 2, FAST, 2.0)
    assert v == pytest.approx(0.0, abs=1e-12)
    assert w == pytest.approx(0.5, abs=1e-6)
    assert sk == 0
    # symmetric objective: tie resolves toward negative w at equal |w|
    w, _, _ = radii.frequency_minimize(lambda w: (abs(w) - 1.0) ** 2, FAST, 2.0)
    assert w < 0


def test_frequency_minimize_skips_nonfinite():
    w, v, sk = radii.frequency_minimize(
        lambda w: np.inf if abs(w) < 0.25 else abs(w), FAST, 1.0)
    assert sk > 0 and np.isfinite(v)


def test_unstructured_scalar_oracle():
    rep = radii.unstructured_radius_complex(scalar_system(0.7), IDRST, FAST)
    assert rep.value == pytest.approx(0.7 / math.sqrt(2), abs=1e-6)
    assert rep.w_star == pytest.approx(0.0, abs=1e-6)
    assert rep.certified and rep.certificate["eig_residual"] <= 1e-6
    dJ, dR = rep.certificate["delta_J"], rep.certificate["delta_R"]
    assert frob(dJ) ** 2 + frob(dR) ** 2 == pytest.approx(rep.value**2, rel=1e-8)


def test_unstructured_requires_stability():
    J = np.array([[0.0, -1.0], [1.0, 0.0]])
    sys_ = validate_dh(J, np.zeros((2, 2)), np.eye(2), real_flag=True)
    with pytest.raises(NotApplicableError):
        radii.unstructured_radius_complex(sys_, Restriction(B=np.eye(2)), FAST)


def test_eta_scalar_oracle_and_sandwich():
    sys_ = scalar_system(0.7)
    for w in (0.0, 0.5, 1.0):
        eta = radii.eta_complex(sys_, IDRST, w, FAST)
        expect = math.sqrt(w * w + 0.49)
        assert eta.optimized_value == pytest.approx(expect, abs=1e-8)
        assert eta.lower_bound <= eta.optimized_value * (1 + 1e-10)
        assert eta.optimized_value <= eta.upper_bound * (1 + 1e-10)
        assert eta.eig_residual <= 1e-8


def test_structured_scalar_certified():
    rep = radii.structured_radius_complex(scalar_system(0.7), IDRST, FAST)
    assert rep.value == pytest.approx(0.7, abs=1e-6)
    assert rep.certified and rep.w_star == pytest.approx(0.0, abs=1e-6)
    assert rep.omega_nontrivial_assumed


def test_unstructured_below_structured_random():
    for seed in range(3):
        sys_ = random_dh(seed, 3)
        rst = Restriction(B=np.eye(3))
        cfg = radii.SweepConfig(grid_points=81, multistarts=4, refine_iters=12)
        u = radii.unstructured_radius_complex(sys_, rst, cfg)
        s = radii.structured_radius_complex(sys_, rst, cfg)
        assert u.value <= s.value + 1e-8


def test_distance_to_singularity_scalar():
    rep = radii.distance_to_singularity(scalar_system(0.7), IDRST, FAST)
    assert rep.value == pytest.approx(0.7, abs=1e-8)
    assert rep.w_star == 0.0


def test_mu_real_matrix_is_sigma_max():
    rng = np.random.default_rng(0)
    for n in (1, 3, 5):
        M = rng.standard_normal((n, n))
        mu = radii.mu_real_2(M)
        assert mu.value == pytest.approx(np.linalg.svd(M, compute_uv=False)[0], rel=1e-8)
        assert not mu.boundary_limit


def test_mu_pure_imaginary_boundary():
    mu = radii.mu_real_2(np.array([[1j]]))
    assert mu.value == pytest.approx(0.0, abs=1e-6)
    assert mu.boundary_limit and mu.gamma_star == pytest.approx(1e-8)


def test_mu_F_sandwich():
    lo, hi = radii.mu_real_F_bounds(np.array([[2.0]]))
    assert lo == pytest.approx(math.sqrt(2.0)) and hi == pytest.approx(2.0)
    assert lo <= hi


def test_real_radius_bounds_scalar():
    rep = radii.unstructured_radius_real(scalar_system(0.7), IDRST, FAST)
    assert rep.kind == "unstructured_R_bounds"
    assert rep.lower == pytest.approx(0.7 / math.sqrt(2), abs=1e-6)
    assert rep.upper == pytest.approx(0.7, abs=1e-6)


def test_eta_real_scalar_no_candidate_off_axis():
    # real 1x1 system: a real perturbation cannot move the eigenvalue to 0.5i
    eta = radii.eta_real(scalar_system(0.7), IDRST, 0.5, FAST)
    assert eta.no_candidate


def test_structured_real_scalar():
    rep = radii.structured_radius_real(scalar_system(0.7), IDRST, FAST)
    assert rep.value == pytest.approx(0.7, abs=1e-6)
    assert rep.certified and rep.w_star == pytest.approx(0.0, abs=1e-6)


def test_eta_determinism():
    sys_ = random_dh(1, 3)
    rst = Restriction(B=np.eye(3))
    a = radii.eta_complex(sys_, rst, 0.4, FAST)
    b = radii.eta_complex(sys_, rst, 0.4, FAST)
    assert a.optimized_value == b.optimized_value
    assert np.array_equal(a.delta_J, b.delta_J)
