import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, linalg, special

from crackmodes import boundary_op
from crackmodes.acceptance import _cross_channel_max, _cross_parity_max, bessel_series_oracle
from crackmodes.asymptotics import q0_inverse_inner, q0_inverse_inner_disk_closed
from crackmodes.boundary_op import (
    BasisSpec2D,
    BasisSpec3D,
    _bessel_pair_over_t,
    assemble_q,
    assemble_q0,
    bessel_j,
    galerkin_block,
    rank_one_vector,
    symbol_residual_matrix,
)
from crackmodes.errors import OnEssentialSpectrum
from crackmodes.spectral import make_basis, mu_values

from oracles import BESSEL

CLASSES = ("s", "as", "m=0", "m=1", "m=-2")


# ---------------------------------------------------------------------------
# Bessel functions


def test_bessel_frozen_values():
    for (m, x), ref in BESSEL.items():
        assert bessel_j(m, x) == pytest.approx(ref, abs=1e-14, rel=1e-12)


def test_bessel_at_origin():
    assert bessel_j(0, 0.0) == 1.0
    assert all(bessel_j(m, 0.0) == 0.0 for m in range(1, 21))


@given(st.integers(0, 20), st.floats(0.0, 40.0))
def test_bessel_against_ascending_series(m, x):
    assert abs(bessel_j(m, x) - bessel_series_oracle(m, x)) < 1e-10


@given(st.integers(-20, 20), st.floats(0.0, 30.0))
def test_bessel_against_integral_representation(m, x):
    # the periodic trapezoid rule is spectrally accurate for (1/2pi) int e^{-imt} e^{ix sin t} dt
    t = 2 * np.pi * np.arange(256) / 256
    ref = np.mean(np.exp(1j * (x * np.sin(t) - m * t))).real
    assert abs(bessel_j(m, x) - ref) < 1e-12


@given(st.integers(0, 20), st.floats(40.0, 5000.0))
def test_bessel_large_argument(m, x):
    assert abs(bessel_j(m, x) - special.jv(m, x)) < 1e-10


@given(st.integers(1, 20), st.floats(-30.0, 30.0))
def test_bessel_reflection(m, x):
    assert bessel_j(-m, x) == pytest.approx((-1) ** m * bessel_j(m, x), abs=1e-15)
    assert bessel_j(m, -x) == pytest.approx((-1) ** m * bessel_j(m, x), abs=1e-15)


def test_bessel_domain():
    with pytest.raises(ValueError):
        bessel_j(21, 1.0)
    with pytest.raises(ValueError):
        bessel_j(0, float("inf"))


# ---------------------------------------------------------------------------
# bases and Q0


def weber_schafheitlin(a, b):
    if a == b:
        return 1.0 / (2 * a)
    return 2 * math.sin(0.5 * math.pi * (a - b)) / (math.pi * (a * a - b * b))


def test_bessel_pair_integral_brute_force():
    orders = (1.0, 2.0, 3.0, 2.5, 4.5)
    got = _bessel_pair_over_t(orders)
    for i, a in enumerate(orders):
        for j, b in enumerate(orders):
            assert got[i, j] == pytest.approx(weber_schafheitlin(a, b), abs=1e-6)


@pytest.mark.parametrize("label", CLASSES)
def test_q0_quadrature_matches_closed_form(label):
    b = make_basis(label, 6)
    closed = assemble_q0(b)
    quad = assemble_q0(b, method="quadrature")
    assert np.max(np.abs(quad - closed)) <= 1e-6 * np.max(np.abs(closed))


def test_q0_rejects_unknown_method():
    with pytest.raises(ValueError):
        assemble_q0(BasisSpec2D(4), method="nope")


@pytest.mark.parametrize("n", [0, 1, 2, 5])
def test_strip_transform_by_quadrature(n):
    basis = BasisSpec2D(N=4, parity="s" if n % 2 == 0 else "as")
    k = n // 2
    x, w = special.roots_chebyu(200)
    for xi in (0.3, 2.0, 7.5):
        ref = np.sum(w * special.eval_chebyu(n, x) * np.exp(-1j * x * xi)) / math.sqrt(2 * math.pi)
        assert basis.transform(np.array([xi]))[k, 0] == pytest.approx(ref, abs=1e-12)


@pytest.mark.parametrize("m", [0, 1, -2])
def test_disk_hankel_transform_by_quadrature(m):
    basis = BasisSpec3D(m=m, N=4)
    for rho in (0.5, 3.0, 11.0):
        for k in range(4):
            ref = integrate.quad(lambda r: basis.radial(r)[k] * special.jv(abs(m), rho * r) * r, 0, 1, limit=200)[0]
            assert basis.hankel(np.array([rho]))[k, 0] == pytest.approx(ref, abs=1e-10)


@pytest.mark.parametrize("label", CLASSES)
def test_mass_matrix_by_quadrature(label):
    b = make_basis(label, 4)
    M = b.mass_matrix()
    for i in range(4):
        for j in range(4):
            if isinstance(b, BasisSpec2D):
                ref = integrate.quad(lambda x: b.evaluate(x)[i] * b.evaluate(x)[j], -1, 1)[0]
            else:
                ref = 2 * math.pi * integrate.quad(lambda r: b.radial(r)[i] * b.radial(r)[j] * r, 0, 1)[0]
            assert M[i, j] == pytest.approx(ref, abs=1e-10)


def test_load_vectors_of_leading_profiles():
    s = BasisSpec2D(8, "s").load_vector(lambda x: np.ones_like(x))
    a = BasisSpec2D(8, "as").load_vector(lambda x: x)
    assert s[0] == pytest.approx(math.pi / 2) and np.allclose(s[1:], 0, atol=1e-14)
    assert a[0] == pytest.approx(math.pi / 4) and np.allclose(a[1:], 0, atol=1e-14)


def test_explicit_inverse_values():
    assert q0_inverse_inner(BasisSpec2D(32, "s")) == pytest.approx(math.pi / 2, abs=1e-6)
    assert q0_inverse_inner(BasisSpec2D(32, "as")) == pytest.approx(math.pi / 16, abs=1e-6)


@pytest.mark.parametrize("m", [-3, -1, 0, 1, 2, 3])
def test_disk_inverse_values_closed_form(m):
    assert q0_inverse_inner(BasisSpec3D(m, 16)) == pytest.approx(q0_inverse_inner_disk_closed(m), rel=1e-10)


@pytest.mark.parametrize("label", CLASSES)
def test_q0_positive_definite_and_stable(label):
    lo = [linalg.eigh(assemble_q0(b), b.mass_matrix(), eigvals_only=True)[0] for b in (make_basis(label, n) for n in (16, 32))]
    assert min(lo) > 0
    assert lo[1] == pytest.approx(lo[0], rel=1e-6)


# ---------------------------------------------------------------------------
# assembled Q


@given(st.sampled_from(CLASSES), st.floats(0.02, 0.2), st.floats(-20.0, -2.0))
def test_q_symmetric(label, ell, log_gap):
    Q = assemble_q(make_basis(label, 16), ell, gap=10**log_gap)
    assert np.max(np.abs(Q - Q.T)) <= 1e-10 * np.max(np.abs(Q))


@pytest.mark.parametrize("label", ("s", "as", "m=0", "m=1"))
def test_galerkin_convergence(label):
    mu = [mu_values(make_basis(label, n), 0.05, gap=1e-3, count=1)[0] for n in (32, 64)]
    assert abs(mu[0] - mu[1]) < 1e-6


def test_static_form_positive():
    b = BasisSpec2D(32, "s")
    mu = linalg.eigh(assemble_q(b, 1.0, omega=0.0), b.mass_matrix(), eigvals_only=True)
    assert mu[0] >= 0


def test_block_structure_between_classes():
    assert _cross_parity_max(0.05, 1e-3) < 1e-8
    assert max(_cross_channel_max(a, b) for a in range(-3, 4) for b in range(-3, 4) if a != b) < 1e-8


def test_truncation_cutoff_independent_of_gap_and_tail_small():
    b = BasisSpec2D(16, "s")
    m1 = symbol_residual_matrix(b, 0.05, gap=1e-2)[1]
    m2 = symbol_residual_matrix(b, 0.05, gap=1e-12)[1]
    assert m1["cutoff"] == m2["cutoff"]
    K = symbol_residual_matrix(b, 0.05, gap=1e-2)[0]
    assert m1["tail_bound"] < 1e-10 * np.max(np.abs(K))


def test_doubling_the_cutoff_leaves_the_matrix_unchanged(monkeypatch):
    b = BasisSpec2D(16, "as")
    base = symbol_residual_matrix(b, 0.07, gap=1e-4)[0]
    original = boundary_op._tail_cutoff
    boundary_op._fixed_nodes.cache_clear()
    boundary_op._fixed_bessel.cache_clear()
    monkeypatch.setattr(boundary_op, "_tail_cutoff", lambda *a, **k: 2 * original(*a, **k))
    try:
        doubled = symbol_residual_matrix(b, 0.07, gap=1e-4)[0]
    finally:
        boundary_op._fixed_nodes.cache_clear()
        boundary_op._fixed_bessel.cache_clear()
    c = b.coefficients
    change = c[:, None] * (doubled - base) * c[None, :]
    d = np.sqrt(np.diag(assemble_q0(b)))
    assert np.max(np.abs(change) / np.outer(d, d)) <= 1e-10


def test_essential_spectrum_rejected():
    with pytest.raises(OnEssentialSpectrum):
        assemble_q(BasisSpec2D(8), 0.05, gap=0.0)
    with pytest.raises(ValueError):
        assemble_q(BasisSpec2D(8), 0.05)


def test_galerkin_block_fields():
    blk = galerkin_block(BasisSpec3D(1, 8), 0.05, gap=1e-3)
    assert blk.label == "m=1" and blk.gap == 1e-3
    assert blk.Q_matrix.shape == blk.M_matrix.shape == (8, 8)
    np.testing.assert_allclose(blk.Q0_matrix, assemble_q0(BasisSpec3D(1, 8)))
    np.testing.assert_allclose(blk.rank_one_vector, rank_one_vector(BasisSpec3D(1, 8), 0.05))


@given(st.floats(1e-4, 1e-2))
def test_rank_one_profile_tends_to_leading_profile(ell):
    from crackmodes.dispersion import threshold

    k = threshold().kappa
    b = BasisSpec2D(8, "as")
    f = rank_one_vector(b, ell) / (k * ell)
    assert np.allclose(f, b.load_vector(b.leading_profile()), atol=(k * ell) ** 2)
