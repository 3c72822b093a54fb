import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from crackmodes.acceptance import ritz_channel_eigenvalues
from crackmodes.dispersion import (
    argument_principle_count,
    branch_eigenvalues,
    complex_roots_near_threshold,
    cos_half,
    rayleigh_lamb,
    rayleigh_lamb_gap,
    rayleigh_lamb_mp,
    rayleigh_lamb_partials,
    rayleigh_lamb_scale,
    sinc_half,
    threshold,
    threshold_mp,
    zeta1,
)
from crackmodes.errors import RootCountMismatch

from oracles import KAPPA_MP, LAMBDA_MP


def literal_psi(xi, omega):
    beta = np.sqrt(complex(omega - xi**2))
    gamma = np.sqrt(complex(omega / 2 - xi**2))
    h = math.pi / 2
    return np.sin(beta * h) / beta * np.cos(gamma * h) * gamma**2 + np.cos(beta * h) * np.sin(gamma * h) / gamma * xi**2


finite = dict(allow_nan=False, allow_infinity=False)


@given(st.floats(0.05, 4.0), st.floats(0.05, 20.0))
def test_series_form_matches_literal_trigonometric_form(xi, omega):
    b, g = omega - xi**2, omega / 2 - xi**2
    if min(abs(b), abs(g)) < 1e-3:
        return
    scale = rayleigh_lamb_scale(xi, omega)
    assert abs(rayleigh_lamb(xi, omega) - literal_psi(xi, omega)) <= 1e-12 * max(1.0, scale)


@given(st.floats(-1e-2, 1e-2).filter(lambda z: z != 0))
def test_entire_building_blocks_continuous_across_series_radius(z):
    with mpmath.workdps(30):
        r = mpmath.sqrt(mpmath.mpc(z))
        c = complex(mpmath.cos(r * mpmath.pi / 2))
        s = complex(mpmath.sin(r * mpmath.pi / 2) / r)
    assert abs(cos_half(z) - c) < 1e-14
    assert abs(sinc_half(z) - s) < 1e-14


@given(st.floats(0.0, 3.0), st.floats(0.1, 15.0), st.floats(-1.0, 1.0))
def test_psi_even_in_xi_and_real_symmetric(xi, wr, wi):
    w = complex(wr, wi)
    p = rayleigh_lamb(xi, w)
    assert abs(rayleigh_lamb(-xi, w) - p) <= 1e-13 * max(1.0, abs(p))
    assert abs(rayleigh_lamb(xi, w.conjugate()) - np.conj(p)) <= 1e-13 * max(1.0, abs(p))


@given(st.floats(0.0, 5.0))
def test_psi_vanishes_identically_at_zero_frequency(xi):
    assert abs(rayleigh_lamb(xi, 0.0)) < 1e-12 * max(1.0, rayleigh_lamb_scale(xi, 1e-3))


@given(st.floats(0.1, 3.0), st.floats(0.2, 12.0))
def test_partials_match_central_differences(xi, omega):
    _, px, pw = rayleigh_lamb_partials(xi, omega)
    h = 1e-6
    fx = (rayleigh_lamb(xi + h, omega) - rayleigh_lamb(xi - h, omega)) / (2 * h)
    fw = (rayleigh_lamb(xi, omega + h) - rayleigh_lamb(xi, omega - h)) / (2 * h)
    s = max(1.0, rayleigh_lamb_scale(xi, omega))
    assert abs(px - fx) < 1e-6 * s
    assert abs(pw - fw) < 1e-6 * s


def test_psi_matches_extended_precision_near_double_root():
    th = threshold()
    for s, t in [(1e-3, 1e-4), (-2e-3, 1e-6), (0.0, 1e-8)]:
        ref = complex(rayleigh_lamb_mp(th.kappa + s, th.Lambda - t, dps=50))
        assert abs(rayleigh_lamb(th.kappa + s, th.Lambda - t) - ref) < 1e-15


def test_gap_expansion_keeps_relative_accuracy_for_tiny_gaps():
    kk, LL = threshold_mp(50)
    for s, t in [(0.0, 1e-20), (1e-9, 1e-18), (-3e-3, 1e-25), (5e-3, 5e-5)]:
        with mpmath.workdps(60):
            ref = float(mpmath.re(rayleigh_lamb_mp(kk + s, LL - mpmath.mpf(t), dps=60)))
        got = float(rayleigh_lamb_gap(np.array([s]), t)[0])
        assert abs(got - ref) <= 1e-8 * abs(ref)


def test_threshold_matches_extended_precision_solution():
    th = threshold()
    assert th.Lambda == pytest.approx(LAMBDA_MP, abs=1e-12)
    assert th.kappa == pytest.approx(KAPPA_MP, abs=1e-8)
    assert th.zeta1_pp > 0
    assert th.zeta1_second_deriv == th.zeta1_pp
    assert set(th.as_dict()) >= {"Lambda", "kappa", "zeta1_pp", "residuals"}


@given(st.floats(0.0, 4.0))
def test_threshold_is_the_minimum_of_the_lowest_branch(xi):
    assert zeta1(xi) >= threshold().Lambda - 1e-12


def test_lowest_branch_curvature_matches_second_difference():
    th = threshold()
    h = 1e-3
    fd = (zeta1(th.kappa + h) - 2 * th.Lambda + zeta1(th.kappa - h)) / h**2
    assert fd == pytest.approx(th.zeta1_pp, rel=1e-5)


@given(st.floats(0.0, 4.0))
def test_branches_against_ritz_discretisation(xi):
    got = np.array([p.omega for p in branch_eigenvalues(xi, 3)])
    ref = ritz_channel_eigenvalues(xi, 3)
    assert np.all(np.abs(got - ref) <= 1e-4 * ref)


@given(st.floats(0.0, 4.0))
def test_branches_sorted_and_residual_small(xi):
    pts = branch_eigenvalues(xi, 4)
    om = [p.omega for p in pts]
    assert om == sorted(om) and om[0] > 0
    assert [p.k for p in pts] == [1, 2, 3, 4]
    for p in pts:
        assert p.residual <= 1e-12 * max(1.0, rayleigh_lamb_scale(xi, p.omega))


def test_branch_values_at_zero_wavenumber():
    om = [p.omega for p in branch_eigenvalues(0.0, 2)]
    assert om == pytest.approx([2.0, 4.0], abs=1e-12)


def test_branch_count_must_be_positive():
    with pytest.raises(ValueError):
        branch_eigenvalues(1.0, 0)


@given(st.floats(-0.04, 0.04), st.floats(-0.02, 0.02))
def test_four_complex_roots_near_threshold(dr, di):
    w = complex(threshold().Lambda + dr, di)
    assert argument_principle_count(w, -8, 8, -0.5, 0.5).real == pytest.approx(4.0, abs=1e-6)


def test_complex_roots_located_and_paired():
    th = threshold()
    rs = complex_roots_near_threshold(th.Lambda - 1e-3)
    assert len(rs.roots) == 4 and rs.winding_count == pytest.approx(4.0, abs=1e-6)
    for r in rs.roots:
        assert abs(rayleigh_lamb(r, rs.omega)) < 1e-12
    # below the threshold the roots sit on the imaginary offsets +-i sqrt(2 t / zeta'')
    d = math.sqrt(2 * 1e-3 / th.zeta1_pp)
    for r in rs.upper():
        assert abs(abs(r.real) - th.kappa) < 1e-3 and r.imag == pytest.approx(d, rel=2e-2)
    assert len(rs.upper()) == len(rs.lower()) == 2


def test_complex_roots_reject_far_frequency():
    with pytest.raises(ValueError):
        complex_roots_near_threshold(threshold().Lambda + 0.2)


def test_root_count_mismatch_on_tall_strip():
    # a taller strip encloses further roots of Psi
    with pytest.raises(RootCountMismatch):
        complex_roots_near_threshold(threshold().Lambda, strip_height=4.0)
