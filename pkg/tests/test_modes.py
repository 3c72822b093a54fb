import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from crackmodes.dispersion import branch_eigenvalues, threshold
from crackmodes.errors import GammaZero, NotAnEigenpair
from crackmodes.modes import (
    dpsi2_closed_form,
    eigenfunction_2d,
    eigenfunction_3d,
    normalized_mode,
    profile_norm_half,
    threshold_mode,
)

from oracles import ABS_DPSI

HALF_PI = 0.5 * math.pi


def operator_residual(xi, omega, x):
    u = eigenfunction_2d(xi, omega, x)
    d1 = eigenfunction_2d(xi, omega, x, derivative=1)
    d2 = eigenfunction_2d(xi, omega, x, derivative=2)
    r1 = -d2[0] + 2 * xi**2 * u[0] - 1j * xi * d1[1] - omega * u[0]
    r2 = -2 * d2[1] + xi**2 * u[1] - 1j * xi * d1[0] - omega * u[1]
    return np.abs(r1) + np.abs(r2), np.max(np.abs(u))


@given(st.floats(0.05, 3.0), st.integers(1, 3))
def test_profile_solves_the_channel_problem(xi, k):
    omega = branch_eigenvalues(xi, 3)[k - 1].omega
    try:
        eigenfunction_2d(xi, omega, 0.0)
    except GammaZero:
        return
    x = np.linspace(-HALF_PI, HALF_PI, 41)
    res, size = operator_residual(xi, omega, x)
    assert np.max(res) <= 1e-8 * max(1.0, omega) * size
    d1 = eigenfunction_2d(xi, omega, np.array([HALF_PI, -HALF_PI]), derivative=1)
    u = eigenfunction_2d(xi, omega, np.array([HALF_PI, -HALF_PI]))
    assert np.all(np.abs(d1[0] + 1j * xi * u[1]) <= 1e-8 * size * max(1.0, xi))
    assert np.all(np.abs(d1[1]) <= 1e-8 * size * max(1.0, math.sqrt(omega)))


@given(st.floats(0.0, 1.5))
def test_profile_parity(x):
    th = threshold()
    u_p = eigenfunction_2d(th.kappa, th.Lambda, x)
    u_m = eigenfunction_2d(th.kappa, th.Lambda, -x)
    assert abs(u_p[0] - u_m[0]) < 1e-13 and abs(u_p[1] + u_m[1]) < 1e-13


def test_non_eigenpair_rejected():
    with pytest.raises(NotAnEigenpair):
        eigenfunction_2d(1.0, 3.0, 0.0)


def test_gamma_zero_rejected():
    # (1, 2) lies on a branch with gamma = 0
    with pytest.raises(GammaZero):
        eigenfunction_2d(1.0, 2.0, 0.0)


def test_threshold_mode_normalisation_and_phase():
    th = threshold()
    mode = normalized_mode(th.kappa, th.Lambda)
    x, w = np.polynomial.legendre.leggauss(80)
    x = HALF_PI * 0.5 * (x + 1)
    u = mode.profile(x)
    assert np.sum(w * HALF_PI * 0.5 * (np.abs(u[0]) ** 2 + np.abs(u[1]) ** 2)) == pytest.approx(1.0, abs=1e-12)
    d = complex(mode.profile(0.0, derivative=1)[1])
    assert abs(d.real) < 1e-12 and d.imag > 0


def test_threshold_boundary_derivative_frozen_value():
    data = threshold_mode()
    assert data.abs_dpsi == pytest.approx(ABS_DPSI, rel=1e-9)
    assert data.quadrature_disagreement < 1e-10
    assert abs(abs(data.closed_form) - data.abs_dpsi) < 1e-10


@given(st.floats(0.1, 10.0), st.floats(0, 2 * math.pi))
def test_boundary_derivative_independent_of_profile_scale(r, phi):
    scale = r * complex(math.cos(phi), math.sin(phi))
    assert threshold_mode(scale=scale).abs_dpsi == pytest.approx(ABS_DPSI, rel=1e-10)


def test_closed_form_derivative_matches_unnormalised_profile():
    th = threshold()
    d = eigenfunction_2d(th.kappa, th.Lambda, 0.0, derivative=1)[1]
    assert abs(dpsi2_closed_form(th.kappa, th.Lambda)) == pytest.approx(abs(d), rel=1e-12)


def test_norm_stable_under_quadrature_refinement():
    th = threshold()
    assert profile_norm_half(th.kappa, th.Lambda, 64) == pytest.approx(
        profile_norm_half(th.kappa, th.Lambda, 128), rel=1e-12
    )


@given(st.floats(0, 2 * math.pi), st.floats(0.0, 1.5))
def test_plate_profile_is_rotated_strip_profile(alpha, x3):
    th = threshold()
    k = th.kappa
    u3 = eigenfunction_3d((k * math.cos(alpha), k * math.sin(alpha)), th.Lambda, x3)
    u2 = eigenfunction_2d(k, th.Lambda, x3)
    assert abs(u3[2] - u2[1]) < 1e-12
    assert np.hypot(abs(u3[0]), abs(u3[1])) == pytest.approx(abs(u2[0]), abs=1e-12)
