"""Threshold eigenfunctions of the symmetric channel and the boundary stress they carry."""
from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dispersion import DEFAULT_CONTEXT, SERIES_RADIUS, rayleigh_lamb, rayleigh_lamb_scale, threshold
from .errors import ConvergenceFailure, GammaZero, NotAnEigenpair

HALF_PI = 0.5 * np.pi


@dataclass(frozen=True)
class ModeProfile:
    xi: float
    omega: float
    profile: Callable  # x2 -> complex array of shape (2, len(x2))
    norm_half: float


@dataclass(frozen=True)
class ThresholdModeData:
    dpsi2_at_0: complex
    normalization: float
    closed_form: complex
    quadrature_order: int
    quadrature_disagreement: float

    @property
    def abs_dpsi(self) -> float:
        return abs(self.dpsi2_at_0)


def _check_eigenpair(xi, omega, tol):
    res = abs(rayleigh_lamb(xi, omega))
    if res > tol * max(1.0, rayleigh_lamb_scale(xi, omega)):
        raise NotAnEigenpair(f"|Psi({xi}, {omega})| = {res:.3e}")


def eigenfunction_2d(xi, omega, x2, derivative: int = 0, tol: float = 1e-8, check: bool = True):
    """Non-normalised eigenfunction ``(u1, u2)`` of the symmetric channel at ``x2``.

    ``derivative`` selects the ``x2``-derivative order (0, 1 or 2), computed
    analytically.  Returns an array of shape ``(2,) + shape(x2)``.
    """
    if check:
        _check_eigenpair(xi, omega, tol)
    beta = complex(DEFAULT_CONTEXT.beta(xi, omega))
    gamma = complex(DEFAULT_CONTEXT.gamma(xi, omega))
    if abs(gamma) ** 2 < SERIES_RADIUS:
        raise GammaZero("gamma too close to zero for the eigenfunction formula")
    x = np.asarray(x2, dtype=float)
    a1 = 1j * gamma**2 * beta * np.cos(HALF_PI * gamma)
    a2 = 1j * xi**2 * beta * np.cos(HALF_PI * beta)
    b1 = xi * gamma**2 * np.cos(HALF_PI * gamma)
    b2 = -xi * beta * gamma * np.cos(HALF_PI * beta)
    # d^k/dx^k cos(kx) and sin(kx) via the phase shift by k*pi/2
    s = derivative * HALF_PI
    u1 = a1 * beta**derivative * np.cos(beta * x + s) + a2 * gamma**derivative * np.cos(gamma * x + s)
    u2 = b1 * beta**derivative * np.sin(beta * x + s) + b2 * gamma**derivative * np.sin(gamma * x + s)
    return np.array([u1, u2])


def eigenfunction_3d(xi_vec, omega, x3, derivative: int = 0, tol: float = 1e-8):
    """Three-component eigenfunction for the wavevector ``xi_vec`` in the plane.

    The 2D profile at ``|xi|`` is embedded as ``(u1, 0, u2)`` and rotated by
    the polar angle of ``xi_vec`` in the first two components.
    """
    xi1, xi2 = float(xi_vec[0]), float(xi_vec[1])
    r = np.hypot(xi1, xi2)
    alpha = np.arctan2(xi2, xi1)
    u1, u2 = eigenfunction_2d(r, omega, x3, derivative=derivative, tol=tol)
    return np.array([np.cos(alpha) * u1, np.sin(alpha) * u1, u2])


def profile_norm_half(xi, omega, order: int = 64, scale: complex = 1.0) -> float:
    """L2 norm of the (scaled) profile over ``(0, pi/2)`` by Gauss-Legendre."""
    x, w = np.polynomial.legendre.leggauss(order)
    x = HALF_PI * 0.5 * (x + 1.0)
    w = w * HALF_PI * 0.5
    u = scale * eigenfunction_2d(xi, omega, x, check=False)
    return float(np.sqrt(np.sum(w * (np.abs(u[0]) ** 2 + np.abs(u[1]) ** 2))))


def normalized_mode(xi, omega, order: int = 64, scale: complex = 1.0) -> ModeProfile:
    """Profile scaled to unit norm on ``(0, pi/2)`` with ``d/dx2 u2(0)`` on the positive imaginary axis."""
    _check_eigenpair(xi, omega, 1e-8)
    nrm = profile_norm_half(xi, omega, order, scale)
    d0 = scale * eigenfunction_2d(xi, omega, 0.0, derivative=1, check=False)[1] / nrm
    phase = 1j * np.conj(d0) / abs(d0) if abs(d0) > 0 else 1.0
    factor = scale * phase / nrm

    def profile(x2, derivative=0):
        return factor * eigenfunction_2d(xi, omega, x2, derivative=derivative, check=False)

    return ModeProfile(xi=float(xi), omega=float(omega), profile=profile, norm_half=nrm)


def dpsi2_closed_form(kappa, Lam, c1=1.0):
    """``c1 k (L/2 - k^2) sqrt(L - k^2) [cos(pi/2 sqrt(L/2-k^2)) - cos(pi/2 sqrt(L-k^2))]``."""
    g2 = Lam / 2 - kappa**2
    b2 = Lam - kappa**2
    return c1 * kappa * g2 * np.sqrt(b2 + 0j) * (np.cos(HALF_PI * np.sqrt(g2 + 0j)) - np.cos(HALF_PI * np.sqrt(b2 + 0j)))


def threshold_mode(order: int = 64, scale: complex = 1.0, rtol: float = 1e-10) -> ThresholdModeData:
    """Normalised ``d/dx2 psi_{kappa,2}(0)`` at the threshold ``(kappa, Lambda)``."""
    return _threshold_mode_cached(int(order), complex(scale), float(rtol))


@functools.lru_cache(maxsize=8)
def _threshold_mode_cached(order, scale, rtol):
    th = threshold()
    k, L = th.kappa, th.Lambda
    n1 = profile_norm_half(k, L, order, scale)
    n2 = profile_norm_half(k, L, 2 * order, scale)
    dis = abs(n1 - n2) / n2
    if dis > rtol:
        raise ConvergenceFailure(f"normalisation unstable under doubled quadrature order ({dis:.2e})")
    mode = normalized_mode(k, L, order, scale)
    d = complex(mode.profile(0.0, derivative=1)[1])
    closed = complex(dpsi2_closed_form(k, L, c1=scale / n1))
    if abs(abs(closed) - abs(d)) > 1e-10 * abs(d):
        raise ConvergenceFailure("closed-form boundary derivative disagrees with the profile")
    return ThresholdModeData(
        dpsi2_at_0=d,
        normalization=1.0 / n1,
        closed_form=closed,
        quadrature_order=order,
        quadrature_disagreement=dis,
    )
