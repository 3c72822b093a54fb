"""Boundary system on the half strip and the Dirichlet-to-Neumann symbols.

The half strip is ``R x (0, pi/2)``.  Data ``u2(x, 0) = g`` with zero shear on
the line ``x2 = 0`` and zero traction on ``x2 = pi/2``; the symbol maps ``g^``
to the normal traction ``h = -2 d2 u2(x, 0)`` in Fourier space.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dispersion import (
    DEFAULT_CONTEXT,
    HALF_PI,
    cos_half,
    rayleigh_lamb_scale,
    sinc_half,
    TAYLOR_S_RADIUS,
    TAYLOR_T_RADIUS,
    rayleigh_lamb_gap,
    threshold,
)
from .errors import OnEssentialSpectrum, SingularSystem

OMEGA_MIN = 1e-3
# from this value of Re sqrt(xi^2 - omega) on, the exponentially scaled form is used
EXPONENTIAL_SWITCH = 1.0
SINGULAR_TOL = 1e-14


@dataclass(frozen=True)
class BoundarySystem:
    xi: complex
    omega: complex
    L: np.ndarray
    b: np.ndarray
    a: np.ndarray
    R: np.ndarray

    @property
    def traction(self) -> complex:
        """Fourier transform of the normal traction, ``R . a``."""
        return complex(self.R @ self.a)


@dataclass(frozen=True)
class SymbolValue:
    xi: float
    omega: complex
    value: complex


def _static_matrices(xi):
    e_m, e_p = np.exp(-xi * HALF_PI), np.exp(xi * HALF_PI)
    p = math.pi
    L = np.array(
        [
            [-2 * xi**2 * e_m, 2 * xi**2 * e_p, (-2 * xi - p * xi**2) * e_m, (-2 * xi + p * xi**2) * e_p],
            [-2j * xi**2 * e_m, -2j * xi**2 * e_p, -1j * (4 * xi + p * xi**2) * e_m, 1j * (4 * xi - p * xi**2) * e_p],
            [-2 * xi**2, 2 * xi**2, -2 * xi, -2 * xi],
            [1j * xi, -1j * xi, 3j, 3j],
        ],
        dtype=complex,
    )
    R = np.array([2j * xi**2, 2j * xi**2, 4j * xi, -4j * xi], dtype=complex)
    return L, R


def _dynamic_matrices(xi, omega):
    beta = complex(DEFAULT_CONTEXT.beta(xi, omega))
    gamma = complex(DEFAULT_CONTEXT.gamma(xi, omega))
    eb, ebm = np.exp(1j * beta * HALF_PI), np.exp(-1j * beta * HALF_PI)
    eg, egm = np.exp(1j * gamma * HALF_PI), np.exp(-1j * gamma * HALF_PI)
    d = beta**2 - xi**2
    L = np.array(
        [
            [d * eb, d * ebm, 2 * gamma * xi * eg, -2 * gamma * xi * egm],
            [-2 * beta * xi * eb, 2 * beta * xi * ebm, 2 * gamma**2 * eg, 2 * gamma**2 * egm],
            [1j * d, 1j * d, 2j * gamma * xi, -2j * gamma * xi],
            [-xi, -xi, gamma, -gamma],
        ],
        dtype=complex,
    )
    R = np.array([2j * beta * xi, -2j * beta * xi, -2j * gamma**2, -2j * gamma**2], dtype=complex)
    return L, R


def boundary_system(xi, omega, g_hat: complex = 1.0) -> BoundarySystem:
    """Assemble ``L(xi, omega)``, ``b``, ``R`` and solve ``L a = b``."""
    xi = complex(xi)
    omega = complex(omega)
    if omega == 0:
        if abs(xi) < SINGULAR_TOL:
            raise SingularSystem("L(0, 0) is singular")
        L, R = _static_matrices(xi)
    else:
        psi = rayleigh_lamb_denominator(xi, omega)
        if abs(psi) < SINGULAR_TOL * max(1.0, rayleigh_lamb_scale(xi, omega)):
            raise SingularSystem(f"Rayleigh-Lamb factor vanishes at xi={xi}, omega={omega}")
        L, R = _dynamic_matrices(xi, omega)
    b = np.array([0, 0, 0, g_hat], dtype=complex)
    a = np.linalg.solve(L, b)
    return BoundarySystem(xi=xi, omega=omega, L=L, b=b, a=a, R=R)


def determinant_formula(xi, omega) -> complex:
    """Closed form of ``det L(xi, omega)``.

    ``-32 g^2 (g^2 + xi^2) [sin(b pi/2) cos(g pi/2) g^3 + cos(b pi/2) sin(g pi/2) b xi^2]``
    with ``b = beta`` and ``g = gamma``.  Note the overall minus sign.
    """
    beta = complex(DEFAULT_CONTEXT.beta(xi, omega))
    gamma = complex(DEFAULT_CONTEXT.gamma(xi, omega))
    return (
        -32
        * gamma**2
        * (gamma**2 + xi**2)
        * (
            np.sin(beta * HALF_PI) * np.cos(gamma * HALF_PI) * gamma**3
            + np.cos(beta * HALF_PI) * np.sin(gamma * HALF_PI) * beta * xi**2
        )
    )


def rayleigh_lamb_denominator(xi, omega):
    x = np.asarray(xi, dtype=complex) ** 2
    b, g = omega - x, 0.5 * omega - x
    return sinc_half(b) * cos_half(g) * g + cos_half(b) * sinc_half(g) * x


def _entire_form(x, omega):
    b, g = omega - x, 0.5 * omega - x
    Sb, Cb, Sg, Cg = sinc_half(b), cos_half(b), sinc_half(g), cos_half(g)
    num = -2 * Sb * Sg * (g**3 + 2 * g * x**2 + x**3) + 4 * (Cb * Cg - 1) * g * x
    den = Sb * Cg * g + Cb * Sg * x
    return num / (0.5 * omega * den), den


def _half_space_form(x, omega):
    # exponentially small corrections dropped; rationalised so that no
    # cancellation of order xi^4 occurs
    b = np.sqrt(x - omega)
    c = np.sqrt(x - 0.5 * omega)
    c2 = x - 0.5 * omega
    quad = 4 * x * x - 6 * omega * x + omega * omega
    X = 2 * c2**3 + 4 * c2 * x * x - 2 * x**3
    Y = 4 * b * c2 * c * x
    return quad * (b * x + c2 * c) / (X + Y)


def _exponential_form(x, omega):
    """Half-space value plus the exact ``exp(-pi p)``, ``exp(-pi q)`` corrections.

    With ``p = sqrt(x - omega)`` and ``q = sqrt(x - omega/2)`` the hyperbolic
    functions are factored as ``exp(P + Q)`` times bounded terms; the leading
    part is taken from the rationalised half-space form so the large
    cancellation in the numerator never happens in floating point.
    """
    p = np.sqrt(x - omega)
    q = np.sqrt(x - 0.5 * omega)
    g = 0.5 * omega - x
    Ep, Eq = np.exp(-math.pi * p), np.exp(-math.pi * q)
    Epq = np.exp(-HALF_PI * (p + q))
    den0 = g / p + x / q
    dden = (Eq - Ep - Ep * Eq) * g / p + (Ep - Eq - Ep * Eq) * x / q
    dnum = 2 * (Ep + Eq - Ep * Eq) / (p * q) * (g**3 + 2 * g * x * x + x**3) + 4 * (
        Ep + Eq + Ep * Eq - 4 * Epq
    ) * g * x
    half = 0.5 * omega
    return (half * den0 * _half_space_form(x, omega) + dnum) / (half * (den0 + dden)), den0 + dden


def dtn_symbol_values(xi, omega, check: bool = True):
    """Vectorised ``m_omega(xi)`` for an array of ``xi`` (complex result)."""
    omega = complex(omega)
    if abs(omega) < OMEGA_MIN:
        raise ValueError(f"|omega| < {OMEGA_MIN}: use dtn_symbol_static")
    xi = np.asarray(xi)
    x = np.asarray(xi, dtype=complex) ** 2
    far = np.real(np.sqrt(x - omega)) >= EXPONENTIAL_SWITCH
    out = np.empty(x.shape, dtype=complex)
    if np.any(far):
        val, den = _exponential_form(x[far], omega)
        if check and np.any(np.abs(den) < SINGULAR_TOL * np.maximum(1.0, np.abs(x[far]))):
            raise OnEssentialSpectrum(f"Rayleigh-Lamb zero on the real axis at omega={omega}")
        out[far] = val
    near = ~far
    if np.any(near):
        val, den = _entire_form(x[near], omega)
        if check:
            scale = rayleigh_lamb_scale(np.sqrt(x[near]), omega)
            if np.any(np.abs(den) < SINGULAR_TOL * np.maximum(1.0, scale)):
                raise OnEssentialSpectrum(f"Rayleigh-Lamb zero on the real axis at omega={omega}")
        out[near] = val
    return out


def dtn_symbol(xi, omega) -> SymbolValue:
    """``m_omega(xi)`` at a single point."""
    return SymbolValue(xi=float(np.real(xi)), omega=complex(omega), value=complex(dtn_symbol_values(np.array([xi]), omega)[0]))


_M0_NUM = [math.pi ** (2 * k) / math.factorial(2 * k) for k in range(2, 22)]
_M0_DEN = [2 * math.pi] + [math.pi ** (2 * k + 1) / math.factorial(2 * k + 1) for k in range(1, 21)]


def dtn_symbol_static(xi):
    """``m_0(xi) = xi (cosh(pi xi) - 1 - pi^2 xi^2/2) / (sinh(pi xi) + pi xi)``."""
    xi = np.asarray(xi, dtype=float)
    a = np.abs(xi)
    out = np.empty_like(a)
    small = a < 0.5
    if np.any(small):
        s = a[small] ** 2
        num = np.polynomial.polynomial.polyval(s, _M0_NUM)  # divided by xi^4
        den = np.polynomial.polynomial.polyval(s, _M0_DEN)  # divided by xi
        out[small] = s * s * num / den
    big = ~small
    if np.any(big):
        y = a[big]
        e = np.exp(-math.pi * y)
        out[big] = y * (1 + e * e - 2 * (1 + 0.5 * (math.pi * y) ** 2) * e) / (1 - e * e + 2 * math.pi * y * e)
    return out[()] if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# evaluation at omega = Lambda - t with the gap t kept exact


def _numerator(x, omega):
    b, g = omega - x, 0.5 * omega - x
    Sb, Cb, Sg, Cg = sinc_half(b), cos_half(b), sinc_half(g), cos_half(g)
    return -2 * Sb * Sg * (g**3 + 2 * g * x**2 + x**3) + 4 * (Cb * Cg - 1) * g * x


def dtn_symbol_gap(s, t: float):
    """``m_omega`` at ``xi = kappa + s`` and ``omega = Lambda - t``, real arrays.

    Near the double root of the Rayleigh-Lamb function the denominator is an
    O(t + s^2) quantity; inside the validity region of the threshold expansion
    it is taken from that expansion so tiny gaps ``t`` keep full relative
    accuracy.  Elsewhere the ordinary double-precision evaluation is used.
    """
    th = threshold()
    s = np.asarray(s, dtype=float)
    eta = th.kappa + s
    omega = th.Lambda - t
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.real(dtn_symbol_values(eta, omega, check=False))
    local = np.abs(s) <= TAYLOR_S_RADIUS
    if t <= TAYLOR_T_RADIUS and np.any(local):
        x = eta[local].astype(complex) ** 2
        den = 0.5 * omega * rayleigh_lamb_gap(s[local], t)
        out[local] = np.real(_numerator(x, omega)) / den
    return out
