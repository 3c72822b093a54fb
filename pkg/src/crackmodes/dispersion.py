"""Rayleigh-Lamb dispersion machinery for the symmetric (h2) channel of the strip.

The strip is ``I = (-pi/2, pi/2)`` with Lame coefficients ``lambda = 0``,
``mu = 1``.  Every trigonometric combination is written as an entire function
of the squared variables ``beta^2 = omega - xi^2`` and ``gamma^2 = omega/2 - xi^2``
so no square-root branch ever enters the evaluation of ``Psi``.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
from scipy import optimize

from .errors import BracketFailure, ConvergenceFailure, RootCountMismatch

HALF_PI = 0.5 * math.pi
SERIES_RADIUS = 1e-2
_NTERMS = 10

# coefficients of C(z) = cos(sqrt(z) pi/2) and S(z) = sin(sqrt(z) pi/2)/sqrt(z)
_C_COEF = np.array([(-1) ** k * HALF_PI ** (2 * k) / math.factorial(2 * k) for k in range(_NTERMS)])
_S_COEF = np.array([(-1) ** k * HALF_PI ** (2 * k + 1) / math.factorial(2 * k + 1) for k in range(_NTERMS)])
_DS_COEF = np.array([k * _S_COEF[k] for k in range(1, _NTERMS)])


@dataclass(frozen=True)
class DispersionContext:
    """Fixed strip geometry and material.  Immutable by construction."""

    half_width: float = HALF_PI
    lame_lambda: float = 0.0
    lame_mu: float = 1.0
    # principal branch; on (-inf, 0] the root with Im >= 0 is taken
    sqrt_branch: str = "principal, Im>=0 on (-inf,0]"

    def beta2(self, xi, omega):
        return omega - xi * xi

    def gamma2(self, xi, omega):
        return 0.5 * omega - xi * xi

    @staticmethod
    def sqrt(z):
        """Square root with the branch convention of the strip problem."""
        r = np.sqrt(np.asarray(z, dtype=complex))
        # numpy returns Im >= 0 on the negative axis except for -0.0j inputs
        return np.where((r.imag < 0) & (np.abs(np.asarray(z).imag) == 0), -r, r)

    def beta(self, xi, omega):
        return self.sqrt(self.beta2(xi, omega))

    def gamma(self, xi, omega):
        return self.sqrt(self.gamma2(xi, omega))


DEFAULT_CONTEXT = DispersionContext()


@dataclass(frozen=True)
class BranchPoint:
    xi: float
    k: int
    omega: float
    residual: float


@dataclass(frozen=True)
class ThresholdData:
    Lambda: float
    kappa: float
    zeta1_pp: float
    residuals: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)

    @property
    def zeta1_second_deriv(self) -> float:
        return self.zeta1_pp

    def as_dict(self) -> dict:
        return {
            "Lambda": self.Lambda,
            "kappa": self.kappa,
            "zeta1_pp": self.zeta1_pp,
            "residuals": dict(self.residuals),
            "grid": dict(self.grid),
        }


@dataclass(frozen=True)
class ComplexRootSet:
    omega: complex
    roots: tuple
    strip_height: float
    winding_count: float = float("nan")

    def upper(self):
        return sorted((r for r in self.roots if r.imag > 0), key=lambda z: z.real)

    def lower(self):
        return sorted((r for r in self.roots if r.imag < 0), key=lambda z: z.real)


# ---------------------------------------------------------------------------
# entire building blocks


def _check_finite(*args):
    for a in args:
        if not np.all(np.isfinite(np.asarray(a))):
            raise ValueError("non-finite input")


def cos_half(z):
    """``C(z) = cos(sqrt(z) pi/2)`` as an entire function of ``z``."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < SERIES_RADIUS
    out = np.cos(HALF_PI * np.sqrt(np.where(small, 1.0, z)))
    if np.any(small):
        out = np.where(small, np.polynomial.polynomial.polyval(z, _C_COEF), out)
    return out


def sinc_half(z):
    """``S(z) = sin(sqrt(z) pi/2)/sqrt(z)``, entire, ``S(0) = pi/2``."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < SERIES_RADIUS
    r = np.sqrt(np.where(small, 1.0, z))
    out = np.sin(HALF_PI * r) / r
    if np.any(small):
        out = np.where(small, np.polynomial.polynomial.polyval(z, _S_COEF), out)
    return out


def dcos_half(z):
    return -0.5 * HALF_PI * sinc_half(z)


def dsinc_half(z):
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < SERIES_RADIUS
    zz = np.where(small, 1.0, z)
    out = (HALF_PI * cos_half(zz) - sinc_half(zz)) / (2.0 * zz)
    if np.any(small):
        out = np.where(small, np.polynomial.polynomial.polyval(z, _DS_COEF), out)
    return out


def _maybe_scalar(a):
    a = np.asarray(a)
    return a[()] if a.ndim == 0 else a


def rayleigh_lamb(xi, omega, ctx: DispersionContext = DEFAULT_CONTEXT):
    """Evaluate ``Psi(xi, omega)``, the symmetric Rayleigh-Lamb function.

    ``Psi = S(b) C(g) g + C(b) S(g) xi^2`` with ``b = omega - xi^2`` and
    ``g = omega/2 - xi^2``.  Accepts scalars or broadcastable arrays; the
    result is complex.
    """
    _check_finite(xi, omega)
    x = np.asarray(xi, dtype=complex) ** 2
    w = np.asarray(omega, dtype=complex)
    b, g = w - x, 0.5 * w - x
    return _maybe_scalar(sinc_half(b) * cos_half(g) * g + cos_half(b) * sinc_half(g) * x)


def rayleigh_lamb_scale(xi, omega):
    """Magnitude of the two summands of ``Psi``; used to judge residuals."""
    x = np.asarray(xi, dtype=complex) ** 2
    w = np.asarray(omega, dtype=complex)
    b, g = w - x, 0.5 * w - x
    return _maybe_scalar(np.abs(sinc_half(b) * cos_half(g) * g) + np.abs(cos_half(b) * sinc_half(g) * x))


def rayleigh_lamb_partials(xi, omega):
    """Return ``(Psi, dPsi/dxi, dPsi/domega)``."""
    _check_finite(xi, omega)
    xi = np.asarray(xi, dtype=complex)
    x = xi**2
    w = np.asarray(omega, dtype=complex)
    b, g = w - x, 0.5 * w - x
    Sb, Cb, Sg, Cg = sinc_half(b), cos_half(b), sinc_half(g), cos_half(g)
    dSb, dCb, dSg, dCg = dsinc_half(b), dcos_half(b), dsinc_half(g), dcos_half(g)
    psi = Sb * Cg * g + Cb * Sg * x
    p_b = dSb * Cg * g + dCb * Sg * x
    p_g = Sb * dCg * g + Sb * Cg + Cb * dSg * x
    p_x = Cb * Sg
    d_omega = p_b + 0.5 * p_g
    d_x = -p_b - p_g + p_x
    return _maybe_scalar(psi), _maybe_scalar(2.0 * xi * d_x), _maybe_scalar(d_omega)


# ---------------------------------------------------------------------------
# real branches


def _real_psi(xi, omegas):
    return np.real(rayleigh_lamb(xi, omegas))


def branch_eigenvalues(
    xi: float,
    count: int = 1,
    omega_max: float | None = None,
    step: float = 0.01,
    tol: float = 1e-12,
    omega_min: float = 1e-6,
) -> list[BranchPoint]:
    """The ``count`` smallest positive roots ``omega`` of ``Psi(xi, .)``.

    Sign changes are bracketed on a uniform grid (refined up to twice when
    too few are found) and polished with Brent's method.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if not math.isfinite(xi):
        raise ValueError("xi must be finite")
    xi = float(xi)
    if omega_max is None:
        omega_max = 2.0 * xi * xi + 50.0

    def f(w):
        return float(np.real(rayleigh_lamb(xi, w)))

    for refine in range(3):
        h = step / 4**refine
        grid = np.arange(omega_min, omega_max + h, h)
        vals = _real_psi(xi, grid)
        s = np.sign(vals)
        idx = np.nonzero(s[:-1] * s[1:] < 0)[0]
        exact = np.nonzero(vals == 0.0)[0]
        if len(idx) + len(exact) >= count:
            break
    else:
        raise BracketFailure(
            f"only {len(idx) + len(exact)} sign changes of Psi({xi}, .) below omega={omega_max}"
        )

    roots = [float(grid[i]) for i in exact]
    for i in idx:
        roots.append(optimize.brentq(f, grid[i], grid[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200))
    roots = sorted(roots)[:count]
    out = []
    for k, w in enumerate(roots, start=1):
        res = abs(rayleigh_lamb(xi, w))
        if res > tol * max(1.0, rayleigh_lamb_scale(xi, w)):
            raise ConvergenceFailure(f"branch {k} at xi={xi}: residual {res:.3e}")
        out.append(BranchPoint(xi=xi, k=k, omega=w, residual=float(res)))
    return out


def zeta1(xi: float) -> float:
    """Lowest symmetric branch ``zeta_1(xi)``."""
    return _zeta1_near(float(xi), None)


def _zeta1_near(xi: float, guess: float | None) -> float:
    if guess is not None:
        f = lambda w: float(np.real(rayleigh_lamb(xi, w)))  # noqa: E731
        lo, hi = guess - 1e-3, guess + 1e-3
        if f(lo) * f(hi) < 0:
            return optimize.brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    # zeta_1 >= Lambda > 1.8 for every xi; scanning from 1 skips the spurious root at 0
    return branch_eigenvalues(xi, 1, omega_min=1.0)[0].omega


def _richardson_second_derivative(f, x0, h0=0.02, levels=4):
    f0 = f(x0)
    table = []
    for k in range(levels):
        h = h0 / 2**k
        row = [(f(x0 + h) - 2 * f0 + f(x0 - h)) / h**2]
        for j in range(1, k + 1):
            prev = table[k - 1][j - 1]
            row.append(row[j - 1] + (row[j - 1] - prev) / (4**j - 1))
        table.append(row)
    best = table[-1][-1]
    err = abs(best - table[-2][-2]) if levels > 1 else float("nan")
    return best, err, table


def threshold(
    search_window: tuple[float, float] = (0.0, 2.0),
    xtol: float = 1e-8,
    h0: float = 0.02,
    levels: int = 4,
) -> ThresholdData:
    """Locate ``Lambda = min zeta_1`` and the minimiser ``kappa``."""
    return _threshold_cached(tuple(float(v) for v in search_window), float(xtol), float(h0), int(levels))


@functools.lru_cache(maxsize=8)
def _threshold_cached(window, xtol, h0, levels):
    lo, hi = window
    lo = max(lo, 1e-3)
    res = optimize.minimize_scalar(zeta1, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
    if not res.success:
        raise ConvergenceFailure("threshold minimisation failed")
    k0 = float(res.x)

    # polish: zeta_1'(xi) = 0  <=>  dPsi/dxi(xi, zeta_1(xi)) = 0
    def slope(x):
        return float(np.real(rayleigh_lamb_partials(x, _zeta1_near(x, res.fun))[1]))

    a, b = k0 - 1e-4, k0 + 1e-4
    if slope(a) * slope(b) >= 0:
        raise ConvergenceFailure("minimiser of zeta_1 is not bracketed by a slope sign change")
    kappa = optimize.brentq(slope, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    if abs(kappa - k0) > max(xtol, 1e-6) * 100:
        raise ConvergenceFailure(f"minimiser did not stabilise ({k0} vs {kappa})")
    Lam = _zeta1_near(kappa, res.fun)
    zpp, zpp_err, _ = _richardson_second_derivative(lambda x: _zeta1_near(x, Lam), kappa, h0, levels)
    if not zpp > 0:
        raise ConvergenceFailure("zeta_1'' at the minimiser is not positive")
    return ThresholdData(
        Lambda=Lam,
        kappa=kappa,
        zeta1_pp=zpp,
        residuals={
            "psi": float(abs(rayleigh_lamb(kappa, Lam))),
            "dpsi_dxi": float(abs(rayleigh_lamb_partials(kappa, Lam)[1])),
            "zeta1_pp_richardson": float(zpp_err),
            "kappa_polish_shift": float(abs(kappa - k0)),
        },
        grid={"window": [lo, hi], "h0": h0, "levels": levels},
    )


# ---------------------------------------------------------------------------
# extended-precision threshold (for gaps far below double-precision spacing)


def _psi_mp(x, w):
    b, g = w - x * x, w / 2 - x * x

    def C(z):
        return mpmath.cos(mpmath.sqrt(z) * mpmath.pi / 2)

    def S(z):
        if z == 0:
            return mpmath.pi / 2
        r = mpmath.sqrt(z)
        return mpmath.sin(r * mpmath.pi / 2) / r

    return S(b) * C(g) * g + C(b) * S(g) * x * x


@functools.lru_cache(maxsize=2)
def threshold_mp(dps: int = 40):
    """``(kappa, Lambda)`` as mpmath numbers, solving ``Psi = dPsi/dxi = 0``."""
    th = threshold()
    with mpmath.workdps(dps):
        f1 = lambda x, w: mpmath.re(_psi_mp(x, w))  # noqa: E731
        f2 = lambda x, w: mpmath.re(mpmath.diff(lambda s: _psi_mp(s, w), x))  # noqa: E731
        k, L = mpmath.findroot([f1, f2], (mpmath.mpf(th.kappa), mpmath.mpf(th.Lambda)))
        return +k, +L


def rayleigh_lamb_mp(xi, omega, dps: int = 40):
    with mpmath.workdps(dps):
        return _psi_mp(mpmath.mpmathify(xi), mpmath.mpmathify(omega))


# ---------------------------------------------------------------------------
# complex roots near the threshold


def _newton(omega, z0, tol=1e-13, maxiter=100):
    z = complex(z0)
    for _ in range(maxiter):
        psi, dpsi, _ = rayleigh_lamb_partials(z, omega)
        if dpsi == 0:
            break
        step = psi / dpsi
        z -= step
        if abs(step) < tol * max(1.0, abs(z)):
            break
    return z


@functools.lru_cache(maxsize=32)
def _leggauss(n):
    return np.polynomial.legendre.leggauss(n)


def _gauss_side(omega, z0, z1, n):
    x, wts = _leggauss(n)
    t = 0.5 * (x + 1.0)
    z = z0 + (z1 - z0) * t
    psi, dpsi, _ = rayleigh_lamb_partials(z, omega)
    return np.sum(wts * dpsi / psi) * 0.5 * (z1 - z0)


def argument_principle_count(omega, re_lo, re_hi, im_lo, im_hi, nodes_per_unit=60):
    """``(1/2 pi i) oint Psi_xi / Psi`` around a rectangle (counter-clockwise)."""
    corners = [complex(re_lo, im_lo), complex(re_hi, im_lo), complex(re_hi, im_hi), complex(re_lo, im_hi)]
    total = 0.0j
    for a, b in zip(corners, corners[1:] + corners[:1]):
        n = max(64, 32 * math.ceil(nodes_per_unit * abs(b - a) / 32))
        total += _gauss_side(omega, a, b, n)
    return total / (2j * math.pi)


def complex_roots_near_threshold(
    omega: complex,
    strip_height: float = 0.5,
    eps: float = 0.05,
    half_span: float = 8.0,
    th: ThresholdData | None = None,
) -> ComplexRootSet:
    """Four roots of ``Psi(., omega)`` in ``R + i[-Theta, Theta]`` for ``|omega - Lambda| < eps``.

    The count is certified by the argument principle over
    ``[-half_span, half_span] x [-Theta, Theta]``; ``|Psi|`` grows
    exponentially in ``|Re xi|`` so nothing is lost outside.
    """
    th = th or threshold()
    omega = complex(omega)
    if abs(omega - th.Lambda) >= eps:
        raise ValueError(f"|omega - Lambda| = {abs(omega - th.Lambda):.3g} exceeds eps={eps}")
    count = argument_principle_count(omega, -half_span, half_span, -strip_height, strip_height)
    n = round(count.real)
    if abs(count - n) > 0.1 or n != 4:
        raise RootCountMismatch(f"argument principle gives {count:.4f}, expected 4")
    d = 1j * np.sqrt(complex(th.Lambda - omega)) * (th.zeta1_pp / 2) ** -0.5
    seeds = [th.kappa + d, th.kappa - d, -th.kappa + d, -th.kappa - d]
    roots = tuple(_newton(omega, s) for s in seeds)
    for r in roots:
        if abs(r.imag) > strip_height:
            raise RootCountMismatch(f"Newton left the strip: {r}")
    return ComplexRootSet(omega=omega, roots=roots, strip_height=strip_height, winding_count=float(count.real))


# ---------------------------------------------------------------------------
# local expansion of Psi about (kappa, Lambda)

TAYLOR_S_RADIUS = 1e-2
TAYLOR_T_RADIUS = 1e-4


@functools.lru_cache(maxsize=2)
def threshold_taylor(deg_s: int = 12, deg_t: int = 5, dps: int = 50):
    """Coefficients ``c[i, j]`` with ``Psi(kappa + s, Lambda + tau) = sum c[i, j] s^i tau^j``.

    Obtained from a two-dimensional discrete Cauchy integral in extended
    precision around the extended-precision threshold, so the expansion is
    free of the cancellation that double precision suffers near the double
    root.
    """
    kappa, lam = threshold_mp(max(dps, 40))
    ms, mt = 4 * deg_s, 4 * deg_t
    rs, rt = mpmath.mpf("0.25"), mpmath.mpf("0.25")
    with mpmath.workdps(dps):
        vals = [
            [
                _psi_mp(kappa + rs * mpmath.expjpi(mpmath.mpf(2 * a) / ms), lam + rt * mpmath.expjpi(mpmath.mpf(2 * b) / mt))
                for b in range(mt)
            ]
            for a in range(ms)
        ]
        # separable discrete Cauchy sums: first over the tau circle, then over s
        half = [
            [sum(vals[a][b] * mpmath.expjpi(-mpmath.mpf(2 * b * j) / mt) for b in range(mt)) for j in range(deg_t + 1)]
            for a in range(ms)
        ]
        coef = np.zeros((deg_s + 1, deg_t + 1))
        for i in range(deg_s + 1):
            rot = [mpmath.expjpi(-mpmath.mpf(2 * a * i) / ms) for a in range(ms)]
            for j in range(deg_t + 1):
                acc = sum(half[a][j] * rot[a] for a in range(ms))
                coef[i, j] = float(mpmath.re(acc) / (ms * mt) / rs**i / rt**j)
    # Psi and dPsi/dxi vanish at the threshold by construction
    coef[0, 0] = 0.0
    coef[1, 0] = 0.0
    return coef


def rayleigh_lamb_gap(s, t):
    """``Psi(kappa + s, Lambda - t)`` for ``|s| <= 1e-2`` and ``0 <= t <= 1e-4``.

    ``kappa`` and ``Lambda`` are the exact threshold values, so the result keeps
    full relative accuracy even when ``t`` lies far below the spacing of
    doubles near ``Lambda``.
    """
    s = np.asarray(s, dtype=float)
    if np.any(np.abs(s) > TAYLOR_S_RADIUS) or not (0 <= t <= TAYLOR_T_RADIUS):
        raise ValueError("outside the validity region of the threshold expansion")
    c = threshold_taylor()
    return np.polynomial.polynomial.polyval2d(s, np.full_like(s, -t), c)
