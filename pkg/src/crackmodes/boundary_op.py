"""Galerkin discretisation of the rescaled truncated Dirichlet-to-Neumann operator.

Both geometries reduce to one radial engine.  Every basis function has a
transform of the form ``c_j * J_{a_j}(rho) / rho`` (2D, up to a unimodular
factor) or ``c_j * J_{a_j}(rho) / rho^{3/2}`` (3D channel, after the angular
integral), so that

    Q[j, k] = (1/ell) c_j c_k int_0^inf m(eta) J_{a_j}(ell eta) J_{a_k}(ell eta) / eta^2 d eta.

Splitting ``m(eta) = eta + (m(eta) - eta)`` gives ``ell Q = Q0 + C K C`` with
``Q0`` diagonal (``c_j^2 / (2 a_j)``) and ``K`` a rapidly converging integral.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .dispersion import threshold
from .dtn import dtn_symbol_gap, dtn_symbol_static
from .errors import OnEssentialSpectrum, QuadratureFailure

GL16 = np.polynomial.legendre.leggauss(16)
TAIL_TOL = 1e-12
PEAK_HALF_WIDTH = 0.1
NEAR_END = 30.0


# ---------------------------------------------------------------------------
# Bessel functions of integer order


def _bessel_series(m, x):
    # ascending series; used where the terms do not grow
    h = 0.5 * x
    term = h**m / math.factorial(m)
    total = term
    k = 0
    while abs(term) > 1e-18 * abs(total) or k < 2:
        k += 1
        term *= -h * h / (k * (k + m))
        total += term
        if k > 200:
            break
    return total


def _bessel_miller(m, x):
    # backward recurrence normalised by J0 + 2 sum J_2k = 1
    start = 2 * ((max(m, int(x)) + 20 + int(math.sqrt(40 * max(m, x)))) // 2)
    jp, j = 0.0, 1e-30
    total = 0.0
    keep = 0.0
    for k in range(start, 0, -1):
        jm = (2 * k / x) * j - jp
        jp, j = j, jm
        if k - 1 == m:
            keep = j
        if (k - 1) % 2 == 0 and k - 1 > 0:
            total += 2 * j
        if abs(j) > 1e250:
            j *= 1e-250
            jp *= 1e-250
            total *= 1e-250
            keep *= 1e-250
    total += j
    return keep / total


def _bessel_hankel(m, x):
    # large-argument expansion with the P, Q asymptotic series
    mu = 4.0 * m * m
    p, q = 1.0, 0.0
    term = 1.0
    for k in range(1, 30):
        term *= (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        if k % 2 == 1:
            q += term * (-1) ** ((k - 1) // 2)
        else:
            p += term * (-1) ** (k // 2)
        if abs(term) < 1e-17:
            break
    chi = x - (0.5 * m + 0.25) * math.pi
    return math.sqrt(2 / (math.pi * x)) * (p * math.cos(chi) - q * math.sin(chi))


def bessel_j(m: int, x: float) -> float:
    """Bessel function ``J_m(x)`` of integer order ``|m| <= 20``.

    Ascending series for ``|x| <= 8``, Miller's backward recurrence up to
    ``|x| = 1000`` and the Hankel asymptotic expansion beyond.
    """
    m = int(m)
    if abs(m) > 20:
        raise ValueError("order outside |m| <= 20")
    if not math.isfinite(x):
        raise ValueError("x must be finite")
    sign = 1.0
    if m < 0:
        m = -m
        sign *= (-1) ** m
    if x < 0:
        x = -x
        sign *= (-1) ** m
    if x == 0:
        return sign * (1.0 if m == 0 else 0.0)
    if x <= 8:
        return sign * _bessel_series(m, x)
    if x <= 1000:
        return sign * _bessel_miller(m, x)
    return sign * _bessel_hankel(m, x)


# ---------------------------------------------------------------------------
# bases


@dataclass(frozen=True)
class BasisSpec2D:
    """``phi_n(x) = U_n(x) sqrt(1 - x^2)`` on ``(-1, 1)``; even ``n`` for class ``s``, odd for ``as``."""

    N: int = 32
    parity: str = "s"
    quad_nodes: int = 256

    def __post_init__(self):
        if self.parity not in ("s", "as"):
            raise ValueError("parity must be 's' or 'as'")
        if self.N < 1:
            raise ValueError("N must be positive")

    @property
    def label(self) -> str:
        return self.parity

    @property
    def measure(self) -> float:
        return 2.0

    @property
    def n_values(self) -> np.ndarray:
        return 2 * np.arange(self.N) + (0 if self.parity == "s" else 1)

    @property
    def orders(self) -> np.ndarray:
        return (self.n_values + 1).astype(float)

    @property
    def coefficients(self) -> np.ndarray:
        n = self.n_values
        return (-1.0) ** (n // 2) * math.sqrt(math.pi) * (n + 1)

    def evaluate(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        w = np.sqrt(np.clip(1 - x * x, 0, None))
        return np.array([special.eval_chebyu(int(n), x) * w for n in self.n_values])

    def transform(self, xi) -> np.ndarray:
        """Unitary Fourier transforms ``phi_n^(xi)``."""
        xi = np.asarray(xi, dtype=float)
        n = self.n_values[:, None]
        return (-1j) ** n * math.sqrt(math.pi / 2) * (n + 1) * special.jv(n + 1, xi) / xi

    def load_vector(self, func) -> np.ndarray:
        """``<func, phi_n>`` in ``L2(-1, 1)`` by Gauss quadrature for the weight ``sqrt(1 - x^2)``."""
        x, w = _chebyu_rule(self.quad_nodes)
        vals = np.array([special.eval_chebyu(int(n), x) for n in self.n_values])
        return vals @ (w * func(x))

    def mass_matrix(self) -> np.ndarray:
        x, w = _jacobi_rule(self.N * 2 + 4, 1.0, 1.0)
        vals = np.array([special.eval_chebyu(int(n), x) for n in self.n_values])
        return (vals * w) @ vals.T

    def profile(self, ell) -> callable:
        kappa = threshold().kappa
        if self.parity == "s":
            return lambda x: np.cos(kappa * ell * x)
        return lambda x: np.sin(kappa * ell * x)

    def leading_profile(self) -> callable:
        return (lambda x: np.ones_like(x)) if self.parity == "s" else (lambda x: np.asarray(x, dtype=float))


@dataclass(frozen=True)
class BasisSpec3D:
    """``r^|m| (1 - r^2)^(1/2) P_k^{(|m|, 1/2)}(1 - 2 r^2) e^{i m phi}`` on the unit disk."""

    m: int = 0
    N: int = 32
    quad_nodes: int = 128

    def __post_init__(self):
        if abs(self.m) > 20:
            raise ValueError("channel outside |m| <= 20")
        if self.N < 1:
            raise ValueError("N must be positive")

    @property
    def label(self) -> str:
        return f"m={self.m}"

    @property
    def measure(self) -> float:
        return math.pi

    @property
    def k_values(self) -> np.ndarray:
        return np.arange(self.N)

    @property
    def orders(self) -> np.ndarray:
        return abs(self.m) + 2 * self.k_values + 1.5

    @property
    def coefficients(self) -> np.ndarray:
        k = self.k_values
        # sqrt(2 pi) times the Hankel-transform constant Gamma(k + 3/2) sqrt(2) / k!
        return math.sqrt(2 * math.pi) * np.exp(special.gammaln(k + 1.5) - special.gammaln(k + 1)) * math.sqrt(2)

    def radial(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        am = abs(self.m)
        w = r**am * np.sqrt(np.clip(1 - r * r, 0, None))
        return np.array([special.eval_jacobi(int(k), am, 0.5, 1 - 2 * r * r) * w for k in self.k_values])

    def hankel(self, rho) -> np.ndarray:
        """``int_0^1 g_k(r) J_|m|(rho r) r dr`` in closed form."""
        rho = np.asarray(rho, dtype=float)
        c = self.coefficients[:, None] / math.sqrt(2 * math.pi)
        return c * special.jv(self.orders[:, None], rho) / rho**1.5

    def load_vector(self, radial_func) -> np.ndarray:
        """``<f(r) e^{i m phi}, g_k>`` over the unit disk."""
        # r^2 = (1 - x)/2 maps the weight (1 - r^2)^(1/2) r dr to (1 + x)^(1/2) dx
        x, w = _jacobi_rule(self.quad_nodes, 0.0, 0.5)
        r = np.sqrt((1 - x) / 2)
        am = abs(self.m)
        vals = np.array([special.eval_jacobi(int(k), am, 0.5, x) for k in self.k_values])
        return 2 * math.pi * (vals @ (w * r**am * radial_func(r))) / (4 * math.sqrt(2))

    def mass_matrix(self) -> np.ndarray:
        x, w = _jacobi_rule(self.N * 2 + abs(self.m) + 4, 0.0, 1.0)
        am = abs(self.m)
        r2 = (1 - x) / 2
        vals = np.array([special.eval_jacobi(int(k), am, 0.5, x) for k in self.k_values])
        return 2 * math.pi * ((vals * w * r2**am) @ vals.T) / 8

    def profile(self, ell) -> callable:
        kappa = threshold().kappa
        am = abs(self.m)
        sign = (-1.0) ** am if self.m < 0 else 1.0
        return lambda r: sign * special.jv(am, kappa * ell * r)

    def leading_profile(self) -> callable:
        am = abs(self.m)
        return lambda r: np.asarray(r, dtype=float) ** am


@functools.lru_cache(maxsize=16)
def _chebyu_rule(n):
    return special.roots_chebyu(n)


@functools.lru_cache(maxsize=64)
def _jacobi_rule(n, alpha, beta):
    return special.roots_jacobi(n, alpha, beta)


# ---------------------------------------------------------------------------
# assembled blocks


@dataclass(frozen=True)
class GalerkinBlock:
    label: str
    ell: float
    omega: float
    gap: float
    Q_matrix: np.ndarray
    Q0_matrix: np.ndarray
    M_matrix: np.ndarray
    rank_one_vector: np.ndarray
    meta: dict = field(default_factory=dict)


def assemble_q0(basis, method: str = "closed") -> np.ndarray:
    """Matrix of ``q0[g, h] = int |xi| g^ conj(h^)``.

    ``closed`` uses the Weber-Schafheitlin value ``int_0^inf J_a J_b / t dt``;
    ``quadrature`` integrates the transforms numerically with an asymptotic tail.
    """
    a = basis.orders
    c = basis.coefficients
    if method == "closed":
        return np.diag(c * c / (2 * a))
    if method == "quadrature":
        return np.outer(c, c) * _bessel_pair_over_t(tuple(a))
    raise ValueError(f"unknown method {method!r}")


@functools.lru_cache(maxsize=16)
def _bessel_pair_over_t(orders, cutoff=None):
    # int_0^X J_a J_b / t by panels plus the large-t tail of the Hankel asymptotics
    a = np.asarray(orders)
    if cutoff is None:
        cutoff = max(4000.0, 20.0 * a.max() ** 2)
    n_panels = int(math.ceil(cutoff / (math.pi / 2)))
    cutoff = n_panels * math.pi / 2
    t, wt = _panel_nodes(0.0, cutoff, math.pi / 2)
    B = special.jv(a[:, None], t[None, :])
    out = (B * (wt / t)) @ B.T
    A, Bm = a[:, None], a[None, :]
    # J_a J_b ~ [cos((a - b) pi/2) + cos(2t - (a + b + 1) pi/2)] / (pi t)
    out += np.cos(0.5 * np.pi * (A - Bm)) / (np.pi * cutoff)
    out -= np.sin(2 * cutoff - 0.5 * np.pi * (A + Bm + 1)) / (2 * np.pi * cutoff**2)
    return out


def _panel_nodes(lo, hi, width):
    n = max(1, int(math.ceil((hi - lo) / width)))
    edges = np.linspace(lo, hi, n + 1)
    x, w = GL16
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    return (mid[:, None] + half[:, None] * x[None, :]).ravel(), (half[:, None] * w[None, :]).ravel()


def _tail_cutoff(ell, max_order, amp=2.0, tol=TAIL_TOL):
    # the uncorrected tail is bounded by amp * 2/(pi ell) / (3 X^3); its mean
    # part is added back analytically, leaving an O(1/(ell X)) fraction of it
    X = (2 * amp / (3 * math.pi * ell * tol)) ** (1.0 / 3.0)
    return max(X, 4 * max_order / ell, 2 * NEAR_END)


@functools.lru_cache(maxsize=64)
def _fixed_nodes(ell, max_order, static):
    """Nodes and weights away from the threshold peak (independent of the gap)."""
    X = _tail_cutoff(ell, max_order)
    if static:
        e1, w1 = _panel_nodes(0.0, NEAR_END, 0.5)
    else:
        kappa = threshold().kappa
        ea, wa = _panel_nodes(0.0, kappa - PEAK_HALF_WIDTH, 0.15)
        ec, wc = _panel_nodes(kappa + PEAK_HALF_WIDTH, NEAR_END, 0.5)
        e1, w1 = np.concatenate([ea, ec]), np.concatenate([wa, wc])
    e2, w2 = _panel_nodes(NEAR_END, X, math.pi / ell)
    return np.concatenate([e1, e2]), np.concatenate([w1, w2]), X


@functools.lru_cache(maxsize=64)
def _fixed_bessel(orders, ell, static):
    eta, w, X = _fixed_nodes(ell, max(orders), static)
    B = special.jv(np.asarray(orders)[:, None], ell * eta[None, :])
    return eta, w, X, B


def _peak_nodes(t):
    """Nodes ``s`` on ``[-d, d]`` with ``s = sqrt(t/a) sinh(u)`` resolving the Lorentzian of width ``sqrt(t/a)``."""
    a = 0.5 * threshold().zeta1_pp
    h = math.sqrt(t / a)
    U = math.asinh(PEAK_HALF_WIDTH / h)
    u, wu = _panel_nodes(-U, U, 0.5)
    s = h * np.sinh(u)
    return s, wu * h * np.cosh(u)


def symbol_residual_matrix(basis, ell: float, omega: float | None = None, gap: float | None = None):
    """``K[j, k] = int_0^inf (m(eta) - eta) J_{a_j}(ell eta) J_{a_k}(ell eta) / eta^2 d eta``.

    Pass ``gap = Lambda - omega`` to keep the gap exact; ``omega = 0`` selects the
    static symbol.  Returns ``(K, meta)``.
    """
    th = threshold()
    static = omega is not None and omega == 0.0
    if not static:
        if gap is None:
            if omega is None:
                raise ValueError("give omega or gap")
            gap = th.Lambda - omega
        if not gap > 0:
            raise OnEssentialSpectrum(f"omega = Lambda - {gap} lies in the essential spectrum")
    orders = tuple(float(v) for v in basis.orders)
    eta, w, X, B = _fixed_bessel(orders, float(ell), static)
    if static:
        r = dtn_symbol_static(eta) - eta
    else:
        r = dtn_symbol_gap(eta - th.kappa, gap) - eta
    amp = abs(r[-1]) * eta[-1]
    if amp > 2.0:
        raise QuadratureFailure(f"residual symbol decays slower than assumed (amp={amp:.3g})")
    K = (B * (w * r / eta**2)) @ B.T
    # r ~ -amp/eta beyond X and J_a J_b averages to cos((a - b) pi/2) / (pi ell eta)
    a = np.asarray(orders)
    K += -np.sign(r[-1]) * amp * np.cos(0.5 * np.pi * (a[:, None] - a[None, :])) / (3 * math.pi * ell * X**3)
    if not static:
        s, ws = _peak_nodes(gap)
        ep = th.kappa + s
        rp = dtn_symbol_gap(s, gap) - ep
        Bp = special.jv(np.asarray(orders)[:, None], ell * ep[None, :])
        K += (Bp * (ws * rp / ep**2)) @ Bp.T
    tail = amp * 2 / (math.pi * ell) / (3 * X**3) / (ell * X)
    return K, {"cutoff": X, "tail_bound": tail, "gap": gap}


def assemble_q(basis, ell: float, omega: float | None = None, gap: float | None = None) -> np.ndarray:
    """Galerkin matrix of ``q(ell, omega)[g, h] = int m_omega(xi/ell) g^ conj(h^) d xi``."""
    K, _ = symbol_residual_matrix(basis, ell, omega=omega, gap=gap)
    c = basis.coefficients
    return (assemble_q0(basis) + c[:, None] * K * c[None, :]) / ell


def rank_one_vector(basis, ell: float) -> np.ndarray:
    """``<Phi_ell, phi_j>``: cos/sin(kappa ell x) in 2D, ``J_m(kappa ell r) e^{i m phi}`` in 3D."""
    return basis.load_vector(basis.profile(ell))


def galerkin_block(basis, ell: float, omega: float | None = None, gap: float | None = None) -> GalerkinBlock:
    th = threshold()
    K, meta = symbol_residual_matrix(basis, ell, omega=omega, gap=gap)
    c = basis.coefficients
    Q0 = assemble_q0(basis)
    Q = (Q0 + c[:, None] * K * c[None, :]) / ell
    g = meta["gap"] if omega != 0.0 else th.Lambda
    return GalerkinBlock(
        label=basis.label,
        ell=float(ell),
        omega=float(th.Lambda - g) if omega is None else float(omega),
        gap=float(g),
        Q_matrix=Q,
        Q0_matrix=Q0,
        M_matrix=basis.mass_matrix(),
        rank_one_vector=rank_one_vector(basis, ell),
        meta=meta,
    )
