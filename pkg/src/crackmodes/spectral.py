"""Trapped-mode eigenvalues below the threshold and power-law fits of the gaps."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, optimize

from .boundary_op import BasisSpec2D, BasisSpec3D, assemble_q, assemble_q0, rank_one_vector
from .dispersion import threshold
from .errors import DegenerateFit, FixedPointDivergence, NoSignChange
from .modes import threshold_mode

DEFAULT_WINDOW = (1e-30, 2.5e-2)


@dataclass(frozen=True)
class EigenResult:
    ell: float
    label: str
    lam: float
    route: str
    mu1_residual: float
    gap: float
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    prefactor: float
    r_squared: float
    ell_grid: tuple
    residuals: tuple

    def as_dict(self) -> dict:
        return {
            "exponent": self.exponent,
            "prefactor": self.prefactor,
            "r_squared": self.r_squared,
            "ell_grid": list(self.ell_grid),
            "residuals": list(self.residuals),
        }


def make_basis(label: str, N: int = 32):
    """``'s'``/``'as'`` for the strip classes, ``'m=<int>'`` (or an int) for a plate channel."""
    if isinstance(label, int):
        return BasisSpec3D(m=label, N=N)
    if label in ("s", "as"):
        return BasisSpec2D(N=N, parity=label)
    if label.startswith("m="):
        return BasisSpec3D(m=int(label[2:]), N=N)
    raise ValueError(f"unknown class {label!r}")


def _gap_of(omega, gap):
    if gap is None:
        if omega is None:
            raise ValueError("give omega or gap")
        gap = threshold().Lambda - omega
    return gap


def mu_values(basis, ell: float, omega: float | None = None, gap: float | None = None, count: int = 2):
    """Smallest generalized eigenvalues of ``Q v = mu M v`` on the class block."""
    Q = assemble_q(basis, ell, omega=omega, gap=gap)
    M = basis.mass_matrix()
    return linalg.eigh(Q, M, eigvals_only=True, subset_by_index=[0, count - 1])


def mu1(basis, ell: float, omega: float | None = None, gap: float | None = None) -> float:
    return float(mu_values(basis, ell, omega=omega, gap=gap, count=1)[0])


def find_eigenvalue_direct(basis, ell: float, window=DEFAULT_WINDOW, rtol: float = 1e-12) -> EigenResult:
    """Unique zero of ``t -> mu1(ell, Lambda - t)``, located in ``log t``.

    ``mu1`` decreases in ``omega`` so it increases in the gap ``t``; the root
    is bracketed by the window and refined by Brent's method in log
    coordinates, which keeps gaps far below double spacing near ``Lambda``
    resolvable.
    """
    th = threshold()
    lo, hi = math.log(window[0]), math.log(window[1])

    def f(logt):
        return mu1(basis, ell, gap=math.exp(logt))

    f_hi = f(hi)
    if f_hi <= 0:
        raise NoSignChange(f"mu1 <= 0 at the top of the window (ell={ell} too large)")
    f_lo = f(lo)
    if f_lo >= 0:
        raise NoSignChange(f"mu1 >= 0 at the bottom of the window (ell={ell} too small)")
    logt, info = optimize.brentq(f, lo, hi, xtol=rtol, rtol=rtol, full_output=True)
    t = math.exp(logt)
    return EigenResult(
        ell=float(ell),
        label=basis.label,
        lam=th.Lambda - t,
        route="direct",
        mu1_residual=abs(f(logt)),
        gap=t,
        meta={"iterations": info.iterations, "N": basis.N},
    )


def coupling_constant(basis, ell: float) -> float:
    """``c(ell)`` of the rank-one singular term of ``ell Q`` (coefficient of ``<., Phi> Phi / sqrt(t)``)."""
    th = threshold()
    d2 = threshold_mode().abs_dpsi ** 2
    if isinstance(basis, BasisSpec2D):
        return 8 * ell**2 * d2 / math.sqrt(2 * th.zeta1_pp)
    return 4 * th.kappa * ell**3 * d2 / math.sqrt(2 * th.zeta1_pp)


def regular_part(basis, ell: float, gap: float):
    """``T = ell Q + c(ell) / sqrt(t) Phi Phi^T``, with the singular rank-one term removed."""
    f = rank_one_vector(basis, ell)
    c = coupling_constant(basis, ell)
    return ell * assemble_q(basis, ell, gap=gap) + (c / math.sqrt(gap)) * np.outer(f, f), f, c


def find_eigenvalue_birman_schwinger(
    basis, ell: float, max_iter: int = 100, rtol: float = 1e-12, window=DEFAULT_WINDOW
) -> EigenResult:
    """Fixed point of ``sqrt(t) = c(ell) <T(t)^{-1} Phi, Phi>``."""
    th = threshold()
    f = rank_one_vector(basis, ell)
    c = coupling_constant(basis, ell)
    root_t = c * f @ np.linalg.solve(assemble_q0(basis), f)
    history = [root_t**2]
    for it in range(1, max_iter + 1):
        t = root_t**2
        if not (window[0] <= t <= window[1]):
            raise FixedPointDivergence(f"iterate t={t:.3e} left the window")
        T, f, c = regular_part(basis, ell, t)
        new = c * f @ np.linalg.solve(T, f)
        if not new > 0:
            raise FixedPointDivergence("non-positive fixed-point iterate")
        history.append(new**2)
        if abs(new - root_t) <= rtol * new:
            root_t = new
            break
        root_t = new
    else:
        raise FixedPointDivergence(f"no convergence in {max_iter} iterations")
    t = root_t**2
    return EigenResult(
        ell=float(ell),
        label=basis.label,
        lam=th.Lambda - t,
        route="birman_schwinger",
        mu1_residual=abs(mu1(basis, ell, gap=t)),
        gap=t,
        meta={"iterations": it, "N": basis.N, "history": history},
    )


def fit_power_law(pairs, fixed_exponent: float | None = None) -> PowerLawFit:
    """Least-squares line through ``(log ell, log gap)``.

    With ``fixed_exponent`` only the intercept is fitted, i.e. the prefactor is
    the geometric mean of ``gap / ell**p``.
    """
    pairs = sorted(((float(a), float(b)) for a, b in pairs), reverse=True)
    if len(pairs) < 4:
        raise DegenerateFit("need at least four (ell, gap) pairs")
    ell = np.array([p[0] for p in pairs])
    gap = np.array([p[1] for p in pairs])
    if np.any(ell <= 0) or np.any(gap <= 0):
        raise DegenerateFit("ell and gap must be positive")
    if ell.max() / ell.min() < 2:
        raise DegenerateFit("ell values span less than a factor 2")
    x, y = np.log(ell), np.log(gap)
    if fixed_exponent is None:
        slope, intercept = np.polyfit(x, y, 1)
    else:
        slope = float(fixed_exponent)
        intercept = float(np.mean(y - slope * x))
    res = y - (slope * x + intercept)
    ss_tot = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(res**2) / ss_tot if ss_tot > 0 else 1.0
    return PowerLawFit(
        exponent=float(slope),
        prefactor=float(math.exp(intercept)),
        r_squared=float(r2),
        ell_grid=tuple(ell.tolist()),
        residuals=tuple(res.tolist()),
    )


ROUTES = {"direct": find_eigenvalue_direct, "birman_schwinger": find_eigenvalue_birman_schwinger}


def _solve_one(task):
    label, ell, route, N, rtol = task
    return ROUTES[route](make_basis(label, N), ell, rtol=rtol)


def solve_grid(labels, ells, route: str = "direct", N: int = 32, rtol: float = 1e-12, workers: int = 1):
    """Eigenvalues for every ``(class, ell)`` pair; ``route='both'`` runs both routes.

    Results come back in task order (class, then ``ell``, then route) whatever
    the worker count, so tables built from them are reproducible.
    """
    routes = ("direct", "birman_schwinger") if route == "both" else (route,)
    tasks = [(lab, float(ell), r, int(N), float(rtol)) for lab in labels for ell in ells for r in routes]
    if workers <= 1 or len(tasks) <= 1:
        return [_solve_one(t) for t in tasks]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_solve_one, tasks))
