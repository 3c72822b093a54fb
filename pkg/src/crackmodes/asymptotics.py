"""Leading-order constants of the gap asymptotics and the expansion remainder."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, special

from .boundary_op import BasisSpec2D, BasisSpec3D, assemble_q, assemble_q0, rank_one_vector
from .dispersion import threshold
from .errors import IngredientMismatch
from .modes import threshold_mode
from .spectral import coupling_constant


@dataclass(frozen=True)
class AsymptoticConstants:
    nu1: float
    nu2: float
    rho: dict
    ingredients: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "nu1": self.nu1,
            "nu2": self.nu2,
            "rho": {str(k): v for k, v in self.rho.items()},
            "ingredients": self.ingredients,
            "checks": self.checks,
        }


def q0_inverse_inner(basis) -> float:
    """``<Q0^{-1} Psi, Psi>`` for the leading profile of the class (1, x or r^|m| e^{i m phi})."""
    f = basis.load_vector(basis.leading_profile())
    return float(f @ np.linalg.solve(assemble_q0(basis), f))


def q0_inverse_inner_disk_closed(m: int) -> float:
    """Closed form on the unit disk, from ``(-Delta)^{1/2}[(1-r^2)^{1/2} r^|m| e^{i m phi}] = const * r^|m| e^{i m phi}``."""
    am = abs(m)
    coef = special.gamma(1 + am) / (2 * special.gamma(1.5) * special.gamma(1.5 + am))
    return float(coef * 2 * math.pi * 0.5 * special.beta(am + 1, 1.5))


def nu_constants_2d(N: int = 32, rtol: float = 1e-6) -> dict:
    """``nu1``, ``nu2`` from the numerically inverted ``Q0`` and from the interval closed forms."""
    th = threshold()
    d4 = threshold_mode().abs_dpsi ** 4
    ct = q0_inverse_inner(BasisSpec2D(N, "s"))
    idv = q0_inverse_inner(BasisSpec2D(N, "as"))
    general = {
        "nu1": 32 * d4 / th.zeta1_pp * ct**2,
        "nu2": 32 * th.kappa**4 * d4 / th.zeta1_pp * idv**2,
    }
    closed = {
        "nu1": 8 * math.pi**2 * d4 / th.zeta1_pp,
        "nu2": math.pi**2 * th.kappa**4 * d4 / (8 * th.zeta1_pp),
    }
    for key in general:
        if abs(general[key] - closed[key]) > rtol * abs(closed[key]):
            raise IngredientMismatch(f"{key}: general {general[key]!r} vs closed form {closed[key]!r}")
    return {"general": general, "closed": closed, "q0_inverse": {"ct": ct, "id": idv}}


def rho_constant_3d(m: int, N: int = 32) -> float:
    """Leading coefficient ``rho_m`` of ``Lambda - lambda_m = rho_m ell^{6 + 4|m|}``.

    ``8 kappa^{4|m|+2} |d|^4 / (2^{4|m|} (|m|!)^4 zeta1'') <Q0^{-1} Psi_m, Psi_m>^2``; the
    factorial comes from the leading Taylor coefficient of ``J_|m|``.
    """
    th = threshold()
    am = abs(m)
    d4 = threshold_mode().abs_dpsi ** 4
    inner = q0_inverse_inner(BasisSpec3D(m, N))
    return (
        8 * th.kappa ** (4 * am + 2) * d4 / (2 ** (4 * am) * math.factorial(am) ** 4 * th.zeta1_pp) * inner**2
    )


def constants_report(channels=(-2, -1, 0, 1, 2), N: int = 32) -> AsymptoticConstants:
    th = threshold()
    mode = threshold_mode()
    nus = nu_constants_2d(N)
    rho = {m: rho_constant_3d(m, N) for m in channels}
    disk = {m: q0_inverse_inner(BasisSpec3D(m, N)) for m in channels}
    disk_closed = {m: q0_inverse_inner_disk_closed(m) for m in channels}
    ingredients = {
        "Lambda": {"value": th.Lambda, "source": "dispersion.threshold"},
        "kappa": {"value": th.kappa, "source": "dispersion.threshold"},
        "zeta1_pp": {"value": th.zeta1_pp, "source": "dispersion.threshold (Richardson)"},
        "abs_dpsi2_at_0": {"value": mode.abs_dpsi, "source": "modes.threshold_mode"},
        "q0_inverse_ct": {"value": nus["q0_inverse"]["ct"], "source": "boundary_op 2D s block"},
        "q0_inverse_id": {"value": nus["q0_inverse"]["id"], "source": "boundary_op 2D as block"},
        "q0_inverse_disk": {
            str(m): {"value": disk[m], "closed_form": disk_closed[m], "source": "boundary_op 3D channel"}
            for m in channels
        },
    }
    checks = {
        "nu1_general_vs_closed": abs(nus["general"]["nu1"] / nus["closed"]["nu1"] - 1),
        "nu2_general_vs_closed": abs(nus["general"]["nu2"] / nus["closed"]["nu2"] - 1),
        "nu2_over_nu1_minus_kappa4_over_64": abs(nus["closed"]["nu2"] / nus["closed"]["nu1"] - th.kappa**4 / 64),
        "ct_minus_pi_over_2": abs(nus["q0_inverse"]["ct"] - math.pi / 2),
        "id_minus_pi_over_16": abs(nus["q0_inverse"]["id"] - math.pi / 16),
        "rho_positive": all(v > 0 for v in rho.values()),
    }
    return AsymptoticConstants(
        nu1=nus["closed"]["nu1"], nu2=nus["closed"]["nu2"], rho=rho, ingredients=ingredients, checks=checks
    )


def singular_coefficient_2d(gap: float, measure: float = 2.0) -> float:
    """``4 |Gamma| |d|^2 / (sqrt(t) sqrt(2 zeta1''))``: weight of ``ell <., Phi> Phi`` in ``Q``."""
    th = threshold()
    return 4 * measure * threshold_mode().abs_dpsi ** 2 / (math.sqrt(gap) * math.sqrt(2 * th.zeta1_pp))


def expansion_remainder(basis, ell: float, gap: float) -> np.ndarray:
    """``R = Q - Q0/ell + (singular rank-one term)`` on the class block."""
    Q = assemble_q(basis, ell, gap=gap)
    f = rank_one_vector(basis, ell)
    c = coupling_constant(basis, ell)
    return Q - assemble_q0(basis) / ell + (c / (ell * math.sqrt(gap))) * np.outer(f, f)


def remainder_norm(basis, ell: float, gap: float) -> float:
    """Largest ``|mu|`` of ``R v = mu M v``: the operator norm of the remainder in ``L2``."""
    R = expansion_remainder(basis, ell, gap)
    mu = linalg.eigh(0.5 * (R + R.T), basis.mass_matrix(), eigvals_only=True)
    return float(np.max(np.abs(mu)))
