"""Command-line front end: ``crackmodes <command> [flags]``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 acceptance failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import acceptance, io
from .asymptotics import constants_report, nu_constants_2d, rho_constant_3d
from .boundary_op import GalerkinBlock, galerkin_block
from .config import COMMANDS, ROUTES, build_config, convert, load_config_file
from .dispersion import branch_eigenvalues, threshold
from .dtn import OMEGA_MIN, dtn_symbol_static, dtn_symbol_values
from .errors import ConfigError, CrackModesError
from .modes import normalized_mode, threshold_mode
from .spectral import fit_power_law, make_basis, solve_grid

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_ACCEPTANCE = 0, 2, 3, 4

log = logging.getLogger("crackmodes")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="crackmodes", description="Trapped modes of cracked elastic strips and plates.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="flat key = value file; flags given here take precedence")
    p.add_argument("--dimension", type=str)
    p.add_argument("--class", dest="class_", type=str, help="s, as, m=<int> or all")
    p.add_argument("--ell", type=str, help="comma-separated crack half-lengths, descending")
    p.add_argument("--N", type=str, help="basis functions per class or channel")
    p.add_argument("--tol", type=str, help="relative tolerance of the eigenvalue solvers")
    p.add_argument("--out", type=str, help="output directory")
    p.add_argument("--route", type=str, help=f"one of {', '.join(ROUTES)}")
    p.add_argument("--workers", type=str)
    p.add_argument("--seed", type=str)
    p.add_argument("--dry-run", action="store_true", default=None)
    p.add_argument("--no-cache", dest="cache", action="store_false", default=None)
    p.add_argument("--branches", type=str, help="number of dispersion branches")
    p.add_argument("--xi", type=str, help="wavenumber range a:b:step")
    p.add_argument("--omega", type=str, help="frequency for symbol traces (default Lambda - gap)")
    p.add_argument("--gap", type=str, help="Lambda - omega for assembled blocks and symbol traces")
    p.add_argument("--channels", type=str, help="comma-separated channels for the constants report")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(args):
    file_values = load_config_file(args.config) if args.config else {}
    overrides = {"command": args.command}
    for key in ("dimension", "ell", "N", "tol", "out", "route", "workers", "seed", "branches", "xi", "omega", "gap", "channels"):
        val = getattr(args, key)
        if val is not None:
            overrides[key] = convert(key, val)
    if args.class_ is not None:
        overrides["class"] = convert("class", args.class_)
    if args.dry_run is not None:
        overrides["dry_run"] = True
    if args.cache is not None:
        overrides["cache"] = False
    return build_config(file_values, overrides)


# ---------------------------------------------------------------------------
# commands


def cmd_threshold(cfg) -> list:
    th = threshold()
    mode = threshold_mode()
    payload = th.as_dict()
    payload["abs_dpsi2_at_0"] = mode.abs_dpsi
    profile = normalized_mode(th.kappa, th.Lambda)
    x2 = np.linspace(0.0, 0.5 * np.pi, 101)
    return [
        io.write_json(Path(cfg.out) / "threshold.json", "threshold", payload),
        io.write_csv(Path(cfg.out) / "mode.csv", "mode", io.mode_rows(x2, profile.profile(x2))),
    ]


def cmd_dispersion(cfg) -> list:
    rows = []
    for xi in cfg.xi_grid():
        rows += io.dispersion_rows(branch_eigenvalues(xi, cfg.branches))
    out = [io.write_csv(Path(cfg.out) / "dispersion.csv", "dispersion", rows)]
    return out + cmd_threshold(cfg)


def cmd_symbol(cfg) -> list:
    xi = np.asarray(cfg.xi_grid())
    omega = threshold().Lambda - cfg.gap if cfg.omega is None else cfg.omega
    if abs(omega) < OMEGA_MIN:
        omega, values = 0.0, dtn_symbol_static(xi)
    else:
        values = dtn_symbol_values(xi, omega)
    return [io.write_csv(Path(cfg.out) / "symbol.csv", "symbol", io.symbol_rows(xi, omega, values))]


def _labels(cfg):
    return cfg.classes()


def cmd_assemble(cfg) -> list:
    out = Path(cfg.out) / "matrices"
    cache = io.BlockCache(Path(cfg.out) / "cache") if cfg.cache else None
    written = []
    for lab in _labels(cfg):
        basis = make_basis(lab, cfg.N)
        for ell in cfg.ell:
            hit = cache.load(lab, ell, cfg.gap, cfg.N) if cache is not None else None
            if hit is not None:
                block = GalerkinBlock(
                    label=lab,
                    ell=float(ell),
                    omega=threshold().Lambda - cfg.gap,
                    gap=cfg.gap,
                    Q_matrix=hit["Q"],
                    Q0_matrix=hit["Q0"],
                    M_matrix=hit["M"],
                    rank_one_vector=hit["f"],
                    meta=hit["meta"],
                )
            else:
                block = galerkin_block(basis, ell, gap=cfg.gap)
                if cache is not None:
                    cache.store(
                        lab, ell, cfg.gap, cfg.N, block.Q_matrix, block.Q0_matrix, block.M_matrix,
                        block.rank_one_vector, block.meta,
                    )
            stem = f"{lab.replace('=', '')}_ell{ell:g}"
            io.write_block(out, stem, block, cfg.dimension, cfg.N)
            written.append(out / f"{stem}.json")
    return written


def cmd_solve(cfg) -> list:
    results = solve_grid(_labels(cfg), cfg.ell, route=cfg.route, N=cfg.N, rtol=cfg.tol, workers=cfg.workers)
    out = Path(cfg.out)
    table = io.write_csv(out / "eigenvalues.csv", "eigen", io.eigen_rows(results))
    summary = io.write_json(out / "solve.json", "solve", {"rows": len(results), "config": cfg.as_dict()})
    return [table, summary]


def _reference(label: str, N: int):
    """Expected exponent and leading constant of the class."""
    if label in ("s", "as"):
        nus = nu_constants_2d(N)["closed"]
        return (4.0, nus["nu1"]) if label == "s" else (8.0, nus["nu2"])
    m = int(label[2:])
    return 6.0 + 4 * abs(m), rho_constant_3d(m, N)


def cmd_fit(cfg) -> list:
    table = Path(cfg.out) / "eigenvalues.csv"
    if not table.exists():
        raise ConfigError(f"{table} not found: run 'solve' first with the same --out")
    rows = io.read_csv(table)
    groups = {}
    for r in rows:
        groups.setdefault((r["class"], r["route"]), []).append((float(r["ell"]), float(r["gap"])))
    fits = []
    for (lab, route), pairs in sorted(groups.items()):
        fit = fit_power_law(pairs)
        p, ref = _reference(lab, cfg.N)
        fixed = fit_power_law(pairs, fixed_exponent=p)
        entry = {"class": lab, "route": route, **fit.as_dict()}
        entry.update(expected_exponent=p, fixed_exponent_prefactor=fixed.prefactor, reference_prefactor=ref)
        fits.append(entry)
    return [io.write_json(Path(cfg.out) / "fit.json", "fit", {"fits": fits})]


def cmd_constants(cfg) -> list:
    report = constants_report(channels=cfg.channels, N=cfg.N)
    return [io.write_json(Path(cfg.out) / "constants.json", "constants", report.as_dict())]


def cmd_reproduce(cfg) -> tuple:
    channels = (0, 1)
    if cfg.dimension == 3 and cfg.class_ != "all":
        channels = (int(cfg.class_[2:]),)
    results = acceptance.run_all(cfg.dimension, channels=channels, N=cfg.N, seed=cfg.seed, workers=cfg.workers)
    for r in results:
        log.info(r.line())
    passed = all(r.passed for r in results)
    doc = {"criteria": [r.as_dict() for r in results], "passed": passed, "config": cfg.as_dict()}
    path = io.write_json(Path(cfg.out) / "report.json", "report", doc)
    return [path], passed


HANDLERS = {
    "dispersion": cmd_dispersion,
    "threshold": cmd_threshold,
    "symbol": cmd_symbol,
    "assemble": cmd_assemble,
    "solve": cmd_solve,
    "fit": cmd_fit,
    "constants": cmd_constants,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if cfg.dry_run:
        print(json.dumps(cfg.as_dict(), sort_keys=True))
        return EXIT_OK
    try:
        if cfg.command == "reproduce":
            files, passed = cmd_reproduce(cfg)
        else:
            files, passed = HANDLERS[cfg.command](cfg), True
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CrackModesError, ArithmeticError, np.linalg.LinAlgError, ValueError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    for f in files:
        print(f)
    return EXIT_OK if passed else EXIT_ACCEPTANCE


if __name__ == "__main__":
    sys.exit(main())
