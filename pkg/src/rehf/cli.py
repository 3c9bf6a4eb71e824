"""Command-line interface.

Subcommands
-----------
mu-solve    solve the homogeneous neutrality equation for mu
multiplier  tabulate the screening multiplier and preconditioner symbol (CSV)
solve       run one disordered realization and write the solve report (JSON)
ensemble    fan a seed range across a worker pool, aggregate results (CSV)
verify      run the property suite and write the verdict matrix (JSON)

Exit codes: 0 success, 1 verification check failure, 2 configuration error,
3 numeric or convergence error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import io, jellium, screening, solver, verify
from .disorder import DisorderSpec, sample
from .errors import (ConfigError, ConvergenceError, HypothesisError,
                     NumericError, RehfError, SpecValidationError)
from .grids import Grid
from .solver import SolveConfig

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _error_category(exc: RehfError) -> str:
    return {
        HypothesisError: "hypothesis-failure",
        NumericError: "numeric-failure",
        ConvergenceError: "non-convergence",
        SpecValidationError: "spec-validation",
        ConfigError: "configuration",
    }.get(type(exc), type(exc).__name__)


def _problem_from_config(cfg: dict, seed: int):
    grid = Grid(cfg["lattice_a"], cfg["n_cells"], cfg["n_pts"])
    kappa0 = cfg["kappa0_qbar"] / cfg["lattice_a"] ** 3
    params = jellium.params_from_kappa0(cfg["beta"], kappa0)
    spec = DisorderSpec(a=cfg["lattice_a"], qbar=cfg["kappa0_qbar"],
                        width=cfg["disorder_width"], seed=seed)
    solve_cfg = SolveConfig(tol_delta=cfg["tol_delta"],
                            tol_residual=cfg["tol_residual"],
                            max_iter=cfg["max_iter"], mixing=cfg["mixing"])
    return grid, params, spec, solve_cfg


def _run_one(cfg: dict, seed: int):
    grid, params, spec, solve_cfg = _problem_from_config(cfg, seed)
    sym = screening.build_L_symbol(grid, params)
    realization = sample(spec, grid)
    phi0 = solver.linear_response_init(realization, sym)
    phi, report = solver.solve(realization, params, grid, sym, solve_cfg, phi0=phi0)
    return phi, report, realization


def cmd_mu_solve(args) -> int:
    lo, hi = jellium.mu_bracket(args.kappa0, args.beta)
    mu = jellium.solve_mu(args.kappa0, args.beta)
    print(f"mu        = {mu:.12g}")
    print(f"bracket   = ({lo:.12g}, {hi:.12g})")
    print(f"A(mu)     = {jellium.density_A(mu, args.beta):.12g}")
    return EXIT_OK


def cmd_multiplier(args) -> int:
    import numpy as np

    params = jellium.params_from_mu(args.beta, args.mu)
    ps = np.logspace(np.log10(args.p_min), np.log10(args.p_max), args.points)
    rows = ["p,m_closed_form,m_contour,rel_diff,L_symbol"]
    for p in ps:
        closed = screening.m_of_p(float(p), params)
        contour = screening.m_contour_oracle(float(p), params)
        rel = abs(closed - contour) / abs(closed)
        lsym = p * p / screening.FOUR_PI + closed
        rows.append(f"{p:.17g},{closed:.17g},{contour:.17g},{rel:.17g},{lsym:.17g}")
    Path(args.out).write_text("\n".join(rows) + "\n")
    print(f"wrote {args.points} rows to {args.out}")
    return EXIT_OK


def cmd_solve(args) -> int:
    cfg = io.parse_config(args.config)
    phi, report, realization = _run_one(cfg, args.seed)
    io.write_report(args.out, report)
    print(f"converged in {report.iterations} iterations, "
          f"residual {report.residual:.3e}; report -> {args.out}")
    if args.dump_phi:
        io.write_field(args.dump_phi, phi, name="phi")
        print(f"phi field -> {args.dump_phi}")
    if args.dump_kappa:
        io.write_field(args.dump_kappa, realization.kappa, name="kappa")
        print(f"kappa field -> {args.dump_kappa}")
    return EXIT_OK


def _ensemble_worker(payload):
    cfg, seed = payload
    _, report, _ = _run_one(cfg, seed)
    return seed, report


def cmd_ensemble(args) -> int:
    cfg = io.parse_config(args.config)
    try:
        s0, s1 = (int(tok) for tok in args.seeds.split(".."))
    except ValueError as exc:
        raise ConfigError(f"--seeds must look like S0..S1, got {args.seeds!r}") from exc
    if s1 < s0:
        raise ConfigError("--seeds range is empty")
    seeds = list(range(s0, s1 + 1))
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    workers = int(os.environ.get("REHF_WORKERS", "0")) or min(4, os.cpu_count() or 1)
    results = {}
    if workers > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for seed, report in pool.map(_ensemble_worker, [(cfg, s) for s in seeds]):
                results[seed] = report
    else:
        for s in seeds:
            results[s] = _ensemble_worker((cfg, s))[1]
    rows = ["seed,kappa_prime_l2,phi_h2,iterations,ratio_max,residual"]
    for s in seeds:  # deterministic order regardless of completion order
        rep = results[s]
        io.write_report(out_dir / f"report_seed{s}.json", rep)
        ratio_max = max(rep.ratios) if rep.ratios else 0.0
        rows.append(f"{s},{rep.kappa_prime_l2:.17g},{rep.phi_h2:.17g},"
                    f"{rep.iterations},{ratio_max:.17g},{rep.residual:.17g}")
    (out_dir / "ensemble.csv").write_text("\n".join(rows) + "\n")
    print(f"{len(seeds)} solves -> {out_dir}/ensemble.csv")
    return EXIT_OK


def cmd_verify(args) -> int:
    summary = verify.run_suite(level=args.level)
    print(verify.to_text_table(summary))
    if args.out:
        Path(args.out).write_text(json.dumps(summary.to_dict(), indent=2,
                                             sort_keys=True) + "\n")
        print(f"verdict matrix -> {args.out}")
    return EXIT_OK if summary.passed else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rehf", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mu-solve", help="chemical potential from neutrality")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--kappa0", type=float, required=True)
    p.set_defaults(fn=cmd_mu_solve)

    p = sub.add_parser("multiplier", help="screening multiplier table (CSV)")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--p-min", type=float, default=0.1)
    p.add_argument("--p-max", type=float, default=50.0)
    p.add_argument("--points", type=int, default=25)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_multiplier)

    p = sub.add_parser("solve", help="solve one disordered realization")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--dump-phi", default=None, help="write phi as a text table")
    p.add_argument("--dump-kappa", default=None, help="write kappa as a text table")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("ensemble", help="solve a seed range in parallel")
    p.add_argument("--config", required=True)
    p.add_argument("--seeds", required=True, help="inclusive range S0..S1")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(fn=cmd_ensemble)

    p = sub.add_parser("verify", help="run the property suite")
    p.add_argument("--level", choices=("fast", "full"), default="fast")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, SpecValidationError, HypothesisError, ValueError) as exc:
        print(f"error [{_error_category(exc) if isinstance(exc, RehfError) else 'configuration'}]: "
              f"{exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RehfError as exc:
        print(f"error [{_error_category(exc)}]: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
