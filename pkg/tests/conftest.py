"""Shared fixtures; the expensive default-grid artifacts are session scoped."""

import warnings

import numpy as np
import pytest

from rehf import (Grid, SolveConfig, build_L_symbol, calibrate_mu_discrete,
                  params_from_kappa0, params_from_mu, sample, solve)
from rehf.disorder import DisorderSpec
from rehf.solver import linear_response_init


@pytest.fixture(scope="session")
def ref_params():
    """Warm reference point (beta, mu) = (1, 1) with its neutral kappa0."""
    return params_from_mu(1.0, 1.0)


@pytest.fixture(scope="session")
def small_grid():
    return Grid(1.0, 2, 3)


@pytest.fixture(scope="session")
def mid_grid():
    return Grid(1.0, 3, 3)


@pytest.fixture(scope="session")
def default_grid():
    """The default production grid: 12^3 points, four unit cells per edge."""
    return Grid(1.0, 4, 3)


@pytest.fixture(scope="session")
def ref_small(ref_params, small_grid):
    """(mu_h, Lsymbol) for the reference point on the small grid."""
    mu_h = calibrate_mu_discrete(ref_params.kappa0, ref_params.beta, small_grid)
    sym = build_L_symbol(small_grid, ref_params)
    return mu_h, sym


@pytest.fixture(scope="session")
def disorder_params():
    """Pinned defaults of the disordered problem: qbar = 1, a = 1, beta = 1."""
    return params_from_kappa0(1.0, 1.0)


def _solve_problem(params, grid, seed=7, width=0.05):
    mu_h = calibrate_mu_discrete(params.kappa0, params.beta, grid)
    sym = build_L_symbol(grid, params)
    spec = DisorderSpec(a=grid.a, qbar=params.kappa0 * grid.a ** 3,
                        width=width, seed=seed)
    realization = sample(spec, grid)
    phi0 = linear_response_init(realization, sym)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        phi, report = solve(realization, params, grid, sym, SolveConfig(),
                            phi0=phi0, mu_h=mu_h)
    return {"params": params, "grid": grid, "mu_h": mu_h, "sym": sym,
            "spec": spec, "realization": realization, "phi": phi,
            "report": report, "phi0": phi0}


@pytest.fixture(scope="session")
def default_solve(disorder_params, default_grid):
    """The default small-disorder solve (seed 7, width 0.05, 12^3 grid)."""
    return _solve_problem(disorder_params, default_grid)


@pytest.fixture(scope="session")
def mid_solve(disorder_params, mid_grid):
    """Same problem on the 9^3 grid; used by the cheaper experiments."""
    return _solve_problem(disorder_params, mid_grid)


@pytest.fixture(scope="session")
def small_solve(disorder_params, small_grid):
    return _solve_problem(disorder_params, small_grid)
