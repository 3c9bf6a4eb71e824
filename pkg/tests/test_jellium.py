"""Homogeneous density, bounds, and the neutrality chemical potential."""

import math

import numpy as np
import pytest

from rehf import Grid, calibrate_mu_discrete, density_A, density_A_discrete, solve_mu
from rehf.errors import HypothesisError
from rehf.jellium import (C1, C2, bound_lower_C, bound_upper_B, fermi_dirac,
                          momentum_tail_estimate, mu_bracket)

# independent oracle: 1e6-panel trapezoid of q^2 f_FD(q^2) on [0, 40], beta=1,
# mu=0 (see the commented recipe below); frozen once and asserted against.
A_BETA1_MU0_TRAPEZOID = 0.017176319019388868


def brute_force_density(mu, beta, q_hi=40.0, panels=1_000_000):
    """Plain trapezoid oracle, independent of the adaptive-quadrature path."""
    q = np.linspace(0.0, q_hi, panels + 1)
    x = np.minimum(beta * (q * q - mu), 700.0)
    return np.trapezoid(q * q / (1.0 + np.exp(x)), q) / (2.0 * math.pi ** 2)


def test_fermi_dirac_midpoint():
    assert fermi_dirac(0.0) == 0.5


def test_density_matches_frozen_trapezoid_oracle():
    assert density_A(0.0, 1.0) == pytest.approx(A_BETA1_MU0_TRAPEZOID, rel=1e-12)
    # and the oracle itself reproduces the frozen value
    assert brute_force_density(0.0, 1.0) == pytest.approx(A_BETA1_MU0_TRAPEZOID,
                                                          rel=1e-13)


@pytest.mark.parametrize("beta", [0.5, 1.0, 2.0])
def test_density_empty_band_limit(beta):
    assert density_A(-50.0 / beta, beta) < 1e-15


def test_density_sandwich_at_mu2():
    a = density_A(2.0, 1.0)
    assert bound_lower_C(2.0) <= a <= bound_upper_B(2.0, 1.0)
    assert bound_lower_C(2.0) == pytest.approx((1 / (12 * math.pi ** 2)) * 2 ** 1.5)
    assert bound_upper_B(2.0, 1.0) == pytest.approx(math.e ** 2 / (8 * math.pi ** 1.5))


def test_density_monotone_in_mu():
    mus = np.linspace(-2.0, 4.0, 50)
    vals = [density_A(m, 1.0) for m in mus]
    assert np.all(np.diff(vals) > 0)


@pytest.mark.parametrize("beta", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("mu", [0.5, 1.0, 2.0])
def test_bound_sandwich_matrix(beta, mu):
    a = density_A(mu, beta)
    assert bound_lower_C(mu) < a < bound_upper_B(mu, beta)


def test_solve_mu_round_trip():
    kappa0 = density_A(2.0, 1.0)
    assert solve_mu(kappa0, 1.0) == pytest.approx(2.0, abs=1e-8)


def test_solve_mu_inside_paper_bracket():
    mu = solve_mu(1.0, 1.0)
    assert math.log(8 * math.pi ** 1.5) < mu < (12 * math.pi ** 2) ** (2.0 / 3.0)


@pytest.mark.parametrize("beta,kappa0", [(1.0, 1.0), (0.5, 0.5), (2.0, 2.0)])
def test_bracket_straddles(beta, kappa0):
    lo, hi = mu_bracket(kappa0, beta)
    assert density_A(lo, beta) < kappa0 < density_A(hi, beta)


def test_hypothesis_violation_raises():
    beta = 1.0
    with pytest.raises(HypothesisError):
        solve_mu(0.9 * C1 * beta ** -1.5, beta)


def test_constants():
    assert C1 == pytest.approx(1.0 / (8.0 * math.pi ** 1.5))
    assert C2 == pytest.approx(1.0 / (12.0 * math.pi ** 2))


def test_discrete_density_manual_sum():
    g = Grid(1.0, 2, 2)
    mu, beta = 1.3, 1.0
    manual = float(np.sum(1.0 / (1.0 + np.exp(beta * (g.G2 - mu))))) / g.vol
    assert density_A_discrete(mu, beta, g) == pytest.approx(manual, rel=1e-14)


def test_discrete_density_half_occupation_at_mu():
    # the mode with |G|^2 = mu contributes exactly 1/2 / L^3
    g = Grid(1.0, 2, 2)
    mu = float(np.sort(np.unique(g.G2))[1])
    with_mode = density_A_discrete(mu, 1.0, g)
    # remove the six degenerate first-shell modes by hand
    occ = 1.0 / (1.0 + np.exp(g.G2 - mu))
    first_shell = np.isclose(g.G2, mu)
    without = float(occ[~first_shell].sum()) / g.vol
    n_shell = int(first_shell.sum())
    assert with_mode - without == pytest.approx(0.5 * n_shell / g.vol, rel=1e-14)


def test_discrete_refinement_study():
    beta, mu = 1.0, 1.0
    a_cont = density_A(mu, beta)
    errs, mu_errs = [], []
    for n_cells in (8, 12, 16):
        g = Grid(1.0, n_cells, 3)
        errs.append(abs(density_A_discrete(mu, beta, g) - a_cont))
        mu_errs.append(abs(calibrate_mu_discrete(a_cont, beta, g) - mu))
    assert errs[0] > errs[1] > errs[2]
    assert mu_errs[0] > mu_errs[1] > mu_errs[2]


def test_calibration_is_machine_precision():
    g = Grid(1.0, 3, 3)
    mu_h = calibrate_mu_discrete(1.0, 1.0, g)
    assert abs(density_A_discrete(mu_h, 1.0, g) - 1.0) < 1e-13


def test_tail_estimate_small_on_default_grid():
    g = Grid(1.0, 4, 3)
    assert momentum_tail_estimate(15.2, 1.0, g) < 1e-12
