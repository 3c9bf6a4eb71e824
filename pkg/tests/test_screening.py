"""Screening multiplier: closed form, contour oracle, symbol assembly."""

import math

import numpy as np
import pytest

from rehf import (Grid, RealField, apply_L, apply_L_inverse, build_L_symbol,
                  build_table, density_A, m_of_p, m_contour_oracle,
                  params_from_mu)
from rehf.errors import InternalError
from rehf.screening import FOUR_PI, ScreeningTable, coercivity_ratio, m_minorant


@pytest.fixture(scope="module")
def p11():
    return params_from_mu(1.0, 1.0)


def test_zero_momentum_is_compressibility(p11):
    h = 1e-5
    dA = (density_A(1.0 + h, 1.0) - density_A(1.0 - h, 1.0)) / (2 * h)
    assert m_of_p(0.0, p11) == pytest.approx(dA, rel=1e-6)


def test_large_p_asymptotics(p11):
    kappa0 = p11.kappa0
    p = 100.0
    assert p * p * m_of_p(p, p11) == pytest.approx(2.0 * kappa0, rel=1e-3)


@pytest.mark.parametrize("p", [0.5, 1.0, 2.0, 4.0])
def test_closed_form_matches_contour(p11, p):
    closed = m_of_p(p, p11)
    oracle = m_contour_oracle(p, p11)
    assert closed == pytest.approx(oracle, rel=1e-6)


def test_contour_alpha_independent(p11):
    a1 = m_contour_oracle(1.0, p11, alpha=0.5)
    a2 = m_contour_oracle(1.0, p11, alpha=0.25)
    assert a1 == pytest.approx(a2, rel=1e-7)


def test_contour_large_p_asymptotics(p11):
    p = 50.0
    assert p * p * m_contour_oracle(p, p11) == pytest.approx(2.0 * p11.kappa0,
                                                             rel=1e-2)


def test_contour_diagnostics_clean(p11):
    val, diag = m_contour_oracle(2.0, p11, return_diagnostics=True)
    assert val > 0
    assert diag["imag_rel"] < 1e-8
    assert diag["tail_bound"] < 1e-12


def test_multiplier_positive_and_decreasing(p11):
    ps = np.concatenate([[0.0], np.logspace(-1, np.log10(50.0), 20)])
    ms = np.array([m_of_p(float(p), p11) for p in ps])
    assert np.all(ms > 0)
    assert np.all(np.diff(ms) < 0)


def test_minorant_lower_bound(p11):
    for p in np.linspace(0.05, 1.9, 8):
        assert m_of_p(float(p), p11) >= m_minorant(float(p), p11) > 0


def test_table_construction_and_lookup(p11):
    tab = build_table(p11, [0.0, 0.5, 1.0, 2.0])
    assert tab.m_at(1.0) == pytest.approx(m_of_p(1.0, p11))
    with pytest.raises(InternalError):
        tab.m_at(0.7)
    # monotone interpolation stays inside the data range
    mid = float(tab.interpolate(0.75))
    assert tab.m_at(1.0) < mid < tab.m_at(0.5)


def test_table_rejects_nonpositive(p11):
    with pytest.raises(ValueError):
        ScreeningTable(params=p11, p_values=np.array([0.0, 1.0]),
                       m_values=np.array([0.1, -0.1]))


@pytest.fixture(scope="module")
def sym(p11):
    return build_L_symbol(Grid(1.0, 2, 3), p11)


def test_symbol_zero_mode_is_screening_mass(sym, p11):
    assert sym.symbol[0, 0, 0] == pytest.approx(m_of_p(0.0, p11), rel=1e-12)
    assert np.all(sym.symbol > 0)


def test_apply_inverse_round_trip(sym):
    g = sym.grid
    rng = np.random.default_rng(2)
    f = RealField(g, rng.standard_normal((g.n,) * 3))
    back = apply_L_inverse(apply_L(f, sym), sym)
    assert np.abs(back.values - f.values).max() < 1e-12


def test_constant_source_screened_by_mass(sym, p11):
    g = sym.grid
    phi = apply_L_inverse(RealField.constant(g, 3.0), sym)
    assert np.allclose(phi.values, 3.0 / m_of_p(0.0, p11), rtol=1e-11)


def test_single_mode_diagonal_action(sym, p11):
    g = sym.grid
    x = g.x_axis[:, None, None] * np.ones((1, g.n, g.n))
    g1 = 2 * math.pi / g.L
    r = RealField(g, np.cos(g1 * x))
    phi = apply_L_inverse(r, sym)
    expected = np.cos(g1 * x) / (g1 ** 2 / FOUR_PI + m_of_p(g1, p11))
    assert np.abs(phi.values - expected).max() < 1e-12


def test_apply_rejects_wrong_grid(sym):
    other = RealField.zeros(Grid(1.0, 3, 3))
    with pytest.raises(InternalError):
        apply_L_inverse(other, sym)


def test_coercivity_ratio_positive(sym):
    assert 0.0 < coercivity_ratio(sym, "quarter") <= 1.0
    assert 0.0 < coercivity_ratio(sym, "plain") <= 1.0 / FOUR_PI + 1.0


def test_p_must_be_nonnegative(p11):
    with pytest.raises(ValueError):
        m_of_p(-1.0, p11)
    with pytest.raises(ValueError):
        m_contour_oracle(0.0, p11)
