"""Grid, field, transform and norm behavior."""

import math

import numpy as np
import pytest

from rehf import (Grid, RealField, norm_h2_cell, norm_l2_cell, shift_lattice,
                  smooth_random_field, to_real, to_spectral, unit_cell_l2_norms)
from rehf.errors import CutoffWarning


@pytest.fixture()
def grid():
    return Grid(1.0, 2, 3)


def test_grid_basic_geometry(grid):
    assert grid.n == 6
    assert grid.N == 216
    assert grid.L == 2.0
    assert grid.vol == 8.0
    assert grid.h == pytest.approx(1.0 / 3.0)


def test_reciprocal_vectors_pair_up(grid):
    # every G has -G on the folded torus (self-paired at 0 and Nyquist,
    # since the Nyquist labels +n/2 and -n/2 coincide mod n)
    k = set(grid.k_int.tolist())
    n = grid.n
    for ki in k:
        assert (-ki) in k or (ki - (-ki)) % n == 0


def test_constant_field_single_coefficient(grid):
    sf = to_spectral(RealField.constant(grid, 3.25))
    assert sf.coefficients[0, 0, 0] == pytest.approx(3.25, abs=1e-14)
    rest = np.abs(sf.coefficients).sum() - abs(sf.coefficients[0, 0, 0])
    assert rest < 1e-13


def test_cosine_mode_two_coefficients(grid):
    x = grid.x_axis[:, None, None] * np.ones((1, grid.n, grid.n))
    f = RealField(grid, np.cos(2 * math.pi * x / grid.L))
    c = to_spectral(f).coefficients
    assert c[1, 0, 0] == pytest.approx(0.5, abs=1e-13)
    assert c[-1, 0, 0] == pytest.approx(0.5, abs=1e-13)
    others = np.abs(c).sum() - abs(c[1, 0, 0]) - abs(c[-1, 0, 0])
    assert others < 1e-12


def test_round_trip_random(grid):
    rng = np.random.default_rng(0)
    f = RealField(grid, rng.standard_normal((grid.n,) * 3))
    back = to_real(to_spectral(f))
    assert np.abs(back.values - f.values).max() < 1e-12


def test_parseval(grid):
    f = smooth_random_field(grid, 1.0, seed=4)
    sf = to_spectral(f)
    lhs = (f.values ** 2).sum() * grid.vol / grid.N
    rhs = (np.abs(sf.coefficients) ** 2).sum() * grid.vol
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_hermitian_symmetry_of_real_fields(grid):
    f = smooth_random_field(grid, 1.0, seed=5)
    assert to_spectral(f).hermitian_defect() < 1e-14


def test_norms_zero_and_constant():
    g1 = Grid(1.7, 1, 4)
    assert norm_l2_cell(RealField.zeros(g1)) == 0.0
    # f = 1 on a single unit cell of volume a^3 has L2 norm a^(3/2)
    assert norm_l2_cell(RealField.constant(g1, 1.0)) == pytest.approx(1.7 ** 1.5)


def test_sine_mode_h2_ratio(grid):
    x = grid.x_axis[:, None, None] * np.ones((1, grid.n, grid.n))
    gmag = 2 * math.pi / grid.L
    f = RealField(grid, np.sin(gmag * x))
    ratio = norm_h2_cell(f) / norm_l2_cell(f)
    assert ratio == pytest.approx(1.0 + gmag ** 2, rel=1e-12)


def test_h2_dominates_l2(grid):
    f = smooth_random_field(grid, 1.0, seed=6)
    assert norm_h2_cell(f) >= norm_l2_cell(f)


def test_shift_identity_cases(grid):
    f = smooth_random_field(grid, 1.0, seed=7)
    assert np.array_equal(shift_lattice(f, np.array([0, 0, 0])).values, f.values)
    full = shift_lattice(f, np.array([grid.n_cells, 0, grid.n_cells]))
    assert np.array_equal(full.values, f.values)


def test_shift_round_trip(grid):
    f = smooth_random_field(grid, 1.0, seed=8)
    ell = np.array([1, 0, 1])
    back = shift_lattice(shift_lattice(f, ell), -ell)
    assert np.array_equal(back.values, f.values)


def test_shift_preserves_norms_exactly(grid):
    f = smooth_random_field(grid, 1.0, seed=9)
    sh = shift_lattice(f, np.array([1, 1, 0]))
    assert norm_l2_cell(sh) == norm_l2_cell(f)
    assert norm_h2_cell(sh) == pytest.approx(norm_h2_cell(f), rel=1e-13)


def test_shift_rejects_fractional(grid):
    f = RealField.zeros(grid)
    with pytest.raises(ValueError):
        shift_lattice(f, np.array([0.5, 0.0, 0.0]))


def test_unit_cell_norms_constant_field(grid):
    f = RealField.constant(grid, 2.0)
    norms = unit_cell_l2_norms(f)
    assert norms.shape == (2, 2, 2)
    assert np.allclose(norms, 2.0 * grid.a ** 1.5, rtol=1e-13)


def test_cutoff_warning_fires():
    g = Grid(1.0, 2, 1)  # Nyquist pi, nothing resolvable
    with pytest.warns(CutoffWarning):
        assert not g.check_cutoff(beta=1.0, mu=5.0)
    assert Grid(1.0, 2, 3).check_cutoff(beta=1.0, mu=1.0)


def test_field_validation(grid):
    with pytest.raises(ValueError):
        RealField(grid, np.zeros((2, 2, 2)))
    bad = np.zeros((grid.n,) * 3)
    bad[0, 0, 0] = np.inf
    with pytest.raises(ValueError):
        RealField(grid, bad)
