"""Anderson background sampling, norms and stationarity surrogates."""

import math

import numpy as np
import pytest

from rehf import Grid, norm_kappa_prime, norm_l2_cell, sample, shift_lattice, unit_cell_l2_norms
from rehf.disorder import DisorderSpec, bump_block, constant_background
from rehf.errors import SpecValidationError


@pytest.fixture()
def grid():
    return Grid(1.0, 2, 3)


def spec_with(width=0.1, seed=7, a=1.0, qbar=1.0, **kw):
    return DisorderSpec(a=a, qbar=qbar, width=width, seed=seed, **kw)


def test_spec_validation():
    with pytest.raises(SpecValidationError):
        DisorderSpec(a=1.0, qbar=-1.0, width=0.0, seed=0)
    with pytest.raises(SpecValidationError):
        DisorderSpec(a=1.0, qbar=1.0, width=-0.1, seed=0)
    with pytest.raises(SpecValidationError):
        DisorderSpec(a=1.0, qbar=1.0, width=0.0, seed=0, bump_radius=0.6)
    assert spec_with().kappa0 == 1.0


def test_bump_block_properties(grid):
    block = bump_block(spec_with(), grid)
    assert np.all(block >= 0.0)
    assert block.sum() * grid.h ** 3 == pytest.approx(1.0, abs=1e-14)
    # support strictly inside the cell: zero at the half-cell boundary
    g4 = Grid(1.0, 2, 4)
    b4 = bump_block(spec_with(), g4)
    assert b4[0, 0, 0] == 0.0  # offset (-a/2, -a/2, -a/2) corner


def test_bump_degenerate_sampling():
    g = Grid(1.0, 2, 1)  # only the site point itself, at r=0: still unit mass
    block = bump_block(spec_with(), g)
    assert block.sum() * g.h ** 3 == pytest.approx(1.0)


def test_grid_spec_mismatch(grid):
    with pytest.raises(SpecValidationError):
        sample(spec_with(a=2.0), grid)


def test_same_seed_bit_identical(grid):
    r1 = sample(spec_with(), grid)
    r2 = sample(spec_with(), grid)
    assert np.array_equal(r1.kappa.values, r2.kappa.values)
    assert np.array_equal(r1.coefficients, r2.coefficients)


def test_different_seeds_differ(grid):
    r1 = sample(spec_with(seed=1), grid)
    r2 = sample(spec_with(seed=2), grid)
    assert not np.array_equal(r1.coefficients, r2.coefficients)


def test_coefficient_law_bounds(grid):
    spec = spec_with(width=0.25, seed=3)
    r = sample(spec, grid)
    assert np.all(r.coefficients >= spec.qbar - spec.width)
    assert np.all(r.coefficients <= spec.qbar + spec.width)


def test_deterministic_limit_w0(grid):
    r = sample(spec_with(width=0.0), grid)
    # exact zero supercell mean of kappa'
    assert abs(r.kappa_prime.values.mean()) < 1e-13
    norms = norm_kappa_prime(r)
    cells = unit_cell_l2_norms(r.kappa_prime)
    assert np.allclose(cells, norms["max_per_unit_cell"], rtol=1e-12)
    assert norms["per_supercell"] > 0  # pure lattice modulation, not zero


def test_kappa_prime_mean_identity(grid):
    spec = spec_with(width=0.3, seed=11)
    r = sample(spec, grid)
    expected = (r.coefficients.mean() - spec.qbar) / spec.a ** 3
    assert r.kappa_prime.values.mean() == pytest.approx(expected, abs=1e-13)


def test_ensemble_mean_law_of_large_numbers():
    g = Grid(1.0, 2, 3)
    means = np.array([sample(spec_with(width=0.1, seed=s), g).kappa.values.mean()
                      for s in range(64)])
    gate = 3.0 * means.std(ddof=1) / math.sqrt(len(means))
    assert abs(means.mean() - 1.0) <= gate


def test_norms_zero_field(grid):
    r = constant_background(grid, 1.0)
    norms = norm_kappa_prime(r)
    assert norms["per_supercell"] == 0.0
    assert norms["max_per_unit_cell"] == 0.0


def test_norm_multiset_shift_invariant(grid):
    r = sample(spec_with(width=0.2, seed=9), grid)
    base = np.sort(unit_cell_l2_norms(r.kappa_prime).reshape(-1))
    shifted = shift_lattice(r.kappa_prime, np.array([1, 0, 1]))
    after = np.sort(unit_cell_l2_norms(shifted).reshape(-1))
    assert np.abs(base - after).max() < 1e-12


def test_fluctuation_scaling_affine(grid):
    base = sample(spec_with(width=0.0, seed=5), grid)
    unit = sample(spec_with(width=1.0, seed=5), grid)
    s = 0.37
    scaled = sample(spec_with(width=s, seed=5), grid)
    lhs = norm_l2_cell(scaled.kappa_prime - base.kappa_prime)
    rhs = s * norm_l2_cell(unit.kappa_prime - base.kappa_prime)
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_bumps_carry_single_coefficient(grid):
    # each bump is supported inside its own q-block: kappa / comb must be
    # piecewise equal to the per-cell coefficient wherever the comb is nonzero
    spec = spec_with(width=0.5, seed=13)
    r = sample(spec, grid)
    comb = sample(spec_with(width=0.0, seed=13), grid).kappa.values  # qbar * comb
    mask = comb > 1e-8
    ratio = np.where(mask, r.kappa.values / np.where(mask, comb, 1.0), np.nan)
    # within each cell the ratio is constant = q_cell / qbar
    half = grid.n_pts // 2
    rolled = np.roll(ratio, half, axis=(0, 1, 2))
    blocks = rolled.reshape(grid.n_cells, grid.n_pts, grid.n_cells, grid.n_pts,
                            grid.n_cells, grid.n_pts)
    for cx in range(grid.n_cells):
        for cy in range(grid.n_cells):
            for cz in range(grid.n_cells):
                vals = blocks[cx, :, cy, :, cz, :]
                vals = vals[np.isfinite(vals)]
                assert vals.size > 0
                assert np.allclose(vals, vals.flat[0], rtol=1e-12)
