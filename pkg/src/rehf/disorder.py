"""Anderson-type stationary background charges on the supercell.

kappa(x) = sum_sites q_site * chi(x - site) with i.i.d. coefficients

    q_site ~ Uniform[qbar - width, qbar + width]

and a smooth compactly supported bump chi of radius a/2 centered on each
lattice site, normalized to unit mass on the grid so that the expected mean
is exactly kappa0 = qbar / a^3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SpecValidationError
from .grids import Grid, RealField, unit_cell_l2_norms


@dataclass(frozen=True)
class DisorderSpec:
    """Parameters of the random background.

    Attributes
    ----------
    a : float
        Lattice constant; must match the grid the spec is sampled on.
    qbar : float
        Mean bump coefficient, strictly positive.
    width : float
        Half-width of the uniform coefficient law, >= 0.
    seed : int
        64-bit seed of the counter-based generator.
    bump_radius : float
        Support radius of chi; must not exceed a/2 so each bump stays
        strictly inside its Wigner-Seitz cell.
    """

    a: float
    qbar: float
    width: float
    seed: int
    bump_radius: float | None = None

    def __post_init__(self):
        if self.a <= 0:
            raise SpecValidationError("lattice constant must be positive")
        if self.qbar <= 0:
            raise SpecValidationError("qbar must be positive")
        if self.width < 0:
            raise SpecValidationError("width must be nonnegative")
        if self.bump_radius is None:
            object.__setattr__(self, "bump_radius", 0.5 * self.a)
        if self.bump_radius > 0.5 * self.a:
            raise SpecValidationError(
                f"bump radius {self.bump_radius} exceeds a/2 = {0.5*self.a}; "
                "support would leave the unit cell")

    @property
    def kappa0(self) -> float:
        """Expected spatial mean of kappa, qbar / a^3."""
        return self.qbar / self.a ** 3


@dataclass
class DisorderRealization:
    """One sampled background: coefficients and the assembled fields."""

    spec: DisorderSpec
    grid: Grid
    coefficients: np.ndarray      # (n_cells, n_cells, n_cells)
    kappa: RealField
    kappa_prime: RealField        # kappa - kappa0, pointwise


def _ws_offsets(n_pts: int) -> np.ndarray:
    """Per-axis grid offsets of a Wigner-Seitz cell around its site."""
    return np.arange(n_pts) - n_pts // 2


def bump_block(spec: DisorderSpec, grid: Grid) -> np.ndarray:
    """One bump sampled on the n_pts^3 points of a Wigner-Seitz cell,
    normalized so its discrete mass (sum * h^3) is exactly 1."""
    if grid.a != spec.a:
        raise SpecValidationError(
            f"grid lattice constant {grid.a} does not match spec a = {spec.a}")
    off = _ws_offsets(grid.n_pts) * grid.h
    dx, dy, dz = np.meshgrid(off, off, off, indexing="ij")
    r2 = dx ** 2 + dy ** 2 + dz ** 2
    u2 = r2 / spec.bump_radius ** 2
    with np.errstate(divide="ignore", over="ignore"):
        block = np.where(u2 < 1.0, np.exp(-1.0 / np.maximum(1.0 - u2, 1e-300)), 0.0)
    mass = block.sum() * grid.h ** 3
    if mass <= 0.0:
        raise SpecValidationError(
            "bump has no mass on this grid; increase n_pts or bump_radius")
    return block / mass


def _ws_tile(block_or_cells: np.ndarray, grid: Grid, per_point: bool) -> np.ndarray:
    """Tile per-cell data onto the grid with cells centered on lattice sites."""
    if per_point:
        full = np.tile(block_or_cells, (grid.n_cells,) * 3)
    else:
        full = np.repeat(np.repeat(np.repeat(
            block_or_cells, grid.n_pts, 0), grid.n_pts, 1), grid.n_pts, 2)
    half = grid.n_pts // 2
    return np.roll(full, (-half, -half, -half), axis=(0, 1, 2))


def coefficients_for(spec: DisorderSpec, grid: Grid) -> np.ndarray:
    """i.i.d. uniform coefficients keyed by (seed, flat cell index).

    A counter-based generator (Philox) is opened per cell, so realizations
    are independent of array layout and ensemble members can be produced in
    any order.
    """
    nc = grid.n_cells
    q = np.empty((nc, nc, nc))
    for flat in range(nc ** 3):
        bg = np.random.Philox(key=spec.seed, counter=[0, 0, 0, flat])
        u = np.random.Generator(bg).uniform(-1.0, 1.0)
        q[np.unravel_index(flat, (nc, nc, nc))] = spec.qbar + spec.width * u
    return q


def sample(spec: DisorderSpec, grid: Grid) -> DisorderRealization:
    """Sample one realization; deterministic given (spec.seed, grid)."""
    block = bump_block(spec, grid)
    comb = _ws_tile(block, grid, per_point=True)
    q = coefficients_for(spec, grid)
    qfield = _ws_tile(q, grid, per_point=False)
    kappa_vals = qfield * comb
    kappa = RealField(grid, kappa_vals)
    kappa_prime = RealField(grid, kappa_vals - spec.kappa0)
    return DisorderRealization(spec=spec, grid=grid, coefficients=q,
                               kappa=kappa, kappa_prime=kappa_prime)


def constant_background(grid: Grid, kappa0: float) -> DisorderRealization:
    """Degenerate realization with kappa identically kappa0 (kappa' = 0).

    Width-0 jellium limit used by fixed-point sanity checks; the spec is a
    formal placeholder (its bump is never assembled).
    """
    spec = DisorderSpec(a=grid.a, qbar=kappa0 * grid.a ** 3, width=0.0, seed=0)
    q = np.full((grid.n_cells,) * 3, spec.qbar)
    return DisorderRealization(
        spec=spec, grid=grid, coefficients=q,
        kappa=RealField.constant(grid, kappa0),
        kappa_prime=RealField.zeros(grid))


def norm_kappa_prime(r: DisorderRealization) -> dict:
    """Supercell L2 norm of kappa' and the max over unit-cell norms.

    The per-cell maximum is the ergodic surrogate for the sup over
    realizations in the stationary norm; both conventions are reported.
    """
    cell_norms = unit_cell_l2_norms(r.kappa_prime)
    g = r.grid
    per_supercell = math.sqrt(float((r.kappa_prime.values ** 2).sum()) * g.vol / g.N)
    return {
        "per_supercell": per_supercell,
        "max_per_unit_cell": float(cell_norms.max()),
    }
