"""Periodic supercell grids, real/spectral fields, norms and lattice shifts.

The computational domain is a cubic supercell of ``n_cells`` unit cells per
edge (cubic Bravais lattice, lattice constant ``a``) sampled with ``n_pts``
points per unit-cell edge.  Reciprocal vectors live on the folded symmetric
torus G = (2*pi/L) * k with integer k in the usual FFT layout.

Spectral coefficients use the mean-preserving convention

    fhat(G) = (1/N) * sum_x f(x) exp(-i G.x),

so the G = 0 coefficient is the supercell mean and a constant field has a
single nonzero coefficient.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import CutoffWarning

#: margin required of beta*(|G_max|^2 - mu) before truncated Fermi-Dirac
#: sums are considered safe
CUTOFF_MARGIN = 30.0


class Grid:
    """Cubic supercell sampling of lattice-periodic fields.

    Parameters
    ----------
    a : float
        Bravais lattice constant; the lattice is a*Z^3.
    n_cells : int
        Unit cells per supercell edge; the supercell has n_cells**3 cells.
    n_pts : int
        Sample points per unit-cell edge.

    Notes
    -----
    Instances are immutable by convention: all derived arrays are computed
    once in the constructor and must not be written to.
    """

    def __init__(self, a: float, n_cells: int, n_pts: int):
        if not a > 0:
            raise ValueError("lattice constant a must be positive")
        if n_cells < 1 or n_pts < 1:
            raise ValueError("n_cells and n_pts must be positive integers")
        self.a = float(a)
        self.n_cells = int(n_cells)
        self.n_pts = int(n_pts)
        self.n = self.n_cells * self.n_pts          # points per supercell edge
        self.N = self.n ** 3                        # total sample points
        self.L = self.a * self.n_cells              # supercell edge length
        self.h = self.a / self.n_pts                # grid spacing
        self.vol = self.L ** 3

        k = np.arange(self.n)
        k[k > self.n // 2] -= self.n
        self.k_int = k                              # folded integer frequencies
        g_axis = (2.0 * math.pi / self.L) * k
        gx, gy, gz = np.meshgrid(g_axis, g_axis, g_axis, indexing="ij")
        self.G2 = gx ** 2 + gy ** 2 + gz ** 2
        self.Gmag = np.sqrt(self.G2)
        self.x_axis = self.h * np.arange(self.n)
        for arr in (self.k_int, self.G2, self.Gmag, self.x_axis):
            arr.setflags(write=False)

    def __eq__(self, other):
        return (isinstance(other, Grid)
                and (self.a, self.n_cells, self.n_pts)
                == (other.a, other.n_cells, other.n_pts))

    def __hash__(self):
        return hash((self.a, self.n_cells, self.n_pts))

    def __repr__(self):
        return f"Grid(a={self.a}, n_cells={self.n_cells}, n_pts={self.n_pts})"

    @property
    def g_max(self) -> float:
        """Largest reciprocal-vector magnitude on the folded grid."""
        return float(self.Gmag.max())

    def cutoff_margin(self, beta: float, mu: float) -> float:
        """beta*(|G_max|^2 - mu), the decay exponent of the outermost mode."""
        return beta * (self.g_max ** 2 - mu)

    def check_cutoff(self, beta: float, mu: float) -> bool:
        """Warn (CutoffWarning) when truncated Fermi-Dirac sums are marginal.

        Returns True when the margin exceeds CUTOFF_MARGIN.
        """
        margin = self.cutoff_margin(beta, mu)
        if margin <= CUTOFF_MARGIN:
            warnings.warn(
                f"grid cutoff margin beta*(Gmax^2 - mu) = {margin:.3g} <= "
                f"{CUTOFF_MARGIN:g}; truncated Fermi-Dirac sums may be inaccurate",
                CutoffWarning,
                stacklevel=2,
            )
            return False
        return True


@dataclass
class RealField:
    """Real-valued function sampled on a supercell grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        expected = (self.grid.n,) * 3
        if self.values.shape != expected:
            raise ValueError(f"field shape {self.values.shape} != grid shape {expected}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field contains non-finite values")

    @classmethod
    def zeros(cls, grid: Grid) -> "RealField":
        return cls(grid, np.zeros((grid.n,) * 3))

    @classmethod
    def constant(cls, grid: Grid, value: float) -> "RealField":
        return cls(grid, np.full((grid.n,) * 3, float(value)))

    def __add__(self, other):
        if isinstance(other, RealField):
            _check_same_grid(self.grid, other.grid)
            return RealField(self.grid, self.values + other.values)
        return RealField(self.grid, self.values + other)

    def __sub__(self, other):
        if isinstance(other, RealField):
            _check_same_grid(self.grid, other.grid)
            return RealField(self.grid, self.values - other.values)
        return RealField(self.grid, self.values - other)

    def __mul__(self, scalar):
        return RealField(self.grid, self.values * scalar)

    __rmul__ = __mul__


@dataclass
class SpectralField:
    """Fourier coefficients of a supercell field in FFT layout.

    For real fields the coefficients satisfy Hermitian symmetry,
    coeff(-G) == conj(coeff(G)).
    """

    grid: Grid
    coefficients: np.ndarray

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=complex)
        expected = (self.grid.n,) * 3
        if self.coefficients.shape != expected:
            raise ValueError(
                f"coefficient shape {self.coefficients.shape} != grid shape {expected}")

    def hermitian_defect(self) -> float:
        """Max |coeff(-G) - conj(coeff(G))| over the grid."""
        c = self.coefficients
        flipped = _reflect(c)
        return float(np.abs(flipped - np.conj(c)).max())


def _check_same_grid(g1: Grid, g2: Grid):
    if g1 != g2:
        raise ValueError(f"grid mismatch: {g1} vs {g2}")


def _reflect(c: np.ndarray) -> np.ndarray:
    """Values at -G for an FFT-layout array."""
    n = c.shape[0]
    idx = (-np.arange(n)) % n
    return c[np.ix_(idx, idx, idx)]


def to_spectral(f: RealField) -> SpectralField:
    """Forward transform under the mean-preserving normalization."""
    coeff = np.fft.fftn(f.values) / f.grid.N
    return SpectralField(f.grid, coeff)


def to_real(sf: SpectralField) -> RealField:
    """Inverse of :func:`to_spectral`; discards the imaginary round-off part."""
    vals = np.fft.ifftn(sf.coefficients * sf.grid.N)
    return RealField(sf.grid, np.real(vals))


def norm_l2_cell(f: RealField) -> float:
    """Discrete L2 norm over the reporting cell (the full supercell).

    sqrt((vol/N) * sum f^2), the Riemann sum of the continuum L2 norm.
    """
    g = f.grid
    return math.sqrt(float(np.sum(f.values ** 2)) * g.vol / g.N)


def norm_h2_cell(f: RealField) -> float:
    """Spectral H2 norm, sqrt(sum_G (1+|G|^2)^2 |fhat(G)|^2 * vol).

    Shares the L2 normalization, so norm_h2_cell >= norm_l2_cell always.
    """
    g = f.grid
    fhat = np.fft.fftn(f.values) / g.N
    w = (1.0 + g.G2) ** 2
    return math.sqrt(float(np.sum(w * np.abs(fhat) ** 2)) * g.vol)


def unit_cell_l2_norms(f: RealField) -> np.ndarray:
    """L2 norm of the field restricted to each Wigner-Seitz unit cell.

    Cells are centered on the lattice sites a*Z^3; the returned array has
    shape (n_cells, n_cells, n_cells).  The maximum over cells is the
    ergodic surrogate for the paper-style sup over realizations.
    """
    g = f.grid
    half = g.n_pts // 2
    v = np.roll(f.values, half, axis=(0, 1, 2))
    blocks = v.reshape(g.n_cells, g.n_pts, g.n_cells, g.n_pts, g.n_cells, g.n_pts)
    sq = np.sum(blocks ** 2, axis=(1, 3, 5))
    return np.sqrt(sq * g.h ** 3)


def shift_lattice(f: RealField, ell) -> RealField:
    """Translate a field by a whole number of unit cells per axis.

    The shifted field is f(x - a*ell); the translation is grid-exact, so
    all discrete norms are preserved exactly.
    """
    ell = np.asarray(ell)
    if ell.shape != (3,) or not np.issubdtype(ell.dtype, np.integer):
        raise ValueError("shift must be a triple of integers (whole unit cells)")
    steps = tuple(int(c) * f.grid.n_pts for c in ell)
    return RealField(f.grid, np.roll(f.values, steps, axis=(0, 1, 2)))


def smooth_random_field(grid: Grid, h2_norm: float, seed: int,
                        decay: float = 8.0) -> RealField:
    """Deterministic smooth random field scaled to a prescribed H2 norm.

    Gaussian white noise filtered by exp(-|G|^2/decay); used by the scaling
    studies, which need fields with bounded H2 content.
    """
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((grid.n,) * 3)
    rawh = np.fft.fftn(raw) / grid.N
    rawh *= np.exp(-grid.G2 / decay)
    f = RealField(grid, np.real(np.fft.ifftn(rawh * grid.N)))
    current = norm_h2_cell(f)
    if current == 0.0:
        raise ValueError("degenerate random field")
    return f * (h2_norm / current)
