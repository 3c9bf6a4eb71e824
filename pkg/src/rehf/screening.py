"""Static screening multiplier of the linearized density response and the
coercive preconditioner symbol built from it.

The multiplier has the closed form

    m(p) = (1/8 pi^2) (1/p) int_0^inf ln| (sqrt(4t)+p) / (sqrt(4t)-p) |
                                     * fermi(beta (t-mu)) dt,

with the p -> 0 limit (1/8 pi^2) int_0^inf t^{-1/2} fermi(beta(t-mu)) dt,
which equals dA/dmu (compressibility).  A Cauchy-contour representation of
the same operator serves as an independent oracle; agreement of the two is
the numerical verification of the branch-cut computation that produces the
closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator
from scipy.special import expit

from .errors import BranchCutError, InternalError, NumericError
from .grids import Grid, RealField
from .params import PhysParams

FOUR_PI = 4.0 * math.pi
_TAIL_EXPONENT = 45.0


def _quad_piece(f, a, b, what):
    out = quad(f, a, b, epsabs=1e-14, epsrel=1e-13, limit=300, full_output=1)
    val, abserr = out[0], out[1]
    if len(out) > 3 or abserr > max(5e-11, 1e-8 * abs(val)):
        raise NumericError(
            f"quadrature panel for {what} failed (error estimate {abserr:.2e})",
            diagnostics={"value": val, "abserr": abserr, "a": a, "b": b})
    return val


def m_of_p(p: float, params: PhysParams) -> float:
    """Screening multiplier m(p) by adaptive quadrature, abs. tol 1e-10.

    The integrable logarithmic singularity at t = p^2/4 is handled by the
    substitutions t = (p^2/4)(1 -+ u^2) on either side of the split, which
    make the integrand bounded (u * log u -> 0).
    """
    if p < 0:
        raise ValueError("p must be nonnegative")
    beta, mu = params.beta, params.mu
    t_phys = max(mu, 0.0) + _TAIL_EXPONENT / beta
    if p == 0.0:
        # limit (1/8pi^2) int t^{-1/2} f dt; substitute t = s^2
        val = _quad_piece(lambda s: expit(-beta * (s * s - mu)),
                          0.0, math.sqrt(t_phys), "m(0) limit")
        return val / (4.0 * math.pi ** 2)

    ts = 0.25 * p * p

    def weighted_log(t):
        s = 2.0 * math.sqrt(t)
        return math.log(abs((s + p) / (s - p))) * expit(-beta * (t - mu))

    # inner piece, t in [0, ts]
    def f_inner(u):
        return u * weighted_log(ts * (1.0 - u * u))

    u_star = math.sqrt(max(1.0 - t_phys / ts, 0.0))
    inner = 0.0
    if u_star > 0.0:
        # [0, u_star] covers t beyond the Fermi-Dirac support; integrate it
        # separately so the boundary layer at u ~ u_star is resolved
        inner += _quad_piece(f_inner, 0.0, u_star, f"m(p={p}) dead zone")
    inner += _quad_piece(f_inner, u_star, 1.0, f"m(p={p}) inner")

    # outer piece, t in [ts, t_hi]
    t_hi = max(2.0 * ts, t_phys)
    u_max = math.sqrt(t_hi / ts - 1.0)

    def f_outer(u):
        return u * weighted_log(ts * (1.0 + u * u))

    outer = _quad_piece(f_outer, 0.0, u_max, f"m(p={p}) outer")

    total = 2.0 * ts * (inner + outer)
    return total / (8.0 * math.pi ** 2 * p)


def _principal_arctan(w):
    """arctan via principal logs, branch cut fixed on the negative real axis."""
    return 0.5j * (np.log(1.0 - 1j * w) - np.log(1.0 + 1j * w))


def _complex_quad(f, a, b, what):
    re = _quad_piece(lambda x: f(x).real, a, b, what + " (re)")
    im = _quad_piece(lambda x: f(x).imag, a, b, what + " (im)")
    return re + 1j * im


def m_contour_oracle(p: float, params: PhysParams, alpha: float | None = None,
                     rel_imag_tol: float = 1e-8,
                     return_diagnostics: bool = False):
    """Screening multiplier from the Cauchy-contour representation.

    Integrates -(1/8 pi^2) (1/(p i)) * f_FD(beta(z-mu)) arctan(p/sqrt(-4z))
    along the three-segment contour
    L[xmax+i a, -a+i a] u L[-a+i a, -a-i a] u L[-a-i a, xmax-i a]
    with a = alpha (default 1/(2 beta), below the first Matsubara pole at
    pi/beta) and the horizontal legs truncated at xmax = mu + 40/beta.

    Raises BranchCutError when the imaginary residue exceeds rel_imag_tol
    relative; a large residue is the signature of a mishandled branch.
    """
    if not p > 0:
        raise ValueError("contour oracle requires p > 0")
    beta, mu = params.beta, params.mu
    if alpha is None:
        alpha = 0.5 / beta
    if not 0.0 < alpha < 1.0 / beta:
        raise ValueError("alpha must lie in (0, 1/beta)")
    xmax = mu + 40.0 / beta

    def integrand(z):
        return _principal_arctan(p / np.sqrt(-4.0 * z)) / (1.0 + np.exp(beta * (z - mu)))

    what = f"contour m(p={p})"
    # top leg traversed right-to-left, left leg downward, bottom left-to-right
    top = -_complex_quad(lambda x: integrand(x + 1j * alpha), -alpha, xmax, what)
    left = -1j * _complex_quad(lambda y: integrand(-alpha + 1j * y), -alpha, alpha, what)
    bottom = _complex_quad(lambda x: integrand(x - 1j * alpha), -alpha, xmax, what)
    total = top + left + bottom
    value = -total / (8.0 * math.pi ** 2 * p * 1j)

    scale = max(abs(value.real), 1e-300)
    if abs(value.imag) > rel_imag_tol * scale:
        raise BranchCutError(
            f"contour result has imaginary residue {value.imag:.3e} "
            f"({abs(value.imag)/scale:.2e} relative); branch handling is wrong",
            diagnostics={"value": complex(value), "alpha": alpha})
    # truncation tail: |f_FD| <= 2 exp(-beta(x-mu)), |arctan| <= pi/2
    tail_bound = 2.0 * math.pi * math.exp(-beta * (xmax - mu)) / (
        8.0 * math.pi ** 2 * p * beta)
    if return_diagnostics:
        return value.real, {"imag_rel": abs(value.imag) / scale,
                            "tail_bound": tail_bound, "alpha": alpha}
    return value.real


def m_minorant(p: float, params: PhysParams) -> float:
    """Lower-bound integral with the occupation minorant (1/2) 1_[0, mu].

    Same kernel as m_of_p but with fermi(beta(t-mu)) replaced by its
    pointwise minorant; valid for p^2/4 < mu where the bound is informative.
    """
    mu = params.mu
    if mu <= 0:
        return 0.0
    if p == 0.0:
        return math.sqrt(mu) / (4.0 * math.pi ** 2)  # (1/8pi^2) * 2 sqrt(mu) * (1/2)

    def half_log(t):
        s = 2.0 * math.sqrt(t)
        return 0.5 * math.log(abs((s + p) / (s - p)))

    ts = 0.25 * p * p
    if ts < mu:
        inner = _quad_piece(lambda u: u * half_log(ts * (1 - u * u)), 0.0, 1.0,
                            "minorant inner") * 2.0 * ts
        u_max = math.sqrt(mu / ts - 1.0)
        outer = _quad_piece(lambda u: u * half_log(ts * (1 + u * u)), 0.0, u_max,
                            "minorant outer") * 2.0 * ts
        total = inner + outer
    else:
        u_lo = math.sqrt(1.0 - mu / ts)
        total = _quad_piece(lambda u: u * half_log(ts * (1 - u * u)), u_lo, 1.0,
                            "minorant") * 2.0 * ts
    return total / (8.0 * math.pi ** 2 * p)


@dataclass
class ScreeningTable:
    """Tabulated multiplier on a sorted momentum grid with a monotone
    (PCHIP) interpolant for reporting; entries come from exact quadrature.
    """

    params: PhysParams
    p_values: np.ndarray
    m_values: np.ndarray
    _interp: PchipInterpolator = field(init=False, repr=False)

    def __post_init__(self):
        self.p_values = np.asarray(self.p_values, dtype=float)
        self.m_values = np.asarray(self.m_values, dtype=float)
        if self.p_values.ndim != 1 or self.p_values.shape != self.m_values.shape:
            raise ValueError("p_values and m_values must be matching 1-D arrays")
        if np.any(np.diff(self.p_values) <= 0):
            raise ValueError("p_values must be strictly increasing")
        if np.any(self.m_values <= 0):
            raise ValueError("multiplier table must be strictly positive")
        self._interp = PchipInterpolator(self.p_values, self.m_values,
                                         extrapolate=False)

    def m_at(self, p: float) -> float:
        """Exact table lookup; p must be a tabulated momentum."""
        i = np.searchsorted(self.p_values, p)
        for j in (i - 1, i, i + 1):
            if 0 <= j < len(self.p_values) and abs(self.p_values[j] - p) <= 1e-9 * max(1.0, p):
                return float(self.m_values[j])
        raise InternalError(f"momentum p = {p} is not tabulated")

    def interpolate(self, p) -> np.ndarray:
        """Monotone-cubic interpolation, for plots and reports only."""
        return self._interp(p)


def build_table(params: PhysParams, p_values) -> ScreeningTable:
    """Screening table with exact quadrature at each requested momentum."""
    p_values = np.sort(np.asarray(p_values, dtype=float))
    m_values = np.array([m_of_p(p, params) for p in p_values])
    return ScreeningTable(params=params, p_values=p_values, m_values=m_values)


@dataclass
class Lsymbol:
    """Assembled preconditioner symbol Lhat(p) = p^2/(4 pi) + m(p) on a grid.

    Well defined at G = 0 because m(0) > 0: the screening mass removes the
    Poisson zero-mode ambiguity.
    """

    grid: Grid
    table: ScreeningTable
    m_grid: np.ndarray       # m(|G|) over the 3-D reciprocal grid
    symbol: np.ndarray       # Lhat(|G|) over the 3-D reciprocal grid

    @property
    def params(self) -> PhysParams:
        return self.table.params


def build_L_symbol(grid: Grid, params: PhysParams) -> Lsymbol:
    """Tabulate m at every distinct grid momentum and assemble Lhat.

    |G| values repeat heavily on cubic grids, so quadrature runs once per
    distinct magnitude (distinctness decided on the exact integer |k|^2).
    """
    k2 = (grid.k_int[:, None, None] ** 2
          + grid.k_int[None, :, None] ** 2
          + grid.k_int[None, None, :] ** 2)
    uniq, inverse = np.unique(k2.reshape(-1), return_inverse=True)
    unit = 2.0 * math.pi / grid.L
    p_dist = unit * np.sqrt(uniq.astype(float))
    m_dist = np.array([m_of_p(p, params) for p in p_dist])
    m_grid = m_dist[inverse].reshape(k2.shape)
    symbol = grid.G2 / FOUR_PI + m_grid
    table = ScreeningTable(params=params, p_values=p_dist, m_values=m_dist)
    return Lsymbol(grid=grid, table=table, m_grid=m_grid, symbol=symbol)


def apply_L(f: RealField, sym: Lsymbol) -> RealField:
    """Spectral application of L = -Delta/(4 pi) + M."""
    if f.grid != sym.grid:
        raise InternalError("symbol was tabulated for a different grid")
    fh = np.fft.fftn(f.values)
    return RealField(f.grid, np.real(np.fft.ifftn(fh * sym.symbol)))


def apply_L_inverse(r: RealField, sym: Lsymbol) -> RealField:
    """Spectral solve of L phi = r; exact on the discrete model."""
    if r.grid != sym.grid:
        raise InternalError("symbol was tabulated for a different grid")
    rh = np.fft.fftn(r.values)
    return RealField(r.grid, np.real(np.fft.ifftn(rh / sym.symbol)))


def apply_multiplier(f: RealField, sym: Lsymbol) -> RealField:
    """Spectral application of the multiplier M alone."""
    if f.grid != sym.grid:
        raise InternalError("symbol was tabulated for a different grid")
    fh = np.fft.fftn(f.values)
    return RealField(f.grid, np.real(np.fft.ifftn(fh * sym.m_grid)))


def coercivity_ratio(sym: Lsymbol, reference: str = "quarter") -> float:
    """min over grid momenta of Lhat(p) / (p^2/(4 pi) + m_*).

    With reference="plain" the denominator is p^2 + m_* instead, which gives
    the empirical constant of the whole-space lower bound L >= c0(-Delta+m_*).
    """
    m_star = sym.params.m_star
    p = sym.table.p_values
    lhat = p ** 2 / FOUR_PI + sym.table.m_values
    if reference == "quarter":
        denom = p ** 2 / FOUR_PI + m_star
    elif reference == "plain":
        denom = p ** 2 + m_star
    else:
        raise ValueError("reference must be 'quarter' or 'plain'")
    return float(np.min(lhat / denom))
