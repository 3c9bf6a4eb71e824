"""Contraction fixed-point iteration for the screened field equation.

Iterates

    phi_{k+1} = (1 - mixing) phi_k + mixing * Linv(kappa' + N(phi_k)),

whose fixed points satisfy the discrete field equation

    -(1/4 pi) Delta phi = kappa - rho[phi]

exactly, because the multiplier terms inside L and N cancel by construction.
The chemical potential is held at the grid-calibrated mu_h; the zero mode of
phi absorbs the per-realization mean-charge imbalance since Lhat(0) = m(0) > 0.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field, asdict

import numpy as np

from . import jellium
from .density import nonlinearity_N, rho
from .disorder import DisorderRealization, norm_kappa_prime
from .errors import ConvergenceError, DivergenceError, SmallnessWarning
from .grids import Grid, RealField, norm_h2_cell, norm_l2_cell
from .params import PhysParams
from .screening import FOUR_PI, Lsymbol, apply_L_inverse


@dataclass(frozen=True)
class SolveConfig:
    """Iteration tolerances and limits."""

    tol_delta: float = 1e-9       # H2 norm of the iteration step
    tol_residual: float = 1e-8    # L2 norm of the physical residual
    max_iter: int = 200
    mixing: float = 1.0

    def __post_init__(self):
        if self.tol_delta <= 0 or self.tol_residual <= 0:
            raise ValueError("tolerances must be positive")
        if not 0.0 < self.mixing <= 1.0:
            raise ValueError("mixing must lie in (0, 1]")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


@dataclass
class SolveReport:
    """Convergence bookkeeping of one fixed-point solve."""

    iterations: int
    step_norms: list
    ratios: list
    residual: float
    phi_l2: float
    phi_h2: float
    kappa_prime_l2: float
    mu: float
    mu_h: float
    neutrality: float
    converged: bool
    kappa_prime_max_cell: float = 0.0
    gauge_delta: float = 0.0
    seed: int | None = None
    timestamp: float = field(default_factory=time.time)

    def to_json_dict(self) -> dict:
        """Plain dict with the fixed report schema (timestamp included)."""
        d = asdict(self)
        d["step_norms"] = [float(x) for x in d["step_norms"]]
        d["ratios"] = [float(x) for x in d["ratios"]]
        return d


def physical_residual(phi: RealField, kappa: RealField,
                      rho_phi: RealField) -> tuple[float, RealField]:
    """L2 norm and field of -(1/4 pi) Delta phi - (kappa - rho[phi])."""
    g = phi.grid
    lap = np.real(np.fft.ifftn(np.fft.fftn(phi.values) * g.G2)) / FOUR_PI
    res = RealField(g, lap - (kappa.values - rho_phi.values))
    return norm_l2_cell(res), res


def linear_response_init(realization: DisorderRealization, sym: Lsymbol) -> RealField:
    """Pure screened linear response Linv kappa', the natural first iterate."""
    return apply_L_inverse(realization.kappa_prime, sym)


def _check_smallness(realization, params, norms):
    # heuristic surrogate for the paper's inexplicit smallness constant:
    # per-cell disorder norm against m_*^2 / 4
    budget = params.m_star ** 2 / 4.0
    if norms["max_per_unit_cell"] > budget:
        warnings.warn(
            f"disorder norm {norms['max_per_unit_cell']:.3g} exceeds the "
            f"heuristic contraction budget m_*^2/4 = {budget:.3g}; "
            "convergence is outside the small-disorder theory",
            SmallnessWarning, stacklevel=3)


def solve(realization: DisorderRealization, params: PhysParams, grid: Grid,
          sym: Lsymbol, cfg: SolveConfig | None = None,
          phi0: RealField | None = None,
          mu_h: float | None = None) -> tuple[RealField, SolveReport]:
    """Run the fixed-point iteration to convergence.

    Parameters
    ----------
    realization : DisorderRealization
        Background charge; kappa' = kappa - kappa0 drives the solve.
    params : PhysParams
        beta, continuum mu and kappa0 (must match the realization's spec).
    grid, sym : Grid, Lsymbol
        Discretization and the preconditioner symbol tabulated on it.
    cfg : SolveConfig, optional
    phi0 : RealField, optional
        Initial iterate; defaults to the zero field.
    mu_h : float, optional
        Grid chemical potential; calibrated from kappa0 when omitted.

    Returns
    -------
    (phi, report)
        Converged potential and the iteration report.  Convergence requires
        both the H2 step norm below tol_delta and the physical L2 residual
        below tol_residual.

    Raises
    ------
    DivergenceError
        When the step norm grows by more than a factor 10 over its first value.
    ConvergenceError
        When max_iter is exhausted; carries the history for diagnosis.
    """
    cfg = cfg or SolveConfig()
    if mu_h is None:
        mu_h = jellium.calibrate_mu_discrete(params.kappa0, params.beta, grid)
    norms = norm_kappa_prime(realization)
    _check_smallness(realization, params, norms)

    kappa = realization.kappa
    kappa_prime = realization.kappa_prime
    phi = phi0 if phi0 is not None else RealField.zeros(grid)

    step_norms: list[float] = []
    ratios: list[float] = []
    residual = math.inf
    rho_phi = None
    converged = False

    for _ in range(cfg.max_iter):
        n_field = nonlinearity_N(phi, params, grid, sym, mu_h=mu_h)
        update = apply_L_inverse(kappa_prime + n_field, sym)
        phi_next = RealField(grid, (1.0 - cfg.mixing) * phi.values
                             + cfg.mixing * update.values)
        delta = norm_h2_cell(phi_next - phi)
        step_norms.append(delta)
        if len(step_norms) > 1:
            ratios.append(delta / step_norms[-2] if step_norms[-2] > 0 else 0.0)
        if len(step_norms) > 1 and step_norms[0] > 0 and delta > 10.0 * step_norms[0]:
            raise DivergenceError(
                f"step norm grew to {delta:.3e}, more than 10x the first step",
                step_norms=step_norms, ratios=ratios)
        phi = phi_next
        if delta <= cfg.tol_delta:
            rho_phi = rho(phi, params, grid, mu_h=mu_h)
            residual, _ = physical_residual(phi, kappa, rho_phi)
            if residual <= cfg.tol_residual:
                converged = True
                break
    if not converged:
        raise ConvergenceError(
            f"no convergence within {cfg.max_iter} iterations "
            f"(last step {step_norms[-1]:.3e}, residual {residual:.3e})",
            step_norms=step_norms, ratios=ratios)

    neutrality = float((kappa.values - rho_phi.values).mean())
    gauge_delta = _gauge_residual_delta(phi, kappa, params, grid, mu_h, residual)
    report = SolveReport(
        iterations=len(step_norms),
        step_norms=step_norms,
        ratios=ratios,
        residual=residual,
        phi_l2=norm_l2_cell(phi),
        phi_h2=norm_h2_cell(phi),
        kappa_prime_l2=norms["per_supercell"],
        kappa_prime_max_cell=norms["max_per_unit_cell"],
        mu=params.mu,
        mu_h=mu_h,
        neutrality=neutrality,
        converged=True,
        gauge_delta=gauge_delta,
        seed=realization.spec.seed,
    )
    return phi, report


def _gauge_residual_delta(phi, kappa, params, grid, mu_h, residual):
    """Residual change under the gauge map (phi, mu) -> (phi + t, mu - t)."""
    worst = 0.0
    for t in (0.01, -0.01):
        shifted = rho(phi + t, params, grid, mu_h=mu_h - t)
        r, _ = physical_residual(phi + t, kappa, shifted)
        worst = max(worst, abs(r - residual))
    return worst


@dataclass
class UniquenessVerdict:
    """Outcome of a multi-initialization uniqueness experiment."""

    max_pairwise_h2: float
    n_inits: int
    reports: list
    unique: bool


def solve_multi_init(realization: DisorderRealization, params: PhysParams,
                     grid: Grid, sym: Lsymbol, cfg: SolveConfig | None,
                     inits: list[RealField],
                     ball_radius: float | None = None,
                     tol_pairwise: float = 1e-6) -> UniquenessVerdict:
    """Solve from several initial iterates and compare the limits.

    ball_radius, when given, is the pragmatic surrogate for the theory's
    uniqueness ball: every init must satisfy ||phi0||_H2 <= ball_radius.
    Non-convergent members propagate their error annotated with the index.
    """
    if ball_radius is not None:
        for i, f in enumerate(inits):
            h2 = norm_h2_cell(f)
            if h2 > ball_radius:
                raise ValueError(
                    f"init {i} has H2 norm {h2:.3g} outside the ball {ball_radius:.3g}")
    solutions = []
    reports = []
    for i, f in enumerate(inits):
        try:
            phi, rep = solve(realization, params, grid, sym, cfg, phi0=f)
        except ConvergenceError as exc:
            raise ConvergenceError(
                f"initialization {i} failed to converge: {exc}",
                step_norms=exc.step_norms, ratios=exc.ratios) from exc
        solutions.append(phi)
        reports.append(rep)
    worst = 0.0
    for i in range(len(solutions)):
        for j in range(i + 1, len(solutions)):
            worst = max(worst, norm_h2_cell(solutions[i] - solutions[j]))
    return UniquenessVerdict(max_pairwise_h2=worst, n_inits=len(inits),
                             reports=reports, unique=worst < tol_pairwise)
