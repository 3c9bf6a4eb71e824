"""Homogeneous (jellium) reference problem: density of the free gas and the
chemical potential fixed by charge neutrality, in continuum and grid forms.

The homogeneous equation reduces to kappa0 = A(mu) with

    A(mu) = (1/2 pi^2) * int_0^inf q^2 / (1 + exp(-beta mu) exp(beta q^2)) dq,

which is continuous and strictly increasing in mu and sandwiched between the
closed-form bounds C(mu) <= A(mu) <= B(mu) used to bracket the root.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import expit, gammaincc, gamma

from .errors import HypothesisError, InternalError, NumericError
from .grids import Grid
from .params import PhysParams

#: threshold constant of the neutrality hypothesis, 1/(8 pi^(3/2))
C1 = 1.0 / (8.0 * math.pi ** 1.5)
#: lower-bound constant, 1/(12 pi^2)
C2 = 1.0 / (12.0 * math.pi ** 2)

#: decay margin used to truncate Fermi-Dirac integrals (exp(-45) ~ 3e-20)
_TAIL_EXPONENT = 45.0


def fermi_dirac(x):
    """Fermi-Dirac occupation 1/(1+exp(x)), overflow-safe for real input."""
    return expit(-np.asarray(x, dtype=float)) if np.ndim(x) else expit(-x)


def _quad_checked(f, a, b, *, epsabs=1e-13, epsrel=1e-13, points=None,
                  abs_tol=1e-12, what="integral"):
    """scipy.integrate.quad with the convergence estimate enforced."""
    out = quad(f, a, b, epsabs=epsabs, epsrel=epsrel, limit=300,
               points=points, full_output=1)
    val, abserr = out[0], out[1]
    if len(out) > 3 or abserr > max(abs_tol, 1e-8 * abs(val)):
        raise NumericError(
            f"quadrature for {what} did not converge (error estimate {abserr:.2e})",
            diagnostics={"value": val, "abserr": abserr, "message": out[-1] if len(out) > 3 else ""},
        )
    return val


def density_A(mu: float, beta: float) -> float:
    """Homogeneous electron density A(mu) of the free gas at inverse
    temperature beta.

    Evaluated by adaptive quadrature on [0, sqrt(mu_+ + 45/beta)]; the
    truncated tail is below 1e-18 relative for all admissible parameters.
    """
    if not beta > 0:
        raise ValueError("beta must be positive")
    qmax = math.sqrt(max(mu, 0.0) + _TAIL_EXPONENT / beta)
    pts = [math.sqrt(mu)] if 0.0 < mu else None
    val = _quad_checked(
        lambda q: q * q * expit(-beta * (q * q - mu)), 0.0, qmax,
        points=pts, what=f"A(mu={mu}, beta={beta})")
    return val / (2.0 * math.pi ** 2)


def bound_upper_B(mu: float, beta: float) -> float:
    """Gaussian upper bound B(mu) = exp(beta mu) beta^{-3/2} / (8 pi^{3/2})."""
    return C1 * math.exp(beta * mu) * beta ** -1.5


def bound_lower_C(mu: float) -> float:
    """Half-filled-sphere lower bound C(mu) = mu^{3/2} / (12 pi^2), mu > 0."""
    if mu <= 0:
        return 0.0
    return C2 * mu ** 1.5


def mu_bracket(kappa0: float, beta: float) -> tuple[float, float]:
    """Open bracket for the neutral chemical potential.

    (1/beta) log(kappa0 beta^{3/2} / c1) < mu < (kappa0 / c2)^{2/3},
    valid once kappa0 > c1 beta^{-3/2}.
    """
    if not beta > 0:
        raise ValueError("beta must be positive")
    threshold = C1 * beta ** -1.5
    if not kappa0 > threshold:
        raise HypothesisError(
            f"kappa0 = {kappa0:.6g} must exceed c1*beta^(-3/2) = {threshold:.6g} "
            "for a positive neutral chemical potential to exist")
    lo = (1.0 / beta) * math.log(kappa0 * beta ** 1.5 / C1)
    hi = (kappa0 / C2) ** (2.0 / 3.0)
    return lo, hi


def solve_mu(kappa0: float, beta: float) -> float:
    """Chemical potential with A(mu) = kappa0, strictly inside the bracket.

    Bracketed root find (Brent: bisection plus secant/inverse-quadratic
    steps); the result satisfies |A(mu) - kappa0| <= 1e-10 * kappa0.
    """
    lo, hi = mu_bracket(kappa0, beta)
    f_lo = density_A(lo, beta) - kappa0
    f_hi = density_A(hi, beta) - kappa0
    if not (f_lo < 0.0 < f_hi):
        raise InternalError(
            "bracket endpoints do not straddle the target density "
            f"(A(lo)-k0={f_lo:.3e}, A(hi)-k0={f_hi:.3e}); quadrature failure")
    mu = brentq(lambda m: density_A(m, beta) - kappa0, lo, hi,
                xtol=1e-14, rtol=8.9e-16)
    resid = abs(density_A(mu, beta) - kappa0)
    if resid > 1e-10 * kappa0:
        raise NumericError(
            f"mu root polish left |A(mu)-kappa0| = {resid:.2e}",
            diagnostics={"mu": mu, "residual": resid})
    if not (lo < mu < hi):
        raise InternalError(f"solved mu = {mu} escaped its bracket ({lo}, {hi})")
    return mu


def params_from_kappa0(beta: float, kappa0: float) -> PhysParams:
    """PhysParams with mu solved from charge neutrality."""
    return PhysParams(beta=beta, mu=solve_mu(kappa0, beta), kappa0=kappa0)


def params_from_mu(beta: float, mu: float) -> PhysParams:
    """PhysParams with kappa0 = A(mu), the density the gas actually carries."""
    return PhysParams(beta=beta, mu=mu, kappa0=density_A(mu, beta))


def density_A_discrete(mu: float, beta: float, grid: Grid) -> float:
    """Grid analogue A_h(mu) = (1/L^3) sum_G fermi(beta(|G|^2 - mu)).

    Converges to A(mu) as the supercell and the momentum cutoff grow.
    """
    grid.check_cutoff(beta, mu)
    return float(expit(-beta * (grid.G2 - mu)).sum()) / grid.vol


def momentum_tail_estimate(mu: float, beta: float, grid: Grid) -> float:
    """Continuum density carried beyond the grid's per-axis Nyquist sphere.

    (1/2 pi^2) exp(beta mu) int_{q0}^inf q^2 exp(-beta q^2) dq with q0 the
    per-axis Nyquist momentum; an upper bound for the occupation the folded
    grid cannot represent.
    """
    q0 = math.pi * grid.n_pts / grid.a
    x0 = beta * q0 * q0
    # int_{q0}^inf q^2 e^{-b q^2} dq = Gamma(3/2, x0) / (2 b^{3/2})
    tail = gamma(1.5) * gammaincc(1.5, x0) / (2.0 * beta ** 1.5)
    return math.exp(beta * mu) * tail / (2.0 * math.pi ** 2)


def calibrate_mu_discrete(kappa0: float, beta: float, grid: Grid) -> float:
    """Grid chemical potential mu_h with A_h(mu_h) = kappa0.

    Solved to machine precision so the solver's reference density is
    grid-consistent; raises NumericError when the momentum cutoff clips a
    tail larger than 1e-10 * kappa0.
    """
    max_density = (grid.n_pts / grid.a) ** 3
    if not kappa0 < max_density:
        raise HypothesisError(
            f"kappa0 = {kappa0:.6g} meets or exceeds the grid's representable "
            f"density {max_density:.6g} (= n_pts^3/a^3); refine n_pts")
    lo, hi = mu_bracket(kappa0, beta)
    step = 5.0 / beta
    while density_A_discrete(lo, beta, grid) >= kappa0:
        lo -= step
    while density_A_discrete(hi, beta, grid) <= kappa0:
        hi += step
    mu_h = brentq(lambda m: density_A_discrete(m, beta, grid) - kappa0,
                  lo, hi, xtol=1e-14, rtol=8.9e-16)
    tail = momentum_tail_estimate(mu_h, beta, grid)
    if tail > 1e-10 * kappa0:
        raise NumericError(
            f"momentum cutoff clips a density tail {tail:.2e} > 1e-10*kappa0; "
            "the discrete calibration is unreliable on this grid",
            diagnostics={"tail": tail, "mu_h": mu_h})
    return mu_h
