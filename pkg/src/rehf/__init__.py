"""Screened fixed-point solver for the positive-temperature reduced
Hartree-Fock equation with a small Anderson-type background charge."""

from .params import PhysParams
from .grids import (
    Grid,
    RealField,
    SpectralField,
    to_spectral,
    to_real,
    norm_l2_cell,
    norm_h2_cell,
    unit_cell_l2_norms,
    shift_lattice,
    smooth_random_field,
)
from .jellium import (
    density_A,
    density_A_discrete,
    solve_mu,
    calibrate_mu_discrete,
    params_from_mu,
    params_from_kappa0,
)
from .screening import (
    ScreeningTable,
    Lsymbol,
    m_of_p,
    m_contour_oracle,
    build_table,
    build_L_symbol,
    apply_L,
    apply_L_inverse,
)
from .disorder import DisorderSpec, DisorderRealization, sample, norm_kappa_prime
from .density import build_hamiltonian, spectrum, rho, nonlinearity_N, extract_N2
from .solver import SolveConfig, SolveReport, solve, solve_multi_init
from . import errors

__version__ = "0.1.0"

__all__ = [
    "PhysParams", "Grid", "RealField", "SpectralField",
    "to_spectral", "to_real", "norm_l2_cell", "norm_h2_cell",
    "unit_cell_l2_norms", "shift_lattice", "smooth_random_field",
    "density_A", "density_A_discrete", "solve_mu", "calibrate_mu_discrete",
    "params_from_mu", "params_from_kappa0",
    "ScreeningTable", "Lsymbol", "m_of_p", "m_contour_oracle",
    "build_table", "build_L_symbol", "apply_L", "apply_L_inverse",
    "DisorderSpec", "DisorderRealization", "sample", "norm_kappa_prime",
    "build_hamiltonian", "spectrum", "rho", "nonlinearity_N", "extract_N2",
    "SolveConfig", "SolveReport", "solve", "solve_multi_init",
    "errors",
]
