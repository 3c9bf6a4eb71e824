"""Exception hierarchy and warning categories used across the package."""


class RehfError(Exception):
    """Base class for all package errors."""


class HypothesisError(RehfError):
    """A theorem-level hypothesis on the parameters is violated."""


class NumericError(RehfError):
    """A numerical routine failed to reach its tolerance.

    Carries a ``diagnostics`` dict (residual estimates, panel info) when
    available.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class BranchCutError(NumericError):
    """Contour integration left a non-negligible imaginary residue.

    This is the failure mode of a mishandled branch cut in the complex
    square root or logarithm.
    """


class InternalError(RehfError):
    """Internal consistency violated; indicates a bug, not bad input."""


class SpecValidationError(RehfError):
    """A disorder or run specification is invalid."""


class ResourceError(RehfError):
    """A resource budget (dense eigensolver size) would be exceeded."""


class RegimeError(RehfError):
    """Inputs are outside the perturbative regime an operation assumes."""


class ConvergenceError(RehfError):
    """Fixed-point iteration failed to converge; carries the step history."""

    def __init__(self, message, step_norms=None, ratios=None):
        super().__init__(message)
        self.step_norms = list(step_norms or [])
        self.ratios = list(ratios or [])


class DivergenceError(ConvergenceError):
    """Iteration detected as diverging before max_iter was reached."""


class ConfigError(RehfError):
    """Invalid configuration file or command-line input."""


class CutoffWarning(UserWarning):
    """Grid momentum cutoff is marginal for the requested Fermi-Dirac sums."""


class SmallnessWarning(UserWarning):
    """Disorder exceeds the heuristic smallness budget of the contraction theory."""
