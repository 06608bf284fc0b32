from typing import Dict


class DodiffError(Exception):
    """
    Base class of every error raised by dodiff
    """
    def __init__(self, message: str, errors: Dict = None) -> None:
        super().__init__(message)
        self.errors = errors


# -------------------------------------------
# ------- Diffusion parameter errors --------
# -------------------------------------------


class InvalidDiffusionParameterError(DodiffError, ValueError):
    """
    Raised when a diffusion parameter C(ν) violates one of its invariants
    """


class NegativeWeightError(InvalidDiffusionParameterError):
    """
    A weight, tabulated value or band weight is negative
    """


class EmptySupportError(InvalidDiffusionParameterError):
    """
    C(ν) has no strictly positive mass
    """


class SupportOutOfRangeError(InvalidDiffusionParameterError):
    """
    An order lies outside of (0, 1], or a tabulated support leaves [0, 1]
    """


class NormalizationError(InvalidDiffusionParameterError):
    """
    A parameter flagged as normalized does not integrate to one
    """


class DegenerateSupportError(DodiffError, ValueError):
    """
    The requested quantity does not exist for the given support,
    e.g. the spectral density of the classical ν = 1 equation
    """


class DeltaUnsupportedError(DodiffError, ValueError):
    """
    Operation needs a density-type C(ν) and was given a delta mixture
    """


# -------------------------------------------
# ------------- Problem errors --------------
# -------------------------------------------


class DomainError(DodiffError, ValueError):
    """
    Argument outside of the domain on which an expression is defined
    """


class EndpointMismatchError(DodiffError, ValueError):
    """
    Initial data does not satisfy the homogeneous Dirichlet conditions
    """


class ConfigError(DodiffError, ValueError):
    """
    A run configuration document is malformed
    """


class AliasWarning(UserWarning):
    """
    Initial data is not negligible at the edge of the truncated real line
    """


# -------------------------------------------
# ------------ Numerical errors -------------
# -------------------------------------------


class NumericalError(DodiffError, ArithmeticError):
    """
    A numerical routine failed to reach its requested accuracy
    """


class QuadratureNonconvergenceError(NumericalError):
    def __init__(self, message: str, achieved_error: float = None, errors: Dict = None) -> None:
        super().__init__(message, errors)
        self.achieved_error = achieved_error


class ConvergenceFailure(NumericalError):
    def __init__(self, message: str, achieved_bound: float = None, errors: Dict = None) -> None:
        super().__init__(message, errors)
        self.achieved_bound = achieved_bound


class ContourFailure(NumericalError):
    """
    Numerical Laplace inversion lost all significant digits
    """


class GridTooCoarseError(NumericalError):
    """
    The sampled kernel cannot resolve the Caputo derivative
    to the requested tolerance
    """
