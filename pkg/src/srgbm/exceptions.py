"""Exception hierarchy shared by the simulation, analytics and harness layers."""


class SrgbmError(Exception):
    """Base class for all package errors."""


class ParameterError(SrgbmError, ValueError):
    """Invalid model parameters, grid, or operation input."""


class RegimeError(ParameterError):
    """An approximation was requested outside the regime where it holds."""


class NumericalError(SrgbmError, RuntimeError):
    """A numerical procedure failed to deliver a trustworthy answer."""


class DiscretizationError(NumericalError):
    """An Euler increment would have pushed the position to x <= 0."""


class BracketingError(NumericalError):
    """A root could not be bracketed."""


class QuadratureError(NumericalError):
    """Adaptive quadrature did not converge to the requested tolerance."""
