"""Exception types shared across the package."""


class SequivError(Exception):
    """Base class for all errors raised by sequiv."""


class DomainError(SequivError, ValueError):
    """An argument lies outside the domain where a formula is defined."""


class ToleranceNotMet(SequivError):
    """Adaptive quadrature ran out of subdivisions before reaching abs_tol."""

    def __init__(self, message, value=None, err_estimate=None):
        super().__init__(message)
        self.value = value
        self.err_estimate = err_estimate


class NonFiniteSample(SequivError):
    """An integrand or vector field returned inf or nan."""


class StepFailure(SequivError):
    """The adaptive ODE step controller underflowed."""

    def __init__(self, message, t_last=None, path=None):
        super().__init__(message)
        self.t_last = t_last
        self.path = path


class SingularityStop(SequivError):
    """A flow reached the x = 0 singularity of the alternative model."""

    def __init__(self, message, t_last):
        super().__init__(message)
        self.t_last = t_last


class NonRealInput(SequivError, ValueError):
    """A polynomial operator received coefficients with nonzero imaginary part."""


class GridTooCoarse(SequivError):
    """Estimated finite-difference error exceeds the requested tolerance."""


class DivisionNearZero(SequivError, ZeroDivisionError):
    """A residual would divide by a value below the safety threshold."""
