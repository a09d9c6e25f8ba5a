"""Alternative Hamiltonians for one-dimensional motion and their quantum checks.

Modules
-------
numerics
    quadrature on the real line and ODE steppers.
exactpoly
    Gaussian-rational polynomials, the W_n family and the operators h, R.
classical
    Hamilton flows of ``p**2/2 + V`` and ``sqrt(2V) cosh p'``.
master
    the master equation for the alternative Hamiltonian.
spectral
    the momentum operator K, its eigenfunctions, bases and Parseval sums.
fourier
    position-space eigenfunctions, generating functions and the nonlocal H'.
cli
    command-line driver (``sequiv`` / ``python -m sequiv``).
"""

from .errors import (
    DivisionNearZero,
    DomainError,
    GridTooCoarse,
    NonFiniteSample,
    NonRealInput,
    SequivError,
    SingularityStop,
    StepFailure,
    ToleranceNotMet,
)

__version__ = "0.1.0"

__all__ = [
    "DivisionNearZero",
    "DomainError",
    "GridTooCoarse",
    "NonFiniteSample",
    "NonRealInput",
    "SequivError",
    "SingularityStop",
    "StepFailure",
    "ToleranceNotMet",
]
