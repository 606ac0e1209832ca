"""Exception types shared across the package.

The CLI maps these onto exit codes: bad arguments or out-of-domain
parameters exit 2, numerical failures (factorization, quadrature) exit 3.
"""


class ParameterError(ValueError):
    """An argument is outside the domain a routine is defined on."""


class DegenerateCaseError(ParameterError):
    """A formula degenerates for these inputs (zero radius, zero variance, ...)."""


class NumericalError(RuntimeError):
    """A numerical procedure failed to produce a trustworthy result."""


class FactorizationError(NumericalError):
    """Covariance factorization failed, or its repair exceeded the gate."""


class QuadratureError(NumericalError):
    """A quadrature did not converge to the requested tolerance."""
