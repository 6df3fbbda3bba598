"""Exception types shared across the package."""


class PElasticaError(Exception):
    """Base class for all errors raised by pelastica."""


class DomainError(PElasticaError, ValueError):
    """Arguments lie outside the domain where a quantity is defined."""


class NoSolutionError(DomainError):
    """A modulus or exponent equation has no root for the given data."""


class ConstraintError(DomainError):
    """A constructed object violates its defining constraint."""


class ConvergenceError(PElasticaError, RuntimeError):
    """Quadrature or root finding failed to reach the requested tolerance."""
