"""Exception types raised by the library."""


class HypoissonError(Exception):
    """Base class for all library errors."""


class DomainError(HypoissonError, ValueError):
    """An argument lies outside the domain of an operation."""


class PoleError(DomainError):
    """A Gamma-function pole was hit."""


class AccuracyError(HypoissonError, ArithmeticError):
    """A series or quadrature cannot reach the requested accuracy."""


class ContractError(HypoissonError, AssertionError):
    """A caller-asserted property (e.g. right M-invariance) does not hold."""


class NonRadialError(DomainError):
    """An endomorphism is not block-scalar on the M-decomposition."""


class ConfigError(DomainError):
    """Invalid run configuration."""
