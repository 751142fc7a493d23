"""Poisson transform for differential forms on real hyperbolic space."""

__version__ = "0.1.0"

from .errors import (AccuracyError, ConfigError, ContractError, DomainError, HypoissonError,
                     NonRadialError, PoleError)
from .specfun import SpectralParams

__all__ = ["__version__", "SpectralParams", "HypoissonError", "DomainError", "PoleError",
           "AccuracyError", "ContractError", "NonRadialError", "ConfigError"]
