"""Exception types raised by `homogldp`.

Numerical hot paths (log-MGFs, Cramér functionals, Legendre transforms) do not
raise on the boundary of an effective domain; they return `math.inf` and
report a `homogldp.entities.RateStatus`. The exceptions below are reserved
for invalid inputs and for failures the caller cannot recover from.
"""

__docformat__ = 'google'

__all__ = [
    'HomogLDPError',
    'ConfigError',
    'NumericalError',
    'DomainError'
]

class HomogLDPError(Exception):
    """Base class for all errors raised by the package."""
    exit_code: int = 1

    def __init__(self, message: str) -> None:
        super().__init__(message)

class ConfigError(HomogLDPError):
    """An experiment config or figure recipe failed validation.

    Args:
        message: What is wrong.
        path: Dotted path of the offending field, e.g. ``media.family``.
    """
    exit_code: int = 2

    def __init__(self, message: str, path: str | None = None) -> None:
        self.path = path
        if path:
            message = f'{path}: {message}'
        super().__init__(message)

class NumericalError(HomogLDPError):
    """Quadrature or optimizer failure, or a Monte Carlo run with unusable weights."""
    exit_code: int = 3

class DomainError(HomogLDPError, ValueError):
    """An argument lies outside the domain of the operation.

    Raised for x outside (0, 1), ε with non-integer 1/ε, α ≤ ν_b, C_c ≤ 0,
    η ≥ 1/2 and media the Chernoff bound does not support.
    """
    exit_code: int = 2
