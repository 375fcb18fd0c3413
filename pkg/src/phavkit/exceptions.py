"""Exception types raised by phavkit."""


class PhavkitError(Exception):
    """Base class for library errors."""


class DomainError(PhavkitError, ValueError):
    """An argument lies outside the domain of the operation."""


class CapacityError(PhavkitError):
    """The Fock cutoff needed for a state exceeds the configured hard limit."""


class NumericalError(PhavkitError, ArithmeticError):
    """A quadrature or series failed to reach its tolerance.

    ``diagnostics`` carries whatever the failing routine knew at the time
    (node counts, last correction, term magnitudes).
    """

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics
