"""Exception hierarchy for the package.

Every error raised deliberately by this package derives from
:class:`DarksteadyError`, so callers can catch one type at the boundary.
"""


class DarksteadyError(Exception):
    """Base class for all errors raised by darksteady."""


class DimensionError(DarksteadyError):
    """Operands have incompatible or invalid shapes."""


class NumericalError(DarksteadyError):
    """A numerical routine failed to meet its accuracy contract."""


class StepSizeError(DarksteadyError):
    """Fixed integration step too large for the generator's spectral bound.

    Carries ``suggested_dt``, the largest step that satisfies the guard.
    """

    def __init__(self, message, suggested_dt=None):
        super().__init__(message)
        self.suggested_dt = suggested_dt


class NonUniqueSteadyState(DarksteadyError):
    """The generator's null space has dimension greater than one.

    ``stationary_basis`` holds one (unnormalized) matrix per null vector so
    the degenerate stationary sector can be inspected.  ``null_dimension``
    and ``spectral_gap`` mirror the certificate of the unique case.
    """

    def __init__(self, message, stationary_basis=None, null_dimension=None,
                 spectral_gap=None):
        super().__init__(message)
        self.stationary_basis = stationary_basis
        self.null_dimension = null_dimension
        self.spectral_gap = spectral_gap


class ConfigError(DarksteadyError):
    """Invalid configuration input: unknown key, bad value, broken invariant."""


class DomainError(DarksteadyError):
    """Argument outside the mathematical domain of a formula."""
