"""Exception types raised across the package."""


class WalkError(Exception):
    """Base class for all errors raised by :mod:`qwdefect`."""


class DomainError(WalkError, ValueError):
    """A parameter lies outside the domain where the model is defined."""


class SingularParameterError(WalkError, ArithmeticError):
    """A closed-form expression has a vanishing denominator."""

    def __init__(self, expression: str, phi: float | None = None):
        self.expression = expression
        self.phi = phi
        where = "" if phi is None else f" at phi={phi!r}"
        super().__init__(f"singular parameter: {expression} vanishes{where}")


class DegenerateStateError(WalkError, ValueError):
    """The amplitude data carries no information (e.g. the zero solution)."""


class BoundaryLeakError(WalkError, RuntimeError):
    """Amplitude reached the edge of the truncated lattice."""


class DivergentSeriesError(WalkError, ValueError):
    """A generating-function series is evaluated outside its disc of convergence."""


class InsufficientDataError(WalkError, ValueError):
    """Not enough usable samples for a fit."""


class OverflowCapError(WalkError, OverflowError):
    """Requested lattice is too wide for the amplitudes to stay in double range."""
