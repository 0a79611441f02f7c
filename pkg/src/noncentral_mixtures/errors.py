"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of a function."""


class SpecError(ValueError):
    """A series specification violates its structural assumptions."""


class DegenerateNormalizerError(ZeroDivisionError):
    """A truncated normalizing sum evaluated to zero."""


class RadiusError(ValueError):
    """A series was evaluated at or beyond its radius of convergence."""


class TruncationError(RuntimeError):
    """No truncation horizon below the cap achieves the requested tail bound."""


class CoverageError(RuntimeError):
    """A truncated identity check left a residual above tolerance."""
