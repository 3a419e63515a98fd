"""Exception hierarchy shared across the package."""


class SpinbosonError(Exception):
    """Base class for all package errors."""


class DomainError(SpinbosonError, ValueError):
    """Input outside the mathematical or configured domain."""


class ConfigurationError(SpinbosonError, ValueError):
    """Invalid run configuration (bad key, value, or file)."""


class SingularityError(SpinbosonError, ArithmeticError):
    """A special function was evaluated at (or too close to) a pole."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class FlowSingularityError(SingularityError):
    """The flow integration hit a nonanalyticity; carries the offending E."""


class PropagatorPoleError(SingularityError):
    """Propagator denominator below the underflow guard (near a pole)."""


class WindowError(SpinbosonError):
    """Laplace-inversion window too small; carries the tail estimate."""

    def __init__(self, message, tail_estimate=None):
        super().__init__(message)
        self.tail_estimate = tail_estimate


class ResolutionError(SpinbosonError):
    """Trace too coarse for the requested analysis."""


class InconclusiveTraceError(SpinbosonError):
    """Trace ended before the regime could be decided."""


class ClassificationError(SpinbosonError):
    """Spectral features insufficient for a regime decision."""


class FixedPointError(SpinbosonError):
    """Damped fixed-point iteration failed to converge."""


class BelowCriticalCouplingError(DomainError):
    """No partially coherent phase: the analytic T_c1 is negative."""


class NoTransitionError(SpinbosonError):
    """A bisection bracket does not straddle the transition."""


class MapError(SpinbosonError):
    """Too many grid points of a residual map failed."""
