"""Exception types shared across the package."""


class DkgError(Exception):
    """Base class for all package errors."""


class ConfigurationError(DkgError):
    """Invalid grid/solver/run configuration (CLI exit code 2)."""


class DomainError(DkgError):
    """Input outside the mathematical domain of an operation."""


class OverflowRangeError(DomainError):
    """exp(sigma*||xi||) would overflow at working precision.

    Carries the largest exponent supported so callers can report the
    admissible sigma for their grid.
    """

    def __init__(self, sigma, max_l1, max_exponent):
        self.sigma = sigma
        self.max_l1 = max_l1
        self.max_exponent = max_exponent
        super().__init__(
            f"exp(sigma*||xi||) overflows: sigma*max||xi|| = {sigma * max_l1:.3g} "
            f"exceeds {max_exponent:.1f}; largest supported sigma on this grid "
            f"is {max_exponent / max_l1:.6g}"
        )


class EstimationError(DkgError):
    """Radius estimation impossible on the requested shell window."""


class PreconditionError(DomainError):
    """Parameter set violates the hypotheses of the estimate under test."""


class NumericalFailure(DkgError):
    """NaN/overflow detected during a run (CLI exit code 3)."""
