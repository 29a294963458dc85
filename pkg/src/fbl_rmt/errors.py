"""Exception types shared across the package.

Everything numerical raises a subclass of :class:`FblRmtError`, so callers
(and the CLI) can separate computational diagnostics from plain usage bugs.
"""


class FblRmtError(Exception):
    """Base class for computational diagnostics raised by this package."""


class NoAdmissibleRoot(FblRmtError):
    """The cubic solver found no real root satisfying the admissibility constraints."""


class MultipleAdmissibleRoots(FblRmtError):
    """More than one real root passed the admissibility constraints.

    This should never happen for valid parameters; it is reported rather than
    silently tie-broken because it indicates the selection rule is wrong.
    """


class DegenerateDenominator(FblRmtError):
    """A fixed-point denominator underflowed; derivatives cannot be formed."""


class NonPositiveLogArgument(FblRmtError):
    """A logarithm argument in a closed form was <= 0 (inadmissible fixed point)."""


class XiOutOfRange(FblRmtError):
    """The variance kernel left (0, 1), so -log of it is not a valid variance."""


class NonPositiveVariance(FblRmtError):
    """A dispersion quantity that must be positive came out <= 0."""


class EdgeCaseUnsupported(FblRmtError):
    """High-SNR expansion requested on an excluded boundary (eta, kappa or eta*kappa = 1)."""


class NoCaseApplies(FblRmtError):
    """No high-SNR branch covers the requested parameter point."""


class InvalidVariance(FblRmtError):
    """Variance inputs to a probability bound violate their preconditions."""


class FactorizationFailure(FblRmtError):
    """A Gram matrix was numerically non-positive-definite (overflow/NaN input)."""


class SelfCheckFailed(FblRmtError):
    """A dual-formula verification (debug mode) disagreed beyond tolerance."""


class ConfigError(FblRmtError):
    """Bad CLI usage or configuration file content (exit status 2)."""
