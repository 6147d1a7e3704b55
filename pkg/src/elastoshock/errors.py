"""Exception hierarchy.

Two families: :class:`InvalidInput` for data that violates a precondition
(the CLI maps these to exit code 2) and :class:`NumericalFailure` for
computations that could not be completed or certified (exit code 3).
"""


class ElastoShockError(Exception):
    """Base class for all package errors."""


class InvalidInput(ElastoShockError, ValueError):
    pass


class NumericalFailure(ElastoShockError, ArithmeticError):
    pass


# --- input / precondition errors -------------------------------------------

class InvalidParameters(InvalidInput):
    pass


class NonHyperbolic(InvalidInput):
    """Sound speed squared is not positive."""


class OutOfRange(InvalidInput):
    pass


class Degenerate(InvalidInput):
    """Zero density jump across the front."""


class DegenerateDeformation(InvalidInput):
    pass


class FrameError(InvalidInput):
    """Tangential velocity differs across the front."""


class LaxViolated(InvalidInput):
    pass


class PatternMismatch(InvalidInput):
    pass


class ConvexityRequired(InvalidInput):
    pass


class AsymmetricInput(InvalidInput):
    pass


class ConfigError(InvalidInput):
    pass


# --- numerical failures ----------------------------------------------------

class NoRealRoot(NumericalFailure):
    pass


class SingularBlock(NumericalFailure):
    pass


class SpectrumNotStable(NumericalFailure):
    pass


class IllConditioned(NumericalFailure):
    pass


class SelectionAmbiguous(NumericalFailure):
    pass


class RankDeficient(NumericalFailure):
    pass


class ScanInconclusive(NumericalFailure):
    def __init__(self, message, witness=None, min_abs_det=None):
        super().__init__(message)
        self.witness = witness
        self.min_abs_det = min_abs_det


class NumericalInconsistency(NumericalFailure):
    """Two routes to the same quantity disagree beyond tolerance."""


class DegenerateLeadingCoefficient(UserWarning):
    """Leading polynomial coefficient is numerically zero."""
