"""Exception and warning classes shared across the package."""


class BivgarchError(Exception):
    """Base class for errors raised by this package."""


class NoRootInRange(BivgarchError):
    """The moment function has no sign change on the admissible search range."""


class MCDegenerate(BivgarchError):
    """A Monte-Carlo moment estimate is non-finite."""


class ZeroDenominator(BivgarchError):
    """A conditioning component has no threshold exceedances."""


class ZeroVariance(BivgarchError):
    pass


class DegenerateSeries(BivgarchError):
    """Input series is constant (or otherwise unusable for fitting)."""


class SingularDesign(BivgarchError):
    pass


class ParseError(BivgarchError):
    """A selected CSV cell could not be parsed as a number."""

    def __init__(self, row, column, value=None):
        self.row = row
        self.column = column
        self.value = value
        super().__init__(f"row {row}, column {column!r}: cannot parse {value!r} as a number")


class EmptySeries(BivgarchError):
    pass


class PipelineError(BivgarchError):
    """Wraps an error raised inside a pipeline stage."""

    def __init__(self, stage, error):
        self.stage = stage
        self.error = error
        super().__init__(f"stage {stage!r}: {type(error).__name__}: {error}")


class StationarityWarning(UserWarning):
    """Parameters fail the spectral-radius sufficient condition."""


class BiasWarning(UserWarning):
    """Fixed-length Monte-Carlo estimate drifts when the product length doubles."""


class FewExceedancesWarning(UserWarning):
    pass


class NonConvergenceWarning(UserWarning):
    pass
