"""Exception types raised across the package."""


class DimensionMismatch(ValueError):
    """Operands have incompatible shapes."""


class RankDeficient(ValueError):
    """A matrix that must have full column rank does not."""


class BlockTooSmall(ValueError):
    """A measurement block has fewer columns than the target rank."""


class EmptyStream(ValueError):
    """An estimator was asked to run on a stream with no blocks."""


class ConfigInvalid(ValueError):
    """A stream or experiment configuration violates its invariants."""


class EmptyReport(ValueError):
    """A report with no rows was passed where data is required."""


class ParseError(ValueError):
    """Malformed stream file.

    Parameters
    ----------
    lineno : int
        1-based line number of the offending line.
    reason : str
        Human readable description.
    """

    def __init__(self, lineno, reason):
        self.lineno = lineno
        self.reason = reason
        super().__init__(f"line {lineno}: {reason}")
