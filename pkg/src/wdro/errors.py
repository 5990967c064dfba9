"""Exception hierarchy shared across the library."""


class WdroError(Exception):
    """Base class for all library errors."""


class EmptyDataset(WdroError):
    pass


class DimensionMismatch(WdroError):
    """Feature vectors of inconsistent length. Carries the offending row index
    when raised during dataset validation."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class NonFiniteValue(WdroError):
    """NaN or infinity in input data."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class LabelMismatch(WdroError):
    """Transport cost invoked on points with different labels, which the
    sampler contract forbids."""


class DegeneratePoint(WdroError):
    """Cost gradient requested where it is undefined (p=1 at coinciding points)."""


class NonFiniteObjective(WdroError):
    """Overflow or NaN encountered while evaluating an objective."""


class InvalidConfig(WdroError):
    pass


class InvalidLabels(WdroError):
    """Classification labels outside {-1, +1}."""


class ParseError(WdroError):
    """Malformed input file. Carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.line = line
