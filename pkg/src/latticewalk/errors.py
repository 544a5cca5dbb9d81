"""Exception types shared across the package."""


class LatticeWalkError(Exception):
    """Base class for domain errors raised by this package."""


class ArenaMismatch(LatticeWalkError):
    """Raised when combining event sets that live in different arenas."""


class DepthExceedsTable(LatticeWalkError):
    """A computation needs a probability row beyond the table horizon."""

    def __init__(self, needed: int, available: int):
        self.needed = needed
        self.available = available
        super().__init__(
            f"row {needed} requested but table has only {available} rows"
        )


class IndexOutOfRange(LatticeWalkError):
    """A step index falls outside the range covered by a schedule or table."""


class ProbabilityOverflow(LatticeWalkError):
    """An evolved probability left [0, 1].

    Signals that the force/gamma combination is outside the model's
    validity range; entries are never clamped.
    """

    def __init__(self, step: int, symbol: int, value):
        self.step = step
        self.symbol = symbol
        self.value = value
        super().__init__(
            f"p_{step}({symbol}) = {value} is outside [0, 1]"
        )


class ExpressionSyntaxError(LatticeWalkError):
    """Event-expression text failed to parse.

    Carries the 0-based character position (plus 1-based line/column)
    and a description of what was expected there.
    """

    def __init__(self, position: int, expected: str, found: str = "",
                 line: int = 1, column: int | None = None):
        self.position = position
        self.expected = expected
        self.found = found
        self.line = line
        self.column = position + 1 if column is None else column
        detail = f"at line {self.line}, column {self.column}: expected {expected}"
        if found:
            detail += f", found {found!r}"
        super().__init__(detail)
