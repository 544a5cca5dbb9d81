"""Per-step symbol probability tables.

Row n assigns exact probabilities to the seven move symbols at step n.
Each row is seven non-negative rationals summing to exactly 1; the
number of rows is the table's horizon. Tables never auto-extend: any
computation that needs a row beyond the horizon fails with
DepthExceedsTable.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from .errors import DepthExceedsTable
from .rational import format_rational, parse_rational

ROW_WIDTH = 7

Row = tuple[Fraction, ...]

ONE = Fraction(1)


def check_row(values: Iterable) -> Row:
    row = tuple(Fraction(v) for v in values)
    if len(row) != ROW_WIDTH:
        raise ValueError(f"a row needs exactly {ROW_WIDTH} entries, got {len(row)}")
    for i, p in enumerate(row):
        if p < 0:
            raise ValueError(f"negative probability at symbol {i}: {p}")
    total = sum(row)
    if total != ONE:
        raise ValueError(f"row sums to {total}, expected exactly 1")
    return row


class StepProbabilityTable:
    """Immutable sequence of validated probability rows."""

    __slots__ = ("rows",)

    def __init__(self, rows: Iterable[Iterable]):
        object.__setattr__(self, "rows", tuple(check_row(r) for r in rows))
        if not self.rows:
            raise ValueError("a table needs at least one row")

    def __setattr__(self, name, value):
        raise AttributeError("StepProbabilityTable is immutable")

    def __eq__(self, other):
        if not isinstance(other, StepProbabilityTable):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __len__(self) -> int:
        return len(self.rows)

    def __repr__(self) -> str:
        return f"StepProbabilityTable(rows={len(self.rows)})"

    @property
    def horizon(self) -> int:
        return len(self.rows)

    def row(self, n: int) -> Row:
        if not 0 <= n < len(self.rows):
            raise DepthExceedsTable(n, len(self.rows))
        return self.rows[n]

    # -- generators ------------------------------------------------------

    @classmethod
    def uniform(cls, n_rows: int) -> "StepProbabilityTable":
        row = (Fraction(1, ROW_WIDTH),) * ROW_WIDTH
        return cls([row] * int(n_rows))

    @classmethod
    def constant(cls, row: Iterable, n_rows: int) -> "StepProbabilityTable":
        return cls([check_row(row)] * int(n_rows))

    # -- wire format -------------------------------------------------------

    @classmethod
    def from_json_dict(cls, data: dict) -> "StepProbabilityTable":
        """Parse `{"rows": [["1/7", ..., "1/7"], ...]}`."""
        if "rows" not in data:
            raise ValueError('table JSON needs a "rows" key')
        return cls([[parse_rational(v) for v in row] for row in data["rows"]])

    def to_json_dict(self) -> dict:
        return {"rows": [[format_rational(p) for p in row] for row in self.rows]}
