"""Text grammar for event expressions.

    expr   := inter ('|' inter)*          union, lowest precedence
    inter  := unary ('&' unary)*          intersection
    unary  := '!' unary | atom            complement
    atom   := plane | hyper | '(' expr ')'
    plane  := 'D' '[' sym (',' sym)* ']'  prefix cylinder literal
    hyper  := 'C' '(' nat ',' sym ')'     single-coordinate literal

Whitespace is insignificant; symbols are 0..6, coordinates any natural
number. `parse` produces an AST; `unparse` renders it back with
canonical spacing so that parse(unparse(e)) == e for every AST and
unparse(parse(text)) is a fixed point. `to_event` evaluates an AST in
an arena.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .algebra import Arena, EventSet
from .errors import ExpressionSyntaxError


class Expr:
    """Marker base class for expression nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class PlaneExpr(Expr):
    letters: tuple[int, ...]


@dataclass(frozen=True)
class HyperExpr(Expr):
    coord: int
    symbol: int


@dataclass(frozen=True)
class NotExpr(Expr):
    operand: Expr


@dataclass(frozen=True)
class AndExpr(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class OrExpr(Expr):
    left: Expr
    right: Expr


_INT = re.compile(r"\d+")


class _Cursor:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, expected: str) -> ExpressionSyntaxError:
        found = self.text[self.pos] if self.pos < len(self.text) else "end of input"
        before = self.text[: self.pos]
        line = before.count("\n") + 1
        column = self.pos - (before.rfind("\n") + 1) + 1
        return ExpressionSyntaxError(
            self.pos, expected, found=found, line=line, column=column
        )

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, char: str) -> None:
        if self.peek() != char:
            raise self.error(f"'{char}'")
        self.pos += 1

    def integer(self) -> int:
        self.skip_ws()
        match = _INT.match(self.text, self.pos)
        if not match:
            raise self.error("an integer")
        self.pos = match.end()
        return int(match.group())

    def symbol(self) -> int:
        self.skip_ws()
        start = self.pos
        value = self.integer()
        if value > 6:
            self.pos = start
            raise self.error("symbol in range 0..6")
        return value


def parse(text: str) -> Expr:
    cur = _Cursor(text)
    expr = _parse_union(cur)
    if cur.peek():
        raise cur.error("end of input, '&' or '|'")
    return expr


def _parse_union(cur: _Cursor) -> Expr:
    expr = _parse_inter(cur)
    while cur.peek() == "|":
        cur.take("|")
        expr = OrExpr(expr, _parse_inter(cur))
    return expr


def _parse_inter(cur: _Cursor) -> Expr:
    expr = _parse_unary(cur)
    while cur.peek() == "&":
        cur.take("&")
        expr = AndExpr(expr, _parse_unary(cur))
    return expr


def _parse_unary(cur: _Cursor) -> Expr:
    if cur.peek() == "!":
        cur.take("!")
        return NotExpr(_parse_unary(cur))
    return _parse_atom(cur)


def _parse_atom(cur: _Cursor) -> Expr:
    head = cur.peek()
    if head == "(":
        cur.take("(")
        expr = _parse_union(cur)
        cur.take(")")
        return expr
    if head == "D":
        cur.pos += 1
        cur.take("[")
        letters = [cur.symbol()]
        while cur.peek() == ",":
            cur.take(",")
            letters.append(cur.symbol())
        cur.take("]")
        return PlaneExpr(tuple(letters))
    if head == "C":
        cur.pos += 1
        cur.take("(")
        coord = cur.integer()
        cur.take(",")
        symbol = cur.symbol()
        cur.take(")")
        return HyperExpr(coord, symbol)
    raise cur.error("'D[...]', 'C(n,i)', '!' or '('")


_PRECEDENCE = {OrExpr: 1, AndExpr: 2, NotExpr: 3, PlaneExpr: 4, HyperExpr: 4}


def _prec(expr: Expr) -> int:
    return _PRECEDENCE[type(expr)]


def unparse(expr: Expr) -> str:
    """Canonical text: tight literals, single spaces around & and |,
    parentheses only where the shape requires them."""
    if isinstance(expr, PlaneExpr):
        return "D[" + ",".join(str(x) for x in expr.letters) + "]"
    if isinstance(expr, HyperExpr):
        return f"C({expr.coord},{expr.symbol})"
    if isinstance(expr, NotExpr):
        inner = unparse(expr.operand)
        if _prec(expr.operand) < _prec(expr):
            inner = f"({inner})"
        return "!" + inner
    if isinstance(expr, (AndExpr, OrExpr)):
        op = " & " if isinstance(expr, AndExpr) else " | "
        mine = _prec(expr)
        left = unparse(expr.left)
        if _prec(expr.left) < mine:
            left = f"({left})"
        right = unparse(expr.right)
        # strictly binds: a right-nested chain must keep its parentheses
        if _prec(expr.right) <= mine:
            right = f"({right})"
        return left + op + right
    raise TypeError(f"not an expression node: {expr!r}")


def to_event(expr: Expr, arena: Arena) -> EventSet:
    """Evaluate an AST to a canonical event set in `arena`."""
    if isinstance(expr, PlaneExpr):
        return arena.plane(expr.letters)
    if isinstance(expr, HyperExpr):
        return arena.hyperplane(expr.coord, expr.symbol)
    if isinstance(expr, NotExpr):
        return to_event(expr.operand, arena).complement()
    if isinstance(expr, AndExpr):
        return to_event(expr.left, arena).intersect(to_event(expr.right, arena))
    if isinstance(expr, OrExpr):
        return to_event(expr.left, arena).union(to_event(expr.right, arena))
    raise TypeError(f"not an expression node: {expr!r}")


def parse_event(text: str, arena: Arena) -> EventSet:
    """Parse and evaluate in one go."""
    return to_event(parse(text), arena)
