"""Shared random generators and independent oracles.

The oracles here never touch the decision DAG: membership is evaluated
straight off the expression AST and measures are summed word by word,
so they can arbitrate what the algebra module computes.
"""

import random
from fractions import Fraction
from itertools import product

import pytest

from latticewalk.expressions import (
    AndExpr,
    HyperExpr,
    NotExpr,
    OrExpr,
    PlaneExpr,
)
from latticewalk.tables import StepProbabilityTable


def random_row(rnd: random.Random, weight_max: int = 60):
    """Seven non-negative exact rationals summing to 1."""
    weights = [rnd.randint(0, weight_max) for _ in range(7)]
    if not any(weights):
        weights[rnd.randrange(7)] = 1
    total = sum(weights)
    return tuple(Fraction(w, total) for w in weights)


def random_table(rnd: random.Random, n_rows: int) -> StepProbabilityTable:
    return StepProbabilityTable([random_row(rnd) for _ in range(n_rows)])


def random_expression(rnd: random.Random, depth: int, size: int):
    """Random AST whose leaves constrain only coordinates < depth."""

    def leaf():
        if rnd.random() < 0.5:
            length = rnd.randint(1, depth)
            return PlaneExpr(tuple(rnd.randrange(7) for _ in range(length)))
        return HyperExpr(rnd.randrange(depth), rnd.randrange(7))

    expr = leaf()
    for _ in range(size):
        roll = rnd.random()
        if roll < 0.25:
            expr = NotExpr(expr)
        elif roll < 0.625:
            expr = AndExpr(expr, leaf()) if rnd.random() < 0.5 else AndExpr(leaf(), expr)
        else:
            expr = OrExpr(expr, leaf()) if rnd.random() < 0.5 else OrExpr(leaf(), expr)
    return expr


def ast_member(expr, word) -> bool:
    """Membership of a word prefix, straight off the AST."""
    if isinstance(expr, PlaneExpr):
        return word[: len(expr.letters)] == expr.letters
    if isinstance(expr, HyperExpr):
        return word[expr.coord] == expr.symbol
    if isinstance(expr, NotExpr):
        return not ast_member(expr.operand, word)
    if isinstance(expr, AndExpr):
        return ast_member(expr.left, word) and ast_member(expr.right, word)
    if isinstance(expr, OrExpr):
        return ast_member(expr.left, word) or ast_member(expr.right, word)
    raise TypeError(expr)


def word_probability(word, table: StepProbabilityTable) -> Fraction:
    p = Fraction(1)
    for k, symbol in enumerate(word):
        p *= table.row(k)[symbol]
    return p


def enumerate_words(depth: int):
    return product(range(7), repeat=depth)


@pytest.fixture
def rnd():
    return random.Random(0xC0FFEE)
