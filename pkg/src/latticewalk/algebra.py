"""Exact set algebra over infinite move-symbol sequences.

The sample space is the set of infinite sequences over the alphabet
{0, .., 6}. Two families of basic sets are supported:

* ``hyperplane(n, i)`` -- all sequences whose n-th symbol equals i
  (written ``C(n,i)`` in the text grammar);
* ``plane(word)`` -- all sequences starting with a given finite word,
  i.e. a prefix cylinder (written ``D[i0,i1,...]``).

Finite boolean combinations of these are represented canonically as a
depth-tagged 7-ary decision DAG. An internal node carries the
coordinate index it branches on and exactly seven children, one per
symbol; the two terminals FULL and EMPTY are shared across depths. A
sequence belongs to the set iff following its symbols from the root
reaches FULL. Canonical form means: a node whose children are all FULL
(or all EMPTY) collapses to the terminal, and structurally identical
nodes are shared, so handle equality coincides with set equality. The
FULL-paths of the DAG are exactly a decomposition of the set into
pairwise disjoint prefix cylinders, which is what makes the probability
of the set a finite sum of products of per-coordinate probabilities.

Event sets are immutable values tied to an :class:`Arena`. An arena is
single-writer while sets are being built; afterwards it may be shared
freely between concurrent readers (measure, enumeration, membership),
since queries never mutate arena state.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

from .errors import ArenaMismatch, DepthExceedsTable
from .tables import StepProbabilityTable

N_SYMBOLS = 7

PlaneWord = tuple[int, ...]


def check_symbol(value: int) -> int:
    value = int(value)
    if not 0 <= value < N_SYMBOLS:
        raise ValueError(f"symbol out of range 0..6: {value}")
    return value


def check_plane_word(letters: Iterable[int]) -> PlaneWord:
    word = tuple(check_symbol(x) for x in letters)
    if not word:
        raise ValueError("a plane word must contain at least one symbol")
    return word


class Arena:
    """Shared store of hash-consed decision-DAG nodes.

    Handles 0 and 1 are the EMPTY and FULL terminals. Every other
    handle indexes an internal node (depth, children). All construction
    goes through :meth:`_make`, which enforces the collapse rules, so
    two handles are equal iff they denote the same set.
    """

    EMPTY = 0
    FULL = 1

    def __init__(self):
        self._nodes: list[tuple[int, tuple[int, ...]]] = [(-1, ()), (-1, ())]
        self._index: dict[tuple[int, tuple[int, ...]], int] = {}
        self._cache: dict[tuple, int] = {}

    @property
    def size(self) -> int:
        """Number of live internal nodes (terminals excluded)."""
        return len(self._nodes) - 2

    def node_depth(self, handle: int) -> int:
        return self._nodes[handle][0]

    def node_children(self, handle: int) -> tuple[int, ...]:
        return self._nodes[handle][1]

    def _make(self, depth: int, children: tuple[int, ...]) -> int:
        first = children[0]
        if first in (Arena.EMPTY, Arena.FULL) and all(c == first for c in children):
            return first
        key = (depth, children)
        handle = self._index.get(key)
        if handle is None:
            handle = len(self._nodes)
            self._nodes.append(key)
            self._index[key] = handle
        return handle

    # -- constructors --------------------------------------------------

    def empty(self) -> "EventSet":
        return EventSet(self, Arena.EMPTY)

    def universe(self) -> "EventSet":
        return EventSet(self, Arena.FULL)

    def plane(self, letters: Iterable[int]) -> "EventSet":
        """Prefix cylinder: all sequences beginning with `letters`."""
        word = check_plane_word(letters)
        handle = Arena.FULL
        for depth in range(len(word) - 1, -1, -1):
            children = [Arena.EMPTY] * N_SYMBOLS
            children[word[depth]] = handle
            handle = self._make(depth, tuple(children))
        return EventSet(self, handle)

    def hyperplane(self, n: int, i: int) -> "EventSet":
        """All sequences whose coordinate `n` equals symbol `i`.

        Coordinates 0..n-1 are unconstrained: each of those levels is a
        single shared node with all seven children equal.
        """
        n = int(n)
        if n < 0:
            raise ValueError(f"coordinate index must be >= 0: {n}")
        i = check_symbol(i)
        children = [Arena.EMPTY] * N_SYMBOLS
        children[i] = Arena.FULL
        handle = self._make(n, tuple(children))
        for depth in range(n - 1, -1, -1):
            handle = self._make(depth, (handle,) * N_SYMBOLS)
        return EventSet(self, handle)

    # -- canonical set operations ---------------------------------------

    def _complement(self, h: int) -> int:
        if h == Arena.EMPTY:
            return Arena.FULL
        if h == Arena.FULL:
            return Arena.EMPTY
        key = ("not", h)
        out = self._cache.get(key)
        if out is None:
            depth, children = self._nodes[h]
            out = self._make(depth, tuple(self._complement(c) for c in children))
            self._cache[key] = out
        return out

    def _union(self, a: int, b: int) -> int:
        if a == Arena.FULL or b == Arena.FULL:
            return Arena.FULL
        if a == Arena.EMPTY:
            return b
        if b == Arena.EMPTY:
            return a
        if a == b:
            return a
        key = ("or", a, b) if a < b else ("or", b, a)
        out = self._cache.get(key)
        if out is None:
            da, ca = self._nodes[a]
            db, cb = self._nodes[b]
            assert da == db, "operands of a binary op always share a depth"
            out = self._make(da, tuple(self._union(x, y) for x, y in zip(ca, cb)))
            self._cache[key] = out
        return out

    def _intersect(self, a: int, b: int) -> int:
        if a == Arena.EMPTY or b == Arena.EMPTY:
            return Arena.EMPTY
        if a == Arena.FULL:
            return b
        if b == Arena.FULL:
            return a
        if a == b:
            return a
        key = ("and", a, b) if a < b else ("and", b, a)
        out = self._cache.get(key)
        if out is None:
            da, ca = self._nodes[a]
            db, cb = self._nodes[b]
            assert da == db, "operands of a binary op always share a depth"
            out = self._make(da, tuple(self._intersect(x, y) for x, y in zip(ca, cb)))
            self._cache[key] = out
        return out


class EventSet:
    """Immutable handle into an arena's decision DAG.

    Equality is handle equality, which by canonical form is set
    equality. Sets from different arenas never compare equal and cannot
    be combined.
    """

    __slots__ = ("arena", "handle")

    def __init__(self, arena: Arena, handle: int):
        self.arena = arena
        self.handle = handle

    def __eq__(self, other) -> bool:
        if not isinstance(other, EventSet):
            return NotImplemented
        return self.arena is other.arena and self.handle == other.handle

    def __hash__(self) -> int:
        return hash((id(self.arena), self.handle))

    def __repr__(self) -> str:
        if self.handle == Arena.EMPTY:
            return "EventSet(EMPTY)"
        if self.handle == Arena.FULL:
            return "EventSet(FULL)"
        return f"EventSet(handle={self.handle}, depth<={self.constrained_depth()})"

    def _peer(self, other: "EventSet") -> int:
        if not isinstance(other, EventSet):
            raise TypeError(f"expected EventSet, got {type(other).__name__}")
        if other.arena is not self.arena:
            raise ArenaMismatch("operands belong to different arenas")
        return other.handle

    def is_empty(self) -> bool:
        return self.handle == Arena.EMPTY

    def is_universe(self) -> bool:
        return self.handle == Arena.FULL

    def complement(self) -> "EventSet":
        return EventSet(self.arena, self.arena._complement(self.handle))

    def union(self, other: "EventSet") -> "EventSet":
        return EventSet(self.arena, self.arena._union(self.handle, self._peer(other)))

    def intersect(self, other: "EventSet") -> "EventSet":
        return EventSet(self.arena, self.arena._intersect(self.handle, self._peer(other)))

    __invert__ = complement
    __or__ = union
    __and__ = intersect

    def constrained_depth(self) -> int:
        """Greatest coordinate index the set constrains, -1 for terminals.

        Membership of a sequence is decided by its first
        ``constrained_depth() + 1`` symbols.
        """
        arena = self.arena
        seen: set[int] = set()
        deepest = -1
        stack = [self.handle]
        while stack:
            h = stack.pop()
            if h in (Arena.EMPTY, Arena.FULL) or h in seen:
                continue
            seen.add(h)
            depth, children = arena._nodes[h]
            if depth > deepest:
                deepest = depth
            stack.extend(children)
        return deepest

    def contains_prefix(self, word: Sequence[int]) -> bool:
        """Whether every sequence starting with `word` lies in the set.

        `word` must be at least ``constrained_depth() + 1`` symbols long
        so that membership is determined.
        """
        arena = self.arena
        h = self.handle
        for symbol in word:
            if h == Arena.FULL:
                return True
            if h == Arena.EMPTY:
                return False
            h = arena._nodes[h][1][check_symbol(symbol)]
        if h == Arena.FULL:
            return True
        if h == Arena.EMPTY:
            return False
        raise ValueError(
            f"word of length {len(word)} does not determine membership; "
            f"set constrains coordinates up to {self.constrained_depth()}"
        )

    def measure(self, table: StepProbabilityTable) -> Fraction:
        """Exact probability of the set under per-coordinate symbol rows.

        EMPTY measures 0, FULL measures 1, and an internal node at
        depth n measures sum_i row_n(i) * measure(child_i). The
        recursion is memoized over shared nodes; the memo is local to
        the call, so concurrent readers never contend.
        """
        arena = self.arena
        rows = table.rows
        memo: dict[int, Fraction] = {
            Arena.EMPTY: Fraction(0),
            Arena.FULL: Fraction(1),
        }

        def rec(h: int) -> Fraction:
            got = memo.get(h)
            if got is not None:
                return got
            depth, children = arena._nodes[h]
            if depth >= len(rows):
                raise DepthExceedsTable(depth, len(rows))
            row = rows[depth]
            value = sum((row[i] * rec(c) for i, c in enumerate(children)),
                        Fraction(0))
            memo[h] = value
            return value

        return rec(self.handle)

    def to_disjoint_planes(self, depth_cap: int | None = None) -> list[PlaneWord]:
        """Decompose into pairwise disjoint prefix cylinders.

        Returns the FULL-paths of the DAG in lexicographic order; they
        are prefix-free and their union is the set. The universe has no
        finite-word path, so it requires an explicit `depth_cap` k and
        expands to all 7**k words of length k.
        """
        if self.handle == Arena.EMPTY:
            return []
        if self.handle == Arena.FULL:
            if depth_cap is None:
                raise ValueError(
                    "the universe has no canonical plane decomposition; "
                    "pass depth_cap"
                )
            if depth_cap < 1:
                raise ValueError("depth_cap must be >= 1")
            return list(product(range(N_SYMBOLS), repeat=depth_cap))

        arena = self.arena
        out: list[PlaneWord] = []

        def walk(h: int, prefix: list[int]) -> None:
            if h == Arena.EMPTY:
                return
            if h == Arena.FULL:
                out.append(tuple(prefix))
                return
            for i, child in enumerate(arena._nodes[h][1]):
                prefix.append(i)
                walk(child, prefix)
                prefix.pop()

        walk(self.handle, [])
        return out
