"""Labelled plane trees and their vertical edge profiles.

A labelled plane tree is a rooted tree with an ordered list of children at
every vertex and an integer label at every vertex, such that the labels of
the two endpoints of every edge differ by at most 1.

Trees are stored flat, in preorder (depth-first, children left to right):
vertex 0 is the root, ``parents[v]`` is the preorder index of v's parent
(``None`` for the root) and ``children[v]`` is the tuple of v's children in
plane order.

The text grammar is exact and whitespace-free::

    TREE  := INT '(' CHILD* ')'
    CHILD := INC '(' CHILD* ')'
    INC   := '+' | '-' | '0'

where INT is the root label (optionally signed decimal) and each INC is the
label increment from parent to child.  Example: ``0(+(-()))`` is the path
with labels 0, 1, 0.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

from .errors import DomainError, TreeParseError

# Nested-tuple shorthand used by builders and tests: a NODE is a tuple of
# children, each child a pair (increment, NODE).
Nested = tuple


class LabelledPlaneTree:
    """Immutable labelled plane tree in preorder representation."""

    __slots__ = ("labels", "parents", "children", "_hash")

    def __init__(
        self,
        labels: Sequence[int],
        parents: Sequence[Optional[int]],
        children: Sequence[Sequence[int]],
    ):
        self.labels = tuple(labels)
        self.parents = tuple(parents)
        self.children = tuple(tuple(c) for c in children)
        self._hash = None
        self._validate()

    def _validate(self) -> None:
        n = len(self.labels)
        if n == 0:
            raise DomainError("a tree must have at least one vertex")
        if len(self.parents) != n or len(self.children) != n:
            raise DomainError("labels, parents and children must have equal length")
        if self.parents[0] is not None:
            raise DomainError("vertex 0 must be the root")
        seen_parent = [False] * n
        seen_parent[0] = True
        for v, kids in enumerate(self.children):
            for c in kids:
                if not (0 <= c < n) or self.parents[c] != v or seen_parent[c]:
                    raise DomainError("children/parents tables are inconsistent")
                seen_parent[c] = True
                if abs(self.labels[c] - self.labels[v]) > 1:
                    raise DomainError(
                        f"edge ({v},{c}) has label increment "
                        f"{self.labels[c] - self.labels[v]}"
                    )
        if not all(seen_parent):
            raise DomainError("tree is not connected")
        # Preorder check: each vertex is followed immediately by its subtree.
        order = []
        stack = [0]
        while stack:
            v = stack.pop()
            order.append(v)
            stack.extend(reversed(self.children[v]))
        if order != list(range(n)):
            raise DomainError("vertices are not in preorder")

    @classmethod
    def unchecked(cls, labels, parents, children) -> "LabelledPlaneTree":
        """Construct without validation.

        For internal producers (samplers, decomposition) whose outputs are
        correct by construction and are cross-validated in tests; the
        arrays must satisfy exactly the invariants of ``__init__``.
        """
        t = cls.__new__(cls)
        t.labels = tuple(labels)
        t.parents = tuple(parents)
        t.children = tuple(tuple(c) for c in children)
        t._hash = None
        return t

    # -- basic accessors -------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self.labels)

    @property
    def n_edges(self) -> int:
        return len(self.labels) - 1

    @property
    def root_label(self) -> int:
        return self.labels[0]

    def arity(self, v: int) -> int:
        return len(self.children[v])

    def increments(self, v: int) -> tuple:
        """Label increments from v to its children, in plane order."""
        lv = self.labels[v]
        return tuple(self.labels[c] - lv for c in self.children[v])

    def vertices(self) -> range:
        return range(len(self.labels))

    def leaves(self) -> Iterator[int]:
        return (v for v in self.vertices() if not self.children[v])

    def depth(self, v: int) -> int:
        d = 0
        while self.parents[v] is not None:
            v = self.parents[v]
            d += 1
        return d

    def __eq__(self, other) -> bool:
        if not isinstance(other, LabelledPlaneTree):
            return NotImplemented
        return (
            self.labels == other.labels
            and self.children == other.children
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.labels, self.children))
        return self._hash

    def __repr__(self) -> str:
        return f"LabelledPlaneTree({encode(self)!r})"

    # -- constructors ----------------------------------------------------

    @classmethod
    def single(cls, label: int) -> "LabelledPlaneTree":
        return cls((label,), (None,), ((),))

    @classmethod
    def from_nested(cls, root_label: int, nested: Nested) -> "LabelledPlaneTree":
        """Build from the nested-tuple shorthand (see module docstring)."""
        labels, parents, children = _preorder_from_nested(root_label, nested)
        return cls(labels, parents, children)

    def to_nested(self) -> Nested:
        def rec(v: int) -> Nested:
            lv = self.labels[v]
            return tuple(
                (self.labels[c] - lv, rec(c)) for c in self.children[v]
            )

        return rec(0)

    def relabel(self, shift: int = 0, reflect: bool = False) -> "LabelledPlaneTree":
        """Return a copy with labels mapped to ``-l + shift`` (reflect) or ``l + shift``."""
        if reflect:
            labels = tuple(-l + shift for l in self.labels)
        else:
            labels = tuple(l + shift for l in self.labels)
        return LabelledPlaneTree(labels, self.parents, self.children)

    def subtree(self, v: int) -> "LabelledPlaneTree":
        """The subtree rooted at v, as a standalone tree (labels kept)."""
        new_id = {v: 0}
        labels = [self.labels[v]]
        parents: list = [None]
        children: list = [[]]
        stack = list(reversed(self.children[v]))
        order = []
        while stack:
            u = stack.pop()
            order.append(u)
            stack.extend(reversed(self.children[u]))
        for u in order:
            new_id[u] = len(labels)
            labels.append(self.labels[u])
            parents.append(new_id[self.parents[u]])
            children.append([])
            children[new_id[self.parents[u]]].append(new_id[u])
        return LabelledPlaneTree(labels, parents, children)


def _preorder_from_nested(root_label: int, nested: Nested):
    labels = [root_label]
    parents: list = [None]
    children: list = [[]]

    def rec(v: int, kids: Nested) -> None:
        for inc, sub in kids:
            c = len(labels)
            labels.append(labels[v] + inc)
            parents.append(v)
            children.append([])
            children[v].append(c)
            rec(c, sub)

    rec(0, nested)
    return labels, parents, children


# -- text grammar ---------------------------------------------------------

_INC = {"+": 1, "-": -1, "0": 0}
_INC_CHAR = {1: "+", -1: "-", 0: "0"}


def encode(t: LabelledPlaneTree) -> str:
    """Serialize a tree in the exact text grammar."""
    parts = [str(t.root_label)]

    def rec(v: int) -> None:
        parts.append("(")
        lv = t.labels[v]
        for c in t.children[v]:
            parts.append(_INC_CHAR[t.labels[c] - lv])
            rec(c)
        parts.append(")")

    rec(0)
    return "".join(parts)


def decode(text: str) -> LabelledPlaneTree:
    """Parse a tree from the exact text grammar.

    Raises :class:`TreeParseError` with the byte offset of the first
    offending character.
    """
    i = 0
    n = len(text)
    # root label: optional sign, then digits
    j = i
    if j < n and text[j] in "+-":
        j += 1
    k = j
    while k < n and text[k].isdigit():
        k += 1
    if k == j:
        raise TreeParseError("expected integer root label", i)
    root_label = int(text[i:k])
    i = k

    labels = [root_label]
    parents: list = [None]
    children: list = [[]]

    def parse_children(v: int, i: int) -> int:
        if i >= len(text) or text[i] != "(":
            raise TreeParseError("expected '('", i)
        i += 1
        while True:
            if i >= len(text):
                raise TreeParseError("unexpected end of input, expected ')' or increment", i)
            ch = text[i]
            if ch == ")":
                return i + 1
            if ch not in _INC:
                raise TreeParseError(f"unexpected character {ch!r}", i)
            c = len(labels)
            labels.append(labels[v] + _INC[ch])
            parents.append(v)
            children.append([])
            children[v].append(c)
            i = parse_children(c, i + 1)

    i = parse_children(0, i)
    if i != n:
        raise TreeParseError("trailing data after tree", i)
    return LabelledPlaneTree(labels, parents, children)


# -- truncation and edge profile ------------------------------------------


def truncate(t: LabelledPlaneTree, level: int) -> LabelledPlaneTree:
    """Delete every vertex having a strict ancestor labelled ``level``.

    Vertices labelled ``level`` themselves are kept (as leaves).  The root
    is always kept.
    """
    labels = [t.labels[0]]
    parents: list = [None]
    children: list = [[]]

    def rec(v: int, nv: int) -> None:
        if t.labels[v] == level:
            return
        for c in t.children[v]:
            nc = len(labels)
            labels.append(t.labels[c])
            parents.append(nv)
            children.append([])
            children[nv].append(nc)
            rec(c, nc)

    rec(0, 0)
    return LabelledPlaneTree(labels, parents, children)


@dataclass(frozen=True)
class VerticalEdgeProfile:
    """Edge and vertex counts of a labelled plane tree, per level.

    For a tree rooted at label 0 every edge whose labels differ (by ±1)
    falls into exactly one of four families, indexed by a level m >= 1:

    - ``x_plus[m]``: edges from a vertex labelled m-1 down to a child
      labelled m (upward label crossings of m - 1/2, upper label >= 1);
    - ``x_minus[m]``: edges from a vertex labelled m down to a child
      labelled m-1 (downward crossings of m - 1/2, upper label >= 1);
    - ``check_plus[m]``: edges from a vertex labelled -m to a child
      labelled -m+1 (crossings of -m + 1/2 recorded on the mirrored side,
      upper label <= 0);
    - ``check_minus[m]``: edges from a vertex labelled -m+1 to a child
      labelled -m.

    ``vertical[k]`` counts vertices labelled k.  ``mass_below(m)`` counts
    edges both of whose endpoint labels are <= m-1.
    """

    x_plus: dict
    x_minus: dict
    check_plus: dict
    check_minus: dict
    vertical: dict
    n_edges: int
    _edge_max_labels: tuple = field(repr=False, default=())

    def mass_below(self, m: int) -> int:
        """Number of edges with both endpoint labels <= m - 1."""
        return bisect.bisect_right(self._edge_max_labels, m - 1)

    def state(self, m: int) -> tuple:
        """The pair (x_plus[m], x_minus[m])."""
        return (self.x_plus.get(m, 0), self.x_minus.get(m, 0))

    def check_state(self, m: int) -> tuple:
        """The pair (check_plus[m], check_minus[m])."""
        return (self.check_plus.get(m, 0), self.check_minus.get(m, 0))

    def cond_state(self, m: int) -> tuple:
        """The triple (x_plus[m], x_minus[m], mass_below(m))."""
        return (self.x_plus.get(m, 0), self.x_minus.get(m, 0), self.mass_below(m))

    @property
    def max_label(self) -> int:
        return max(self.vertical)

    @property
    def min_label(self) -> int:
        return min(self.vertical)


def edge_profile(t: LabelledPlaneTree) -> VerticalEdgeProfile:
    """Compute the vertical edge profile of a tree rooted at label 0."""
    if t.root_label != 0:
        raise DomainError("edge profile requires a tree rooted at label 0")
    x_plus: dict = {}
    x_minus: dict = {}
    check_plus: dict = {}
    check_minus: dict = {}
    vertical: dict = {}
    edge_max: list = []
    labels = t.labels
    for v in t.vertices():
        lv = labels[v]
        vertical[lv] = vertical.get(lv, 0) + 1
        p = t.parents[v]
        if p is None:
            continue
        lp = labels[p]
        edge_max.append(max(lv, lp))
        if lv == lp:
            continue
        upper = max(lv, lp)
        if upper >= 1:
            # crossing of upper - 1/2 on the positive side
            if lv > lp:
                x_plus[upper] = x_plus.get(upper, 0) + 1
            else:
                x_minus[upper] = x_minus.get(upper, 0) + 1
        else:
            # upper <= 0: crossing of -m + 1/2 with m = 1 - upper
            m = 1 - upper
            if lv < lp:
                check_minus[m] = check_minus.get(m, 0) + 1
            else:
                check_plus[m] = check_plus.get(m, 0) + 1
    edge_max.sort()
    return VerticalEdgeProfile(
        x_plus=x_plus,
        x_minus=x_minus,
        check_plus=check_plus,
        check_minus=check_minus,
        vertical=vertical,
        n_edges=t.n_edges,
        _edge_max_labels=tuple(edge_max),
    )
