"""Intersection types with integer-parameterized constructors.

The type language is deliberately small: nullary or integer-argument
constructors (``MovementPlan``, ``Pos(1,2)``), right-associative arrows,
intersections, and ``omega`` (the empty intersection).  Types are immutable
values; intersections are kept flat, duplicate-free and sorted under a fixed
total order, so structural equality is stable across construction orders.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Union


@dataclass(frozen=True)
class Constructor:
    name: str
    args: tuple[int, ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.name
        return f"{self.name}({','.join(str(a) for a in self.args)})"


@dataclass(frozen=True)
class Arrow:
    source: "Type"
    target: "Type"

    def __str__(self) -> str:
        src = f"({self.source})" if isinstance(self.source, Arrow) else str(self.source)
        return f"{src} -> {self.target}"


@dataclass(frozen=True)
class Intersection:
    members: tuple["Type", ...]  # canonical order, len >= 2, flat, no duplicates

    def __str__(self) -> str:
        parts = []
        for m in self.members:
            parts.append(f"({m})" if isinstance(m, Arrow) else str(m))
        return " & ".join(parts)


@dataclass(frozen=True)
class Top:
    def __str__(self) -> str:
        return "omega"


Type = Union[Constructor, Arrow, Intersection, Top]

TOP = Top()

_KIND = {Constructor: 0, Arrow: 1, Intersection: 2, Top: 3}


def sort_key(t: Type):
    """Total order on types: kind tag, then name/args, recursing on children."""
    if isinstance(t, Constructor):
        return (0, t.name, t.args)
    if isinstance(t, Arrow):
        return (1, sort_key(t.source), sort_key(t.target))
    if isinstance(t, Intersection):
        return (2, tuple(sort_key(m) for m in t.members))
    return (3,)


def intersect(ts: Iterable[Type]) -> Type:
    """Canonical intersection: flattened, deduplicated, sorted.

    The empty intersection is ``omega``; a singleton collapses to its member.
    """
    members: list[Type] = []
    for t in ts:
        if isinstance(t, Intersection):
            members.extend(t.members)
        elif isinstance(t, Top):
            continue
        else:
            members.append(t)
    unique = sorted(set(members), key=sort_key)
    if not unique:
        return TOP
    if len(unique) == 1:
        return unique[0]
    return Intersection(tuple(unique))


def canonicalize(t: Type) -> Type:
    """Rebuild a type so every intersection node satisfies the invariants."""
    if isinstance(t, Constructor) or isinstance(t, Top):
        return t
    if isinstance(t, Arrow):
        return Arrow(canonicalize(t.source), canonicalize(t.target))
    return intersect(canonicalize(m) for m in t.members)


@dataclass(frozen=True)
class Path:
    """A curried arrow chain ``args[0] -> ... -> args[k-1] -> head``."""

    args: tuple[Type, ...]
    head: Constructor

    @property
    def arity(self) -> int:
        return len(self.args)

    def to_type(self) -> Type:
        return reduce(lambda acc, s: Arrow(s, acc), reversed(self.args), self.head)

    def __str__(self) -> str:
        return str(self.to_type())


PathSet = frozenset  # of Path


def path_sort_key(p: Path):
    return (len(p.args), tuple(sort_key(a) for a in p.args), sort_key(p.head))


def organize(t: Type) -> frozenset[Path]:
    """Split a type into the set of paths whose intersection it denotes.

    Arrows distribute over intersection targets; ``omega`` (and arrows into
    it) contribute no paths.
    """
    if isinstance(t, Constructor):
        return frozenset([Path((), t)])
    if isinstance(t, Top):
        return frozenset()
    if isinstance(t, Arrow):
        return frozenset(Path((t.source,) + p.args, p.head) for p in organize(t.target))
    return frozenset().union(*(organize(m) for m in t.members))


def path_le(p: Path, q: Path) -> bool:
    """Path subtyping: same arity, equal heads, contravariant arguments."""
    if p.arity != q.arity or p.head != q.head:
        return False
    return all(subtype(qa, pa) for pa, qa in zip(p.args, q.args))


def subtype(a: Type, b: Type) -> bool:
    """Decide ``a <= b``.

    Constructors are nominal and invariant in their integer arguments; every
    path demanded by ``b`` must be matched by some path of ``a``.
    """
    return all(any(path_le(p, q) for p in organize(a)) for q in organize(b))


def equivalent(a: Type, b: Type) -> bool:
    return subtype(a, b) and subtype(b, a)


def canonical_form(t: Type) -> Type:
    """Hereditary normal form: equal forms iff mutual subtypes.

    Organizes the type at every level and drops paths subsumed by another
    path, so semantically equal types (e.g. ``A -> B & C`` versus
    ``(A -> B) & (A -> C)``) rebuild to the identical value.
    """
    paths = {
        Path(tuple(canonical_form(a) for a in p.args), p.head) for p in organize(t)
    }
    kept = [p for p in paths if not any(path_le(q, p) for q in paths if q != p)]
    return intersect(p.to_type() for p in sorted(kept, key=path_sort_key))


class TypeSyntaxError(ValueError):
    """Raised on malformed type syntax; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<arrow>->)|(?P<amp>&)|(?P<lpar>\()|(?P<rpar>\))|(?P<comma>,)"
    r"|(?P<int>-?\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.lastgroup is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            raise TypeSyntaxError(f"unexpected character {stripped[0]!r}", len(text) - len(stripped))
        tokens.append((m.lastgroup, m.group(m.lastgroup), m.start(m.lastgroup)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def next(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str) -> tuple[str, str, int]:
        tok = self.next()
        if tok[0] != kind:
            raise TypeSyntaxError(f"expected {kind}, found {tok[1] or 'end of input'!r}", tok[2])
        return tok

    # type := inter ('->' type)?     right-associative
    def parse_type(self) -> Type:
        left = self.parse_inter()
        if self.peek()[0] == "arrow":
            self.next()
            return Arrow(left, self.parse_type())
        return left

    # inter := atom ('&' atom)*      binds tighter than '->'
    def parse_inter(self) -> Type:
        members = [self.parse_atom()]
        while self.peek()[0] == "amp":
            self.next()
            members.append(self.parse_atom())
        if len(members) == 1:
            return members[0]
        return intersect(members)

    def parse_atom(self) -> Type:
        kind, value, pos = self.next()
        if kind == "lpar":
            inner = self.parse_type()
            self.expect("rpar")
            return inner
        if kind == "ident":
            if value == "omega":
                return TOP
            if self.peek()[0] == "lpar":
                self.next()
                args = [self._int_arg()]
                while self.peek()[0] == "comma":
                    self.next()
                    args.append(self._int_arg())
                self.expect("rpar")
                return Constructor(value, tuple(args))
            return Constructor(value)
        raise TypeSyntaxError(f"expected a type, found {value or 'end of input'!r}", pos)

    def _int_arg(self) -> int:
        kind, value, pos = self.next()
        if kind != "int":
            raise TypeSyntaxError(f"constructor arguments must be integers, found {value!r}", pos)
        return int(value)


def parse_type(text: str) -> Type:
    """Parse the textual syntax ``T := atom | atom(int,..) | T -> T | T & T | omega``."""
    parser = _Parser(text)
    t = parser.parse_type()
    parser.expect("end")
    return canonicalize(t)


def pretty(t: Type) -> str:
    """Minimal-parenthesis rendering; inverse of :func:`parse_type` on canonical types."""
    return str(t)
