"""Grid labyrinths: the domain encoded into combinator repositories.

A labyrinth is a rectangular grid with blocked cells, a start and a goal.
``encode`` turns it into a repository whose types enumerate every valid
one-step move, so inhabitants of ``MovementPlan & Pos(goal)`` are exactly the
walks from start to goal; ``decode`` reads an inhabitant back as a movement
plan.  The brute-force oracles here are intentionally independent of the
inhabitation machinery and exist to cross-check it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Optional, Sequence, Union

from .inhab import (
    Diagnostics,
    GrammarEvent,
    Repository,
    Term,
    TreeGrammar,
    build_grammar,
    enumerate_terms,
)
from .typesys import Arrow, Constructor, Type, intersect

Cell = tuple[int, int]


class LabyrinthError(ValueError):
    """Invalid labyrinth definition or serialization."""


class IllFormedTerm(ValueError):
    """Term does not have the start-then-moves shape of this repository."""


class InvalidStep(ValueError):
    """A decoded move leaves the grid or enters a blocked cell."""


class Move(Enum):
    UP = (-1, 0)
    DOWN = (1, 0)
    LEFT = (0, -1)
    RIGHT = (0, 1)

    @property
    def delta(self) -> Cell:
        return self.value

    @property
    def key(self) -> str:
        """Combinator and wire name of the move."""
        return self.name.lower()

    @property
    def inverse(self) -> "Move":
        dr, dc = self.value
        return Move((-dr, -dc))


MOVES = (Move.UP, Move.DOWN, Move.LEFT, Move.RIGHT)
MOVE_BY_KEY = {m.key: m for m in MOVES}

MOVEMENT_PLAN = Constructor("MovementPlan")


def pos(cell: Cell) -> Constructor:
    return Constructor("Pos", tuple(cell))


@dataclass(frozen=True)
class Labyrinth:
    rows: int
    cols: int
    blocked: frozenset[Cell]
    start: Cell
    goal: Cell

    def __post_init__(self):
        object.__setattr__(self, "blocked", frozenset(tuple(c) for c in self.blocked))
        object.__setattr__(self, "start", tuple(self.start))
        object.__setattr__(self, "goal", tuple(self.goal))
        if self.rows < 1 or self.cols < 1:
            raise LabyrinthError("labyrinth must have at least one row and column")
        if self.rows * self.cols > 10000:
            raise LabyrinthError("labyrinth exceeds the 10000-cell sanity bound")
        for cell in self.blocked:
            if not self.in_bounds(cell):
                raise LabyrinthError(f"blocked cell {cell} out of bounds")
        for label, cell in (("start", self.start), ("goal", self.goal)):
            if not self.in_bounds(cell):
                raise LabyrinthError(f"{label} {cell} out of bounds")
            if cell in self.blocked:
                raise LabyrinthError(f"{label} {cell} is blocked")

    def in_bounds(self, cell: Cell) -> bool:
        r, c = cell
        return 0 <= r < self.rows and 0 <= c < self.cols

    def is_free(self, cell: Cell) -> bool:
        return self.in_bounds(cell) and cell not in self.blocked

    def free_cells(self) -> list[Cell]:
        """Free cells in row-major order."""
        return [
            (r, c)
            for r in range(self.rows)
            for c in range(self.cols)
            if (r, c) not in self.blocked
        ]


@dataclass(frozen=True)
class MovementPlan:
    moves: tuple[Move, ...]
    cells: tuple[Cell, ...]

    def __post_init__(self):
        if len(self.cells) != len(self.moves) + 1:
            raise ValueError("plan must have one more cell than moves")

    @property
    def end(self) -> Cell:
        return self.cells[-1]

    def __str__(self) -> str:
        route = "->".join(f"({r},{c})" for r, c in self.cells)
        if not self.moves:
            return route
        return f"{';'.join(m.key for m in self.moves)}  {route}"


# --- structural constraints ---------------------------------------------------


@dataclass(frozen=True)
class SimplePath:
    """Accepts plans whose cells are pairwise distinct."""


@dataclass(frozen=True)
class NoImmediateReversal:
    """Rejects plans containing a move directly followed by its inverse."""


@dataclass(frozen=True)
class MaxLength:
    limit: int

    def __post_init__(self):
        if self.limit < 1:
            raise ValueError("MaxLength limit must be positive")


Constraint = Union[SimplePath, NoImmediateReversal, MaxLength]


def _constraint_accepts(c: Constraint, p: MovementPlan) -> bool:
    if isinstance(c, SimplePath):
        return len(set(p.cells)) == len(p.cells)
    if isinstance(c, NoImmediateReversal):
        return all(b != a.inverse for a, b in zip(p.moves, p.moves[1:]))
    return len(p.moves) <= c.limit


def accepts(constraints: Iterable[Constraint], plan: MovementPlan) -> bool:
    return all(_constraint_accepts(c, plan) for c in constraints)


# --- encoding and decoding -----------------------------------------------------


def encode(lab: Labyrinth) -> tuple[Repository, Type]:
    """Repository of one-step moves plus `start`, and the goal type.

    Each direction combinator gets ``(MP -> MP) & Pos(a) -> Pos(a + delta)``
    for every pair of free cells one step apart; directions with no valid
    step keep only ``MP -> MP`` (and will be reported as unused).
    """
    mp_arrow = Arrow(MOVEMENT_PLAN, MOVEMENT_PLAN)
    entries: dict[str, Type] = {
        "start": intersect([MOVEMENT_PLAN, pos(lab.start)])
    }
    for move in MOVES:
        dr, dc = move.delta
        arrows = [
            Arrow(pos((r, c)), pos((r + dr, c + dc)))
            for r, c in lab.free_cells()
            if lab.is_free((r + dr, c + dc))
        ]
        entries[move.key] = intersect([mp_arrow, *arrows])
    return Repository(entries), intersect([MOVEMENT_PLAN, pos(lab.goal)])


def decode(term: Term, lab: Labyrinth) -> MovementPlan:
    """Interpret a term as a movement plan, innermost node first.

    Raises IllFormedTerm for structural violations and InvalidStep when a
    move is impossible in `lab` (a specification error, never repaired).
    """
    chain: list[str] = []
    node = term
    while True:
        name = node.combinator
        if name == "start":
            if node.args:
                raise IllFormedTerm("start takes no arguments")
            break
        if name not in MOVE_BY_KEY:
            raise IllFormedTerm(f"unknown combinator {name!r}")
        if len(node.args) != 1:
            raise IllFormedTerm(f"{name} takes exactly one argument")
        chain.append(name)
        node = node.args[0]

    moves: list[Move] = []
    cells: list[Cell] = [lab.start]
    for name in reversed(chain):
        move = MOVE_BY_KEY[name]
        r, c = cells[-1]
        dr, dc = move.delta
        nxt = (r + dr, c + dc)
        if not lab.in_bounds(nxt):
            raise InvalidStep(f"{name} from {cells[-1]} leaves the grid")
        if nxt in lab.blocked:
            raise InvalidStep(f"{name} from {cells[-1]} enters blocked cell {nxt}")
        moves.append(move)
        cells.append(nxt)
    return MovementPlan(tuple(moves), tuple(cells))


def plan_to_term(plan: MovementPlan) -> Term:
    term = Term("start")
    for move in plan.moves:
        term = Term(move.key, (term,))
    return term


# --- brute-force oracles --------------------------------------------------------


def oracle_walks(lab: Labyrinth, max_len: int) -> dict[int, int]:
    """Count start-to-goal walks per length via dynamic programming.

    Lengths with zero walks are omitted.
    """
    counts: dict[Cell, int] = {lab.start: 1}
    result: dict[int, int] = {}
    if lab.start == lab.goal and max_len >= 0:
        result[0] = 1
    for length in range(1, max_len + 1):
        nxt: dict[Cell, int] = {}
        for (r, c), n in counts.items():
            for move in MOVES:
                dr, dc = move.delta
                cell = (r + dr, c + dc)
                if lab.is_free(cell):
                    nxt[cell] = nxt.get(cell, 0) + n
        counts = nxt
        if counts.get(lab.goal):
            result[length] = counts[lab.goal]
    return result


def oracle_simple_paths(lab: Labyrinth) -> list[MovementPlan]:
    """All cell-disjoint start-to-goal routes, by exhaustive DFS.

    Deterministic: branches are explored in the order up, down, left, right.
    """
    if lab.start == lab.goal:
        return [MovementPlan((), (lab.start,))]
    plans: list[MovementPlan] = []
    cells: list[Cell] = [lab.start]
    moves: list[Move] = []
    visited = {lab.start}
    iters = [iter(MOVES)]
    while iters:
        move = next(iters[-1], None)
        if move is None:
            iters.pop()
            if moves:
                visited.discard(cells.pop())
                moves.pop()
            continue
        r, c = cells[-1]
        dr, dc = move.delta
        nxt = (r + dr, c + dc)
        if not lab.is_free(nxt) or nxt in visited:
            continue
        if nxt == lab.goal:
            plans.append(MovementPlan(tuple(moves) + (move,), tuple(cells) + (nxt,)))
            continue
        visited.add(nxt)
        cells.append(nxt)
        moves.append(move)
        iters.append(iter(MOVES))
    return plans


# --- serialization ---------------------------------------------------------------

_ASCII_CHARS = {".", "#", "S", "G"}


def parse_labyrinth(text: str, format: str = "ascii") -> Labyrinth:
    if format == "ascii":
        return _parse_ascii(text)
    if format == "json":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as e:
            raise LabyrinthError(f"malformed JSON: {e}") from None
        return labyrinth_from_payload(payload)
    raise LabyrinthError(f"unknown labyrinth format {format!r}")


def _parse_ascii(text: str) -> Labyrinth:
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise LabyrinthError("empty labyrinth")
    width = len(lines[0])
    blocked = set()
    start: Optional[Cell] = None
    goal: Optional[Cell] = None
    for r, line in enumerate(lines):
        if len(line) != width:
            raise LabyrinthError(f"ragged line {r}: expected width {width}, got {len(line)}")
        for c, ch in enumerate(line):
            if ch not in _ASCII_CHARS:
                raise LabyrinthError(f"invalid character {ch!r} at ({r},{c})")
            if ch == "#":
                blocked.add((r, c))
            elif ch == "S":
                if start is not None:
                    raise LabyrinthError("more than one start cell")
                start = (r, c)
            elif ch == "G":
                if goal is not None:
                    raise LabyrinthError("more than one goal cell")
                goal = (r, c)
    if start is None:
        raise LabyrinthError("missing start cell (S)")
    if goal is None:
        raise LabyrinthError("missing goal cell (G)")
    return Labyrinth(len(lines), width, frozenset(blocked), start, goal)


def labyrinth_to_ascii(lab: Labyrinth) -> str:
    grid = [["." for _ in range(lab.cols)] for _ in range(lab.rows)]
    for r, c in lab.blocked:
        grid[r][c] = "#"
    grid[lab.start[0]][lab.start[1]] = "S"
    grid[lab.goal[0]][lab.goal[1]] = "G"
    return "\n".join("".join(row) for row in grid)


def labyrinth_from_payload(payload: dict) -> Labyrinth:
    """Build a labyrinth from the wire schema shared with the bridge."""
    if not isinstance(payload, dict):
        raise LabyrinthError("labyrinth payload must be an object")
    try:
        rows = payload["rows"]
        cols = payload["cols"]
        blocked = [tuple(c) for c in payload["blocked"]]
        start = tuple(payload["start"])
        goal = tuple(payload["goal"])
    except (KeyError, TypeError) as e:
        raise LabyrinthError(f"malformed labyrinth payload: {e}") from None
    if not all(isinstance(v, int) for v in (rows, cols)):
        raise LabyrinthError("rows and cols must be integers")
    for cell in [start, goal, *blocked]:
        if len(cell) != 2 or not all(isinstance(v, int) for v in cell):
            raise LabyrinthError(f"malformed cell {cell!r}")
    return Labyrinth(rows, cols, frozenset(blocked), start, goal)


def labyrinth_to_payload(lab: Labyrinth) -> dict:
    return {
        "rows": lab.rows,
        "cols": lab.cols,
        "blocked": [list(c) for c in sorted(lab.blocked)],
        "start": list(lab.start),
        "goal": list(lab.goal),
    }


# --- synthesis driver -------------------------------------------------------------


@dataclass
class Solution:
    term: Term
    plan: MovementPlan


@dataclass
class SynthesisResult:
    labyrinth: Labyrinth
    repository: Repository
    goal: Type
    grammar: TreeGrammar
    events: list[GrammarEvent]
    diagnostics: Diagnostics
    solutions: list[Solution]
    exhaustive: bool

    def warnings(self) -> list[tuple[str, str]]:
        """(kind, detail) pairs mirroring the diagnostics, deterministically ordered."""
        from .typesys import pretty, sort_key

        out = [("unusedCombinator", name)
               for name in sorted(self.diagnostics.unused_combinators)]
        out.extend(
            ("uninhabited", pretty(t))
            for t in sorted(self.diagnostics.uninhabited_targets, key=sort_key)
        )
        return out


def _fast_pruner(lab: Labyrinth, constraints: Sequence[Constraint]) -> Callable[[Term], bool]:
    """Constraint check specialized for grammar-produced terms.

    Equivalent to ``accepts(constraints, decode(term, lab))`` for any term the
    maze grammar can derive.  Relies on the enumeration contract that a
    candidate's argument subterm was itself accepted earlier: per-term walk
    state (move count, end cell, visited-cell bitmask) is kept in a side
    table keyed by subterm identity, so each check is O(1) instead of
    re-walking the chain.
    """
    simple = any(isinstance(c, SimplePath) for c in constraints)
    no_rev = any(isinstance(c, NoImmediateReversal) for c in constraints)
    limits = [c.limit for c in constraints if isinstance(c, MaxLength)]
    limit = min(limits) if limits else None
    deltas = {m.key: m.delta for m in MOVES}
    inverse_of = {m.key: m.inverse.key for m in MOVES}
    cols = lab.cols
    start = lab.start
    # state: (moves so far, end row, end col, bitmask of visited cells)
    state: dict[int, tuple[int, int, int, int]] = {}

    def check(term: Term) -> bool:
        if not term.args:
            state[id(term)] = (0, start[0], start[1], 1 << (start[0] * cols + start[1]))
            return True
        sub = term.args[0]
        moves, r, c, mask = state[id(sub)]
        if limit is not None and moves >= limit:
            return False
        if no_rev and inverse_of.get(sub.combinator) == term.combinator:
            return False
        dr, dc = deltas[term.combinator]
        r += dr
        c += dc
        bit = 1 << (r * cols + c)
        if simple and mask & bit:
            return False
        state[id(term)] = (moves + 1, r, c, mask | bit)
        return True

    return check


def default_max_depth(lab: Labyrinth, constraints: Sequence[Constraint]) -> Optional[int]:
    """Depth bound implied by the constraints, or None when unbounded.

    A simple path cannot revisit a cell, so the free-cell count bounds it;
    an explicit MaxLength bounds the move count directly.
    """
    bounds = [c.limit for c in constraints if isinstance(c, MaxLength)]
    if any(isinstance(c, SimplePath) for c in constraints):
        bounds.append(len(lab.free_cells()))
    return min(bounds) if bounds else None


def synthesize(
    lab: Labyrinth,
    max_solutions: int,
    max_depth: Optional[int] = None,
    constraints: Sequence[Constraint] = (),
) -> SynthesisResult:
    """Encode, build the grammar, and enumerate constraint-satisfying plans.

    All constraints are closed under plan prefixes, so they double as the
    enumeration's subterm pruner; without a bounding constraint, max_depth is
    required (the grammar may be infinite).
    """
    if max_solutions < 1:
        raise ValueError("max_solutions must be positive")
    if max_depth is None:
        max_depth = default_max_depth(lab, constraints)
        if max_depth is None:
            raise ValueError(
                "max_depth is required unless a simplePath or maxLength constraint bounds the search"
            )
    repo, goal = encode(lab)
    grammar, events, diagnostics = build_grammar(repo, goal)

    solutions: list[Solution] = []
    exhaustive = True
    if diagnostics.goal_inhabited:
        prune = _fast_pruner(lab, constraints) if constraints else None
        terms = list(
            enumerate_terms(grammar, max_depth, max_solutions + 1, prune=prune)
        )
        exhaustive = len(terms) <= max_solutions
        solutions = [Solution(t, decode(t, lab)) for t in terms[:max_solutions]]
    return SynthesisResult(
        labyrinth=lab,
        repository=repo,
        goal=goal,
        grammar=grammar,
        events=events,
        diagnostics=diagnostics,
        solutions=solutions,
        exhaustive=exhaustive,
    )
