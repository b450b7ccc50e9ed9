"""Relativized inhabitation: which terms over a combinator repository have a goal type.

The answer is computed as a tree grammar.  Grammar keys are types, and a rule
``t <- c(a1, .., ak)`` means: applying combinator ``c`` to inhabitants of
``a1 .. ak`` yields an inhabitant of ``t``.  Rules come from *covering*: a
minimal selection of same-arity paths of ``c``'s type whose heads jointly
subsume every path of the target.  Construction is a worklist fixpoint,
followed by least-fixpoint pruning of non-productive keys; every step is
recorded as a replayable event so the build can be inspected after the fact.

Argument positions of type ``omega`` are not supported: such a key gets no
rules and prunes away as a dead end.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from itertools import product
from typing import Callable, Iterator, Mapping, Optional, Union

from .typesys import (
    TOP,
    Path,
    Type,
    canonicalize,
    intersect,
    organize,
    parse_type,
    path_sort_key,
    pretty,
    sort_key,
)


class UnknownCombinator(ValueError):
    pass


@dataclass(frozen=True)
class Term:
    combinator: str
    args: tuple["Term", ...] = ()

    def size(self) -> int:
        return 1 + sum(a.size() for a in self.args)

    def __str__(self) -> str:
        if not self.args:
            return self.combinator
        return f"{self.combinator}({', '.join(str(a) for a in self.args)})"


@dataclass(frozen=True)
class Cover:
    """A minimal same-arity path selection whose heads subsume a target."""

    arity: int
    selected_paths: frozenset[Path]
    arg_types: tuple[Type, ...]


@dataclass(frozen=True)
class Rule:
    combinator: str
    args: tuple[Type, ...]

    def __str__(self) -> str:
        return f"{self.combinator}({', '.join(pretty(a) for a in self.args)})"


def _rule_sort_key(r: Rule):
    return (r.combinator, tuple(sort_key(a) for a in r.args))


class Repository:
    """Ordered map from combinator names to their (canonical) types."""

    def __init__(self, entries: Mapping[str, Type]):
        self.entries: dict[str, Type] = {
            name: canonicalize(t) for name, t in entries.items()
        }

    def __contains__(self, name: str) -> bool:
        return name in self.entries

    def __getitem__(self, name: str) -> Type:
        try:
            return self.entries[name]
        except KeyError:
            raise UnknownCombinator(f"unknown combinator {name!r}") from None

    def __iter__(self):
        return iter(self.entries)

    def items(self):
        return self.entries.items()

    def __repr__(self) -> str:
        body = ", ".join(f"{n}: {pretty(t)}" for n, t in self.entries.items())
        return f"Repository({{{body}}})"


# --- covering ---------------------------------------------------------------


def _head_covers(p: Path, q: Path) -> bool:
    # Heads are constructors, so a head can only subsume a nullary target path.
    return q.arity == 0 and p.head == q.head


def _is_transversal(selection, candidate_sets) -> bool:
    return all(any(p in selection for p in cs) for cs in candidate_sets)


def _minimal_selections(target_paths: list[Path], candidates: list[Path]) -> list[frozenset[Path]]:
    """All minimal subsets of `candidates` whose heads cover every target path."""
    candidate_sets = [[p for p in candidates if _head_covers(p, q)] for q in target_paths]
    if any(not cs for cs in candidate_sets):
        return []
    found: set[frozenset[Path]] = set()

    def walk(i: int, chosen: list[Path]) -> None:
        if i == len(candidate_sets):
            found.add(frozenset(chosen))
            return
        if any(p in chosen for p in candidate_sets[i]):
            walk(i + 1, chosen)
            return
        for p in candidate_sets[i]:
            chosen.append(p)
            walk(i + 1, chosen)
            chosen.pop()

    walk(0, [])
    minimal = [
        s
        for s in found
        if all(not _is_transversal(s - {p}, candidate_sets) for p in s)
    ]
    return sorted(minimal, key=lambda s: tuple(sorted(path_sort_key(p) for p in s)))


def covers(sigma: Type, target: Type) -> list[Cover]:
    """All minimal covers of `target` by the paths of `sigma`, per arity.

    Deterministic: sorted by arity, then by the canonical order of the
    selected paths.  An empty list means no cover exists.
    """
    target_paths = sorted(organize(target), key=path_sort_key)
    if not target_paths:
        raise ValueError("cannot cover omega: it has no paths")
    by_arity: dict[int, list[Path]] = {}
    for p in sorted(organize(sigma), key=path_sort_key):
        by_arity.setdefault(p.arity, []).append(p)
    result = []
    for k in sorted(by_arity):
        for selection in _minimal_selections(target_paths, by_arity[k]):
            arg_types = tuple(
                intersect(p.args[i] for p in selection) for i in range(k)
            )
            result.append(Cover(k, selection, arg_types))
    return result


def _cover_failure_reason(sigma: Type, target_paths: list[Path]) -> str:
    by_arity: dict[int, list[Path]] = {}
    for p in sorted(organize(sigma), key=path_sort_key):
        by_arity.setdefault(p.arity, []).append(p)
    if not by_arity:
        return "combinator type omega has no paths"
    parts = []
    for k in sorted(by_arity):
        for q in target_paths:
            if not any(_head_covers(p, q) for p in by_arity[k]):
                parts.append(f"no path of arity {k} has head <= {q}")
                break
    return "; ".join(parts)


# --- grammar construction ----------------------------------------------------


@dataclass(frozen=True)
class TargetQueued:
    target: Type


@dataclass(frozen=True)
class RuleAdded:
    target: Type
    combinator: str
    args: tuple[Type, ...]


@dataclass(frozen=True)
class CoverFailed:
    target: Type
    combinator: str
    reason: str


@dataclass(frozen=True)
class TargetUninhabited:
    target: Type


@dataclass(frozen=True)
class Pruned:
    target: Type


GrammarEvent = Union[TargetQueued, RuleAdded, CoverFailed, TargetUninhabited, Pruned]


@dataclass
class TreeGrammar:
    """Map from types to the rules deriving them; keys all derive finite terms."""

    rules: dict[Type, tuple[Rule, ...]]
    goal: Type

    def to_text(self) -> str:
        """Canonical serialization: `TYPE <- combinator(TYPE, ..)`, one rule per line."""
        lines = []
        for t in sorted(self.rules, key=sort_key):
            for r in self.rules[t]:
                lines.append(f"{pretty(t)} <- {r}")
        return "\n".join(lines)


@dataclass(frozen=True)
class Diagnostics:
    unused_combinators: frozenset[str]
    uninhabited_targets: frozenset[Type]
    goal_inhabited: bool
    grammar_infinite: bool


def _productive_keys(rules: dict[Type, list[Rule]]) -> set[Type]:
    productive: set[Type] = set()
    changed = True
    while changed:
        changed = False
        for t, rs in rules.items():
            if t in productive:
                continue
            if any(all(a in productive for a in r.args) for r in rs):
                productive.add(t)
                changed = True
    return productive


def _reachable(rules: Mapping[Type, list[Rule]], start: Type) -> set[Type]:
    seen = {start}
    queue = deque([start])
    while queue:
        t = queue.popleft()
        for r in rules.get(t, ()):
            for a in r.args:
                if a not in seen:
                    seen.add(a)
                    queue.append(a)
    return seen


def _has_cycle(rules: Mapping[Type, tuple[Rule, ...]], start: Type) -> bool:
    WHITE, GRAY, BLACK = 0, 1, 2
    color: dict[Type, int] = {}

    def visit(t: Type) -> bool:
        color[t] = GRAY
        for r in rules.get(t, ()):
            for a in r.args:
                c = color.get(a, WHITE)
                if c == GRAY:
                    return True
                if c == WHITE and visit(a):
                    return True
        color[t] = BLACK
        return False

    return start in rules and visit(start)


def build_grammar(
    repo: Repository, goal: Type
) -> tuple[TreeGrammar, list[GrammarEvent], Diagnostics]:
    """Worklist construction of the tree grammar for ``repo |- ? : goal``.

    Every queued target is covered against every combinator; new argument
    types are queued in turn.  Non-productive keys are pruned afterwards by a
    least fixpoint, and the full history is returned as a replayable event
    list.
    """
    goal = canonicalize(goal)
    if not organize(goal):
        raise ValueError("goal must not be omega")

    rules: dict[Type, list[Rule]] = {goal: []}
    events: list[GrammarEvent] = [TargetQueued(goal)]
    queue = deque([goal])
    while queue:
        t = queue.popleft()
        if t == TOP:
            continue
        target_paths = sorted(organize(t), key=path_sort_key)
        for name, sigma in repo.items():
            found = covers(sigma, t)
            if not found:
                events.append(CoverFailed(t, name, _cover_failure_reason(sigma, target_paths)))
                continue
            for cover in found:
                rule = Rule(name, cover.arg_types)
                if rule in rules[t]:
                    continue
                rules[t].append(rule)
                events.append(RuleAdded(t, name, cover.arg_types))
                for a in cover.arg_types:
                    if a not in rules:
                        rules[a] = []
                        events.append(TargetQueued(a))
                        queue.append(a)

    productive = _productive_keys(rules)
    dead = [t for t in rules if t not in productive]
    events.extend(TargetUninhabited(t) for t in dead)
    events.extend(Pruned(t) for t in dead)

    pruned = {
        t: tuple(sorted(
            (r for r in rs if all(a in productive for a in r.args)),
            key=_rule_sort_key,
        ))
        for t, rs in rules.items()
        if t in productive
    }
    grammar = TreeGrammar(pruned, goal)

    used = {r.combinator for rs in pruned.values() for r in rs}
    reachable_unpruned = _reachable(rules, goal)
    diagnostics = Diagnostics(
        unused_combinators=frozenset(repo) - used,
        uninhabited_targets=frozenset(t for t in reachable_unpruned if t not in productive),
        goal_inhabited=goal in productive,
        grammar_infinite=_has_cycle(pruned, goal) if goal in productive else False,
    )
    return grammar, events, diagnostics


def replay_events(events: list[GrammarEvent]) -> TreeGrammar:
    """Fold an event log back into the pruned grammar it describes."""
    if not events or not isinstance(events[0], TargetQueued):
        raise ValueError("event log must start by queueing the goal")
    goal = events[0].target
    rules: dict[Type, list[Rule]] = {}
    for e in events:
        if isinstance(e, TargetQueued):
            rules.setdefault(e.target, [])
        elif isinstance(e, RuleAdded):
            rules.setdefault(e.target, []).append(Rule(e.combinator, e.args))
        elif isinstance(e, Pruned):
            rules.pop(e.target, None)
            for rs in rules.values():
                rs[:] = [r for r in rs if e.target not in r.args]
    return TreeGrammar(
        {t: tuple(sorted(rs, key=_rule_sort_key)) for t, rs in rules.items()},
        goal,
    )


_EVENT_NAMES = {
    TargetQueued: "targetQueued",
    RuleAdded: "ruleAdded",
    CoverFailed: "coverFailed",
    TargetUninhabited: "targetUninhabited",
    Pruned: "pruned",
}


def events_to_json(events: list[GrammarEvent]) -> str:
    out = []
    for i, e in enumerate(events):
        entry: dict = {"index": i, "event": _EVENT_NAMES[type(e)], "target": pretty(e.target)}
        if isinstance(e, RuleAdded):
            entry["combinator"] = e.combinator
            entry["args"] = [pretty(a) for a in e.args]
        elif isinstance(e, CoverFailed):
            entry["combinator"] = e.combinator
            entry["reason"] = e.reason
        out.append(entry)
    return json.dumps(out, indent=2)


def events_from_json(text: str) -> list[GrammarEvent]:
    events: list[GrammarEvent] = []
    for entry in json.loads(text):
        kind = entry["event"]
        target = parse_type(entry["target"])
        if kind == "targetQueued":
            events.append(TargetQueued(target))
        elif kind == "ruleAdded":
            events.append(RuleAdded(target, entry["combinator"],
                                    tuple(parse_type(a) for a in entry["args"])))
        elif kind == "coverFailed":
            events.append(CoverFailed(target, entry["combinator"], entry["reason"]))
        elif kind == "targetUninhabited":
            events.append(TargetUninhabited(target))
        elif kind == "pruned":
            events.append(Pruned(target))
        else:
            raise ValueError(f"unknown event kind {kind!r}")
    return events


# --- enumeration -------------------------------------------------------------


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Tuples of `parts` positive ints summing to `total`, lexicographic."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def count_terms(grammar: TreeGrammar, t: Type, size: int,
                _memo: Optional[dict] = None) -> int:
    """Number of derivations of `t` with exactly `size` combinator nodes."""
    memo = _memo if _memo is not None else {}
    key = (t, size)
    if key in memo:
        return memo[key]
    memo[key] = 0  # cycles cannot contribute at a fixed size
    total = 0
    for rule in grammar.rules.get(t, ()):
        k = len(rule.args)
        if k == 0:
            total += 1 if size == 1 else 0
            continue
        for split in _compositions(size - 1, k):
            prod = 1
            for a, s in zip(rule.args, split):
                prod *= count_terms(grammar, a, s, memo)
                if not prod:
                    break
            total += prod
    memo[key] = total
    return total


def enumerate_terms(
    grammar: TreeGrammar,
    max_depth: int,
    max_count: int,
    predicate: Optional[Callable[[Term], bool]] = None,
    prune: Optional[Callable[[Term], bool]] = None,
) -> Iterator[Term]:
    """Lazily yield goal inhabitants in nondecreasing size (at most ``max_depth + 1`` nodes).

    Ties break by canonical rule order.  ``predicate`` filters finished terms
    without consuming the ``max_count`` budget on rejection.  ``prune`` is an
    optional subterm filter for predicates closed under taking subterms (a
    term is discarded as soon as any subterm fails it); accepted subterms are
    cached, which keeps filtered enumeration of cyclic grammars tractable.
    Every candidate passed to ``prune`` has argument subterms that were
    themselves accepted earlier (and are kept alive until enumeration ends),
    so checkers may carry per-subterm state instead of re-walking the term.
    """
    if max_depth < 1:
        raise ValueError("max_depth must be positive")
    if max_count < 1:
        raise ValueError("max_count must be positive")

    counts: dict = {}

    def feasible(t: Type, size: int) -> bool:
        return count_terms(grammar, t, size, counts) > 0

    def lazy_terms(t: Type, size: int) -> Iterator[Term]:
        for rule in grammar.rules.get(t, ()):
            k = len(rule.args)
            if k == 0:
                if size == 1:
                    yield Term(rule.combinator)
                continue
            for split in _compositions(size - 1, k):
                if not all(feasible(a, s) for a, s in zip(rule.args, split)):
                    continue
                if k == 1:
                    for sub in lazy_terms(rule.args[0], size - 1):
                        yield Term(rule.combinator, (sub,))
                else:
                    pools = [list(lazy_terms(a, s)) for a, s in zip(rule.args, split)]
                    for combo in product(*pools):
                        yield Term(rule.combinator, combo)

    memo: dict[tuple[Type, int], tuple[Term, ...]] = {}

    def pruned_terms(t: Type, size: int) -> tuple[Term, ...]:
        key = (t, size)
        cached = memo.get(key)
        if cached is not None:
            return cached
        out: list[Term] = []
        for rule in grammar.rules.get(t, ()):
            k = len(rule.args)
            if k == 0:
                if size == 1:
                    candidate = Term(rule.combinator)
                    if prune(candidate):
                        out.append(candidate)
                continue
            for split in _compositions(size - 1, k):
                pools = [pruned_terms(a, s) for a, s in zip(rule.args, split)]
                if any(not pool for pool in pools):
                    continue
                for combo in product(*pools):
                    candidate = Term(rule.combinator, combo)
                    if prune(candidate):
                        out.append(candidate)
        result = tuple(out)
        memo[key] = result
        return result

    accepted = 0
    for size in range(1, max_depth + 2):
        if prune is None:
            stream: Iterator[Term] = lazy_terms(grammar.goal, size)
        else:
            stream = iter(pruned_terms(grammar.goal, size))
        for term in stream:
            if predicate is None or predicate(term):
                yield term
                accepted += 1
                if accepted >= max_count:
                    return


# --- covering debugger -------------------------------------------------------


@dataclass
class PathCoverage:
    """How one target path fares against the combinator paths of one arity."""

    target_path: Path
    candidates: tuple[Path, ...]
    rejected: tuple[tuple[Path, str], ...]

    @property
    def covered(self) -> bool:
        return bool(self.candidates)


@dataclass
class CoverTrace:
    combinator: str
    combinator_type: Type
    target: Type
    paths_by_arity: dict[int, tuple[Path, ...]]
    coverage: dict[int, tuple[PathCoverage, ...]]
    covers: tuple[Cover, ...]
    reasons: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return bool(self.covers)

    def render(self) -> str:
        lines = [
            f"combinator: {self.combinator} : {pretty(self.combinator_type)}",
            f"target: {pretty(self.target)}",
        ]
        for k, paths in self.paths_by_arity.items():
            lines.append(f"paths of arity {k}:")
            lines.extend(f"  {p}" for p in paths)
            for pc in self.coverage[k]:
                if pc.covered:
                    heads = ", ".join(str(c) for c in pc.candidates)
                    lines.append(f"  target path {pc.target_path}: covered by {heads}")
                else:
                    lines.append(f"  target path {pc.target_path}: uncovered")
        if self.covers:
            lines.append("minimal covers:")
            for c in self.covers:
                sel = ", ".join(str(p) for p in sorted(c.selected_paths, key=path_sort_key))
                args = ", ".join(pretty(a) for a in c.arg_types)
                lines.append(f"  arity {c.arity}: [{sel}] -> args({args})")
        else:
            lines.append("no cover found:")
            lines.extend(f"  {r}" for r in self.reasons)
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "combinator": self.combinator,
            "combinatorType": pretty(self.combinator_type),
            "target": pretty(self.target),
            "pathsByArity": {
                str(k): [str(p) for p in paths] for k, paths in self.paths_by_arity.items()
            },
            "coverage": {
                str(k): [
                    {
                        "targetPath": str(pc.target_path),
                        "candidates": [str(c) for c in pc.candidates],
                        "rejected": [
                            {"path": str(p), "reason": why} for p, why in pc.rejected
                        ],
                    }
                    for pc in pcs
                ]
                for k, pcs in self.coverage.items()
            },
            "covers": [
                {
                    "arity": c.arity,
                    "selectedPaths": [
                        str(p) for p in sorted(c.selected_paths, key=path_sort_key)
                    ],
                    "argTypes": [pretty(a) for a in c.arg_types],
                }
                for c in self.covers
            ],
            "reasons": list(self.reasons),
            "ok": self.ok,
        }


def explain_cover(repo: Repository, combinator: str, target: Type) -> CoverTrace:
    """Structured covering trace for one combinator against one target."""
    sigma = repo[combinator]
    target = canonicalize(target)
    target_paths = sorted(organize(target), key=path_sort_key)
    if not target_paths:
        raise ValueError("cannot cover omega: it has no paths")

    by_arity: dict[int, tuple[Path, ...]] = {}
    for p in sorted(organize(sigma), key=path_sort_key):
        by_arity.setdefault(p.arity, ())
        by_arity[p.arity] += (p,)

    coverage: dict[int, tuple[PathCoverage, ...]] = {}
    reasons: list[str] = []
    for k, paths in by_arity.items():
        entries = []
        for q in target_paths:
            cands = tuple(p for p in paths if _head_covers(p, q))
            rejected = tuple(
                (p, f"head {p.head} is not a subtype of {q}")
                for p in paths
                if not _head_covers(p, q)
            )
            entries.append(PathCoverage(q, cands, rejected))
            if not cands:
                reasons.append(f"no path of arity {k} has head <= {q}")
        coverage[k] = tuple(entries)
    if not by_arity:
        reasons.append("combinator type omega has no paths")

    found = tuple(covers(sigma, target))
    return CoverTrace(
        combinator=combinator,
        combinator_type=sigma,
        target=target,
        paths_by_arity=by_arity,
        coverage=coverage,
        covers=found,
        reasons=() if found else tuple(reasons),
    )
