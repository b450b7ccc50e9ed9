"""Tick-based virtual robot simulator with two kinds of failure.

The simulator distinguishes the world from the specification: the labyrinth a
plan was synthesized against is immutable, while obstacles may be injected
into the live world afterwards.  A step that was never legal in the
synthesis-time labyrinth halts the robot with cause ``specError``; a step that
was legal then but runs into an injected obstacle halts with ``worldFailure``.
The specification check comes first, so a bad plan is never excused by a
conveniently changed world.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterator, Protocol

from ..maze import MOVE_BY_KEY, Cell, Labyrinth, Move, MovementPlan
from .schemas import Envelope


class Clock(Protocol):
    def sleep(self, seconds: float) -> None: ...


class LogicalClock:
    """Collapses waiting; scripted runs are instant and deterministic."""

    def sleep(self, seconds: float) -> None:
        pass


class WallClock:
    def sleep(self, seconds: float) -> None:
        if seconds > 0:
            time.sleep(seconds)


LOGICAL_CLOCK = LogicalClock()


@dataclass
class RobotState:
    cell: Cell
    pending: tuple[Move, ...] = ()
    tick_ms: int = 0


@dataclass
class SimState:
    """Live world state: synthesis-time labyrinth plus injected obstacles.

    ``labyrinth`` never changes after maze/set; ``blocked_now`` starts as its
    blocked set and tracks obstacle injections.  ``tick`` increases by one per
    applied move, across all robots.
    """

    labyrinth: Labyrinth
    blocked_now: set[Cell] = field(default_factory=set)
    robots: dict[str, RobotState] = field(default_factory=dict)
    tick: int = 0

    @classmethod
    def for_labyrinth(cls, lab: Labyrinth) -> "SimState":
        return cls(
            labyrinth=lab,
            blocked_now=set(lab.blocked),
            robots={"r1": RobotState(cell=lab.start)},
        )

    def set_obstacle(self, cell: Cell, blocked: bool) -> None:
        cell = tuple(cell)
        if not self.labyrinth.in_bounds(cell):
            raise ValueError(f"obstacle cell {cell} out of bounds")
        if blocked and any(r.cell == cell for r in self.robots.values()):
            raise ValueError(f"cell {cell} is occupied by a robot")
        if blocked:
            self.blocked_now.add(cell)
        else:
            self.blocked_now.discard(cell)


def plan_from_moves(start: Cell, moves: list[str]) -> MovementPlan:
    """Blind delta walk: cells are computed without any validity check.

    Hand-crafted move lists may leave the grid or enter walls; deciding what
    that means is execute_plan's job, not the plan constructor's.
    """
    try:
        parsed = tuple(MOVE_BY_KEY[m] for m in moves)
    except KeyError as e:
        raise ValueError(f"unknown move {e.args[0]!r}") from None
    cells = [tuple(start)]
    for move in parsed:
        dr, dc = move.delta
        r, c = cells[-1]
        cells.append((r + dr, c + dc))
    return MovementPlan(parsed, tuple(cells))


def execute_plan(
    state: SimState,
    robot: str,
    plan: MovementPlan,
    tick_ms: int,
    clock: Clock = LOGICAL_CLOCK,
) -> Iterator[Envelope]:
    """Drive one robot along a plan, one move per tick.

    Yields a robot/position envelope per applied move and ends with exactly
    one robot/halt whose cause separates plan completion, world failures
    (obstacle injected after synthesis), and specification errors (step never
    legal in the synthesis-time labyrinth).  State is mutated as envelopes are
    pulled, so a consumer may inject obstacles between ticks.
    """
    if robot not in state.robots:
        raise ValueError(f"unknown robot {robot!r}")
    rstate = state.robots[robot]
    if plan.cells[0] != rstate.cell:
        raise ValueError(f"plan starts at {plan.cells[0]}, robot is at {rstate.cell}")
    rstate.pending = plan.moves
    rstate.tick_ms = tick_ms

    def halt(cause: str) -> Envelope:
        rstate.pending = ()
        return Envelope(
            "lab/robot/halt",
            {"robot": robot, "cause": cause, "cell": list(rstate.cell)},
        )

    for i, move in enumerate(plan.moves):
        clock.sleep(tick_ms / 1000.0)
        dr, dc = move.delta
        r, c = rstate.cell
        target = (r + dr, c + dc)
        if not state.labyrinth.is_free(target):
            yield halt("specError")
            return
        if target in state.blocked_now:
            yield halt("worldFailure")
            return
        state.tick += 1
        rstate.cell = target
        rstate.pending = plan.moves[i + 1:]
        yield Envelope(
            "lab/robot/position",
            {"robot": robot, "cell": list(target), "t": state.tick},
        )
    yield halt("planComplete")
