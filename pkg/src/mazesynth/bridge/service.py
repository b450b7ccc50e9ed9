"""The lab service: command topics in, result topics out.

One LabService owns the world state (labyrinth, robots, injected obstacles)
and reacts to command envelopes; everything it knows leaves through the bus as
result envelopes, so any transport that can carry envelopes can drive it.
State changes are serialized by a single reentrant lock — the "ordered command
queue" — and robot execution may run inline (deterministic, for tests and
stdio) or on a background thread (so obstacles can be injected mid-run).
"""

from __future__ import annotations

import json
import threading
from typing import Callable, Optional

from ..inhab import UnknownCombinator, events_to_json, explain_cover
from ..maze import (
    LabyrinthError,
    MaxLength,
    NoImmediateReversal,
    SimplePath,
    Solution,
    encode,
    labyrinth_from_payload,
    synthesize,
)
from ..typesys import TypeSyntaxError, parse_type
from .frames import frame_to_payload, render_frame
from .schemas import Envelope, ProtocolError, envelope_to_json, validate_payload
from .sim import (
    LOGICAL_CLOCK,
    Clock,
    SimState,
    WallClock,
    execute_plan,
    plan_from_moves,
)


class InProcessBus:
    """Synchronous fan-out: publish delivers to every subscriber, in order.

    Nested publishes (a handler publishing while handling) are delivered
    depth-first, which is what makes scripted transcripts deterministic.
    """

    def __init__(self):
        self._handlers: list[Callable[[Envelope], None]] = []

    def subscribe(self, handler: Callable[[Envelope], None]) -> Callable[[], None]:
        self._handlers.append(handler)

        def unsubscribe():
            self._handlers.remove(handler)

        return unsubscribe

    def publish(self, env: Envelope) -> None:
        for handler in list(self._handlers):
            handler(env)


def _parse_constraints(raw: list):
    out = []
    for item in raw:
        if item == "simplePath":
            out.append(SimplePath())
        elif item == "noImmediateReversal":
            out.append(NoImmediateReversal())
        else:
            out.append(MaxLength(item["maxLength"]))
    return out


def solution_payload(request_id: str, index: int, sol: Solution) -> dict:
    return {
        "id": request_id,
        "index": index,
        "term": str(sol.term),
        "moves": [m.key for m in sol.plan.moves],
        "cells": [list(c) for c in sol.plan.cells],
    }


class LabService:
    COMMAND_TOPICS = frozenset(
        {
            "lab/maze/set",
            "lab/synth/request",
            "lab/synth/explain",
            "lab/robot/execute",
            "lab/world/obstacle",
        }
    )

    def __init__(
        self,
        bus: InProcessBus,
        clock: Clock = LOGICAL_CLOCK,
        threaded_execution: bool = False,
    ):
        self.bus = bus
        self.clock = clock
        self.threaded_execution = threaded_execution
        self.state: Optional[SimState] = None
        self._lock = threading.RLock()
        self._unsubscribe = bus.subscribe(self.handle)

    def close(self) -> None:
        self._unsubscribe()

    # -- plumbing -------------------------------------------------------------

    def publish(self, topic: str, payload: dict) -> None:
        self.bus.publish(Envelope(topic, payload))

    def error(self, reason: str) -> None:
        self.publish("lab/error", {"reason": reason})

    def handle(self, env: Envelope) -> None:
        """React to command topics; result topics pass by unanswered."""
        if env.topic not in self.COMMAND_TOPICS:
            return
        try:
            validate_payload(env.topic, env.payload)
        except ProtocolError as e:
            self.error(str(e))
            return
        with self._lock:
            try:
                if env.topic == "lab/maze/set":
                    self._on_maze_set(env.payload)
                elif env.topic == "lab/synth/request":
                    self._on_synth_request(env.payload)
                elif env.topic == "lab/synth/explain":
                    self._on_synth_explain(env.payload)
                elif env.topic == "lab/robot/execute":
                    self._on_robot_execute(env.payload)
                else:
                    self._on_world_obstacle(env.payload)
            except (LabyrinthError, TypeSyntaxError, UnknownCombinator, ValueError) as e:
                self.error(str(e))

    def _publish_frame(self, state: SimState) -> None:
        self.publish("lab/laser/frame", frame_to_payload(render_frame(state)))

    def _require_state(self) -> SimState:
        if self.state is None:
            raise ValueError("no labyrinth loaded")
        return self.state

    # -- command handlers -----------------------------------------------------

    def _on_maze_set(self, payload: dict) -> None:
        lab = labyrinth_from_payload(payload)
        self.state = SimState.for_labyrinth(lab)
        self._publish_frame(self.state)

    def _on_synth_request(self, payload: dict) -> None:
        state = self._require_state()
        result = synthesize(
            state.labyrinth,
            max_solutions=payload["maxSolutions"],
            max_depth=payload.get("maxDepth"),
            constraints=_parse_constraints(payload["constraints"]),
        )
        rid = payload["id"]
        for i, sol in enumerate(result.solutions):
            self.publish("lab/synth/solution", solution_payload(rid, i, sol))
        for kind, detail in result.warnings():
            self.publish(
                "lab/synth/warning", {"id": rid, "kind": kind, "detail": detail}
            )
        if payload.get("includeEvents"):
            self.publish(
                "lab/synth/events",
                {"id": rid, "events": json.loads(events_to_json(result.events))},
            )
        self.publish(
            "lab/synth/done",
            {
                "id": rid,
                "count": len(result.solutions),
                "exhaustive": result.exhaustive,
            },
        )

    def _on_synth_explain(self, payload: dict) -> None:
        state = self._require_state()
        repo, _ = encode(state.labyrinth)
        trace = explain_cover(
            repo, payload["combinator"], parse_type(payload["target"])
        )
        self.publish(
            "lab/synth/trace",
            {
                "id": payload["id"],
                "combinator": payload["combinator"],
                "target": payload["target"],
                "trace": trace.to_dict(),
            },
        )

    def _on_robot_execute(self, payload: dict) -> None:
        state = self._require_state()
        robot = payload["robot"]
        if robot not in state.robots:
            raise ValueError(f"unknown robot {robot!r}")
        rstate = state.robots[robot]
        if rstate.pending:
            raise ValueError(f"robot {robot!r} is already executing a plan")
        plan = plan_from_moves(rstate.cell, payload["moves"])
        stream = execute_plan(state, robot, plan, payload["tickMs"])
        if self.threaded_execution:
            threading.Thread(
                target=self._drive,
                args=(stream, state, payload["tickMs"]),
                daemon=True,
            ).start()
        else:
            self._drive(stream, state, payload["tickMs"])

    def _on_world_obstacle(self, payload: dict) -> None:
        state = self._require_state()
        state.set_obstacle(tuple(payload["cell"]), payload["blocked"])
        self._publish_frame(state)

    def _drive(self, stream, state: SimState, tick_ms: int) -> None:
        """Pull execution envelopes, one tick at a time.

        The tick wait happens outside the lock so obstacle injections can land
        between steps; a maze/set mid-run orphans `state` and ends the drive.
        """
        while True:
            self.clock.sleep(tick_ms / 1000.0)
            with self._lock:
                if state is not self.state:
                    return
                env = next(stream, None)
                frame = None
                if env is not None and env.topic == "lab/robot/position":
                    frame = render_frame(state)
            if env is None:
                return
            self.bus.publish(env)
            if frame is not None:
                self.publish("lab/laser/frame", frame_to_payload(frame))


def scripted_transcript(
    script: list[Envelope], clock: Clock = LOGICAL_CLOCK
) -> str:
    """All bus traffic for a scripted session, one canonical JSON line each.

    With the logical clock this is fully deterministic, byte for byte —
    commands appear in script order, each directly followed by whatever the
    service published while handling it.
    """
    bus = InProcessBus()
    recorded: list[Envelope] = []
    bus.subscribe(recorded.append)
    service = LabService(bus, clock=clock)
    try:
        for env in script:
            bus.publish(env)
    finally:
        service.close()
    return "".join(envelope_to_json(e) + "\n" for e in recorded)


__all__ = [
    "InProcessBus",
    "LabService",
    "WallClock",
    "scripted_transcript",
    "solution_payload",
]
