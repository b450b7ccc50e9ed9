"""Pub/sub bridge: wire schemas, virtual robots, laser frames, transports."""

from .frames import (
    Frame,
    Polyline,
    frame_from_payload,
    frame_to_payload,
    frame_to_svg,
    render_frame,
    svg_to_polylines,
)
from .schemas import (
    TOPIC_PATTERN,
    TOPIC_SCHEMAS,
    Envelope,
    ProtocolError,
    canonical_json,
    envelope_from_json,
    envelope_to_json,
    validate_payload,
)
from .service import InProcessBus, LabService, scripted_transcript, solution_payload
from .sim import (
    LOGICAL_CLOCK,
    Clock,
    LogicalClock,
    RobotState,
    SimState,
    WallClock,
    execute_plan,
    plan_from_moves,
)
from .transport import (
    DEFAULT_TCP_PORT,
    DEFAULT_WS_PORT,
    WS_PATH,
    serve_stdio,
    serve_tcp,
    serve_websocket,
)

__all__ = [
    "DEFAULT_TCP_PORT",
    "DEFAULT_WS_PORT",
    "Envelope",
    "Frame",
    "InProcessBus",
    "LOGICAL_CLOCK",
    "Clock",
    "LogicalClock",
    "LabService",
    "Polyline",
    "ProtocolError",
    "RobotState",
    "SimState",
    "TOPIC_PATTERN",
    "TOPIC_SCHEMAS",
    "WS_PATH",
    "WallClock",
    "canonical_json",
    "envelope_from_json",
    "envelope_to_json",
    "execute_plan",
    "frame_from_payload",
    "frame_to_payload",
    "frame_to_svg",
    "plan_from_moves",
    "render_frame",
    "scripted_transcript",
    "serve_stdio",
    "serve_tcp",
    "serve_websocket",
    "solution_payload",
    "svg_to_polylines",
    "validate_payload",
]
