"""Wire contract: topics, payload schemas, and canonical envelope JSON.

Every message on the bus is an Envelope ``{"topic": ..., "payload": ...}``.
Topics follow ``lab/<area>/<verb>`` with one deliberate exception, the
catch-all ``lab/error``.  Payloads are validated with JSON Schema both on
receipt (malformed input answers with ``lab/error``) and, in tests, on every
message the service publishes.

Serialization is canonical — sorted keys, no whitespace — so a scripted
session produces a byte-identical transcript.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Any

import jsonschema

TOPIC_PATTERN = re.compile(r"^lab/(maze|synth|robot|world|laser)/[a-z]+$|^lab/error$")

_CELL = {
    "type": "array",
    "items": {"type": "integer"},
    "minItems": 2,
    "maxItems": 2,
}
_MOVE = {"type": "string", "enum": ["up", "down", "left", "right"]}
_CONSTRAINT = {
    "oneOf": [
        {"const": "simplePath"},
        {"const": "noImmediateReversal"},
        {
            "type": "object",
            "properties": {"maxLength": {"type": "integer", "minimum": 1}},
            "required": ["maxLength"],
            "additionalProperties": False,
        },
    ]
}
_POLYLINE = {
    "type": "object",
    "properties": {
        "color": {"type": "string", "pattern": "^#[0-9A-F]{6}$"},
        "points": {
            "type": "array",
            "items": {
                "type": "array",
                "items": {"type": "number"},
                "minItems": 2,
                "maxItems": 2,
            },
        },
    },
    "required": ["color", "points"],
    "additionalProperties": False,
}

TOPIC_SCHEMAS: dict[str, dict] = {
    "lab/maze/set": {
        "type": "object",
        "properties": {
            "rows": {"type": "integer", "minimum": 1},
            "cols": {"type": "integer", "minimum": 1},
            "blocked": {"type": "array", "items": _CELL},
            "start": _CELL,
            "goal": _CELL,
        },
        "required": ["rows", "cols", "blocked", "start", "goal"],
        "additionalProperties": False,
    },
    "lab/synth/request": {
        "type": "object",
        "properties": {
            "id": {"type": "string"},
            "maxSolutions": {"type": "integer", "minimum": 1},
            "maxDepth": {"type": "integer", "minimum": 1},
            "constraints": {"type": "array", "items": _CONSTRAINT},
            "includeEvents": {"type": "boolean"},
        },
        "required": ["id", "maxSolutions", "constraints"],
        "additionalProperties": False,
    },
    "lab/synth/solution": {
        "type": "object",
        "properties": {
            "id": {"type": "string"},
            "index": {"type": "integer", "minimum": 0},
            "term": {"type": "string"},
            "moves": {"type": "array", "items": _MOVE},
            "cells": {"type": "array", "items": _CELL, "minItems": 1},
        },
        "required": ["id", "index", "term", "moves", "cells"],
        "additionalProperties": False,
    },
    "lab/synth/done": {
        "type": "object",
        "properties": {
            "id": {"type": "string"},
            "count": {"type": "integer", "minimum": 0},
            "exhaustive": {"type": "boolean"},
        },
        "required": ["id", "count", "exhaustive"],
        "additionalProperties": False,
    },
    "lab/synth/warning": {
        "type": "object",
        "properties": {
            "id": {"type": "string"},
            "kind": {"type": "string", "enum": ["unusedCombinator", "uninhabited"]},
            "detail": {"type": "string"},
        },
        "required": ["id", "kind", "detail"],
        "additionalProperties": False,
    },
    "lab/synth/events": {
        "type": "object",
        "properties": {
            "id": {"type": "string"},
            "events": {
                "type": "array",
                "items": {
                    "type": "object",
                    "properties": {
                        "index": {"type": "integer", "minimum": 0},
                        "event": {
                            "type": "string",
                            "enum": [
                                "targetQueued",
                                "ruleAdded",
                                "coverFailed",
                                "targetUninhabited",
                                "pruned",
                            ],
                        },
                        "target": {"type": "string"},
                        "combinator": {"type": "string"},
                        "args": {"type": "array", "items": {"type": "string"}},
                        "reason": {"type": "string"},
                    },
                    "required": ["index", "event", "target"],
                    "additionalProperties": False,
                },
            },
        },
        "required": ["id", "events"],
        "additionalProperties": False,
    },
    "lab/synth/explain": {
        "type": "object",
        "properties": {
            "id": {"type": "string"},
            "combinator": {"type": "string"},
            "target": {"type": "string"},
        },
        "required": ["id", "combinator", "target"],
        "additionalProperties": False,
    },
    "lab/synth/trace": {
        "type": "object",
        "properties": {
            "id": {"type": "string"},
            "combinator": {"type": "string"},
            "target": {"type": "string"},
            "trace": {"type": "object"},
        },
        "required": ["id", "combinator", "target", "trace"],
        "additionalProperties": False,
    },
    "lab/robot/execute": {
        "type": "object",
        "properties": {
            "robot": {"type": "string"},
            "moves": {"type": "array", "items": _MOVE},
            "tickMs": {"type": "integer", "minimum": 0},
        },
        "required": ["robot", "moves", "tickMs"],
        "additionalProperties": False,
    },
    "lab/robot/position": {
        "type": "object",
        "properties": {
            "robot": {"type": "string"},
            "cell": _CELL,
            "t": {"type": "integer", "minimum": 0},
        },
        "required": ["robot", "cell", "t"],
        "additionalProperties": False,
    },
    "lab/robot/halt": {
        "type": "object",
        "properties": {
            "robot": {"type": "string"},
            "cause": {
                "type": "string",
                "enum": ["planComplete", "worldFailure", "specError"],
            },
            "cell": _CELL,
        },
        "required": ["robot", "cause", "cell"],
        "additionalProperties": False,
    },
    "lab/world/obstacle": {
        "type": "object",
        "properties": {"cell": _CELL, "blocked": {"type": "boolean"}},
        "required": ["cell", "blocked"],
        "additionalProperties": False,
    },
    "lab/laser/frame": {
        "type": "object",
        "properties": {
            "frame": {"type": "integer", "minimum": 0},
            "polylines": {"type": "array", "items": _POLYLINE},
        },
        "required": ["frame", "polylines"],
        "additionalProperties": False,
    },
    "lab/error": {
        "type": "object",
        "properties": {"reason": {"type": "string"}},
        "required": ["reason"],
        "additionalProperties": False,
    },
}


class ProtocolError(ValueError):
    """Envelope that cannot be accepted: unknown topic or invalid payload."""


@dataclass(frozen=True)
class Envelope:
    topic: str
    payload: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.topic not in TOPIC_SCHEMAS:
            raise ProtocolError(f"unknown topic {self.topic!r}")


def validate_payload(topic: str, payload: Any) -> None:
    """Raise ProtocolError unless payload matches the topic's schema."""
    schema = TOPIC_SCHEMAS.get(topic)
    if schema is None:
        raise ProtocolError(f"unknown topic {topic!r}")
    try:
        jsonschema.validate(payload, schema)
    except jsonschema.ValidationError as e:
        raise ProtocolError(f"invalid payload for {topic}: {e.message}") from e


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def envelope_to_json(env: Envelope) -> str:
    return canonical_json({"topic": env.topic, "payload": env.payload})


def envelope_from_json(line: str) -> Envelope:
    """Parse and validate one NDJSON line."""
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as e:
        raise ProtocolError(f"not valid JSON: {e.msg}") from e
    if not isinstance(obj, dict) or set(obj) != {"topic", "payload"}:
        raise ProtocolError("envelope must be an object with topic and payload")
    topic = obj["topic"]
    if not isinstance(topic, str) or topic not in TOPIC_SCHEMAS:
        raise ProtocolError(f"unknown topic {topic!r}")
    validate_payload(topic, obj["payload"])
    return Envelope(topic, obj["payload"])
