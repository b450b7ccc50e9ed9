"""Regenerate the IDE test fixtures from the installed mazesynth package.

Run from this directory:  python3 generate.py

Everything here is oracle- or service-derived; the TypeScript tests treat
these files as frozen ground truth and never compute expected values
themselves.
"""

import json
from pathlib import Path

from mazesynth.bridge import Envelope, scripted_transcript
from mazesynth.inhab import build_grammar, events_to_json, explain_cover
from mazesynth.maze import (
    Labyrinth,
    encode,
    labyrinth_to_payload,
    oracle_simple_paths,
    parse_labyrinth,
)
from mazesynth.typesys import parse_type

HERE = Path(__file__).parent
DEMO = parse_labyrinth("...\n.#S\n...\n#G#")
EDITED = Labyrinth(
    rows=DEMO.rows,
    cols=DEMO.cols,
    blocked=DEMO.blocked - {(1, 1)},
    start=DEMO.start,
    goal=DEMO.goal,
)


def request(rid: str) -> Envelope:
    # mirrors the request the maze editor publishes after an edit
    return Envelope(
        "lab/synth/request",
        {
            "id": rid,
            "maxSolutions": 50,
            "constraints": ["simplePath"],
            "includeEvents": True,
        },
    )


def main() -> None:
    session = scripted_transcript([
        Envelope("lab/maze/set", labyrinth_to_payload(DEMO)),
        request("ide-1"),
        Envelope("lab/maze/set", labyrinth_to_payload(EDITED)),
        request("ide-2"),
    ])
    (HERE / "session.ndjson").write_text(session)

    plan = {"robot": "r1", "moves": ["down", "left", "down"], "tickMs": 0}
    playback = scripted_transcript([
        Envelope("lab/maze/set", labyrinth_to_payload(DEMO)),
        request("ide-1"),
        Envelope("lab/robot/execute", plan),
        Envelope("lab/maze/set", labyrinth_to_payload(DEMO)),
        Envelope("lab/world/obstacle", {"cell": [2, 1], "blocked": True}),
        Envelope("lab/robot/execute", plan),
    ])
    (HERE / "playback.ndjson").write_text(playback)

    repo, goal = encode(DEMO)
    grammar, events, _ = build_grammar(repo, goal)
    (HERE / "events.json").write_text(events_to_json(events) + "\n")
    (HERE / "grammar.txt").write_text(grammar.to_text() + "\n")

    repo_w, goal_w = encode(parse_labyrinth("S..\n.##\n.#G"))
    _, events_w, _ = build_grammar(repo_w, goal_w)
    (HERE / "walled_events.json").write_text(events_to_json(events_w) + "\n")

    down = explain_cover(repo, "down", parse_type("MovementPlan & Pos(2,2)"))
    left = explain_cover(repo, "left", parse_type("MovementPlan & Pos(3,1)"))
    (HERE / "trace_down.json").write_text(json.dumps(down.to_dict(), indent=1) + "\n")
    (HERE / "trace_left.json").write_text(json.dumps(left.to_dict(), indent=1) + "\n")

    (HERE / "oracle.json").write_text(json.dumps({
        "demoMaze": labyrinth_to_payload(DEMO),
        "editedMaze": labyrinth_to_payload(EDITED),
        "editedCell": [1, 1],
        "demoSimplePathCount": len(oracle_simple_paths(DEMO)),
        "editedSimplePathCount": len(oracle_simple_paths(EDITED)),
    }, indent=1) + "\n")


if __name__ == "__main__":
    main()
