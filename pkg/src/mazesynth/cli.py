"""Command-line front end: synthesize, grammar, render, serve, oracle.

Exit codes: 0 success (for synthesize: at least one solution), 2 synthesis
found nothing, 1 any input or usage error.  All commands read the maze from a
file ("-" for stdin) in ASCII or JSON form; --format json prints payloads
that match the wire schemas, so scripts can treat the CLI and the bus alike.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from .inhab import build_grammar, events_to_json
from .maze import (
    Labyrinth,
    LabyrinthError,
    MaxLength,
    NoImmediateReversal,
    SimplePath,
    encode,
    oracle_simple_paths,
    oracle_walks,
    parse_labyrinth,
    synthesize,
)

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_NO_SOLUTION = 2


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; our contract reserves 2 for
    "synthesis found nothing", so usage errors become exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT_ERROR)


def _add_maze_arg(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("maze", help="maze file, or - for stdin")
    sub.add_argument(
        "--maze-format",
        choices=["ascii", "json"],
        default="ascii",
        help="maze file format (default: ascii)",
    )


def _add_constraint_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--simple-path", action="store_true",
                     help="only plans that never revisit a cell")
    sub.add_argument("--no-immediate-reversal", action="store_true",
                     help="reject a move directly undone by the next")
    sub.add_argument("--max-length", type=int, metavar="N",
                     help="at most N moves")


def _load_maze(args) -> Labyrinth:
    if args.maze == "-":
        text = sys.stdin.read()
    else:
        text = Path(args.maze).read_text()
    return parse_labyrinth(text, format=args.maze_format)


def _constraints(args) -> list:
    out = []
    if args.simple_path:
        out.append(SimplePath())
    if args.no_immediate_reversal:
        out.append(NoImmediateReversal())
    if args.max_length is not None:
        out.append(MaxLength(args.max_length))
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mazesynth",
                     description="Type-inhabitation path synthesis for grid labyrinths.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synthesize", help="enumerate movement plans",
                       description="Print start-to-goal plans, one per line: "
                                   "`down;left;down  (1,2)->(2,2)->(2,1)->(3,1)`.")
    _add_maze_arg(p)
    _add_constraint_args(p)
    p.add_argument("--max-solutions", type=int, default=10, metavar="N")
    p.add_argument("--max-depth", type=int, metavar="N",
                   help="bound on plan length; required without a bounding constraint")
    p.add_argument("--format", choices=["text", "json"], default="text",
                   help="json emits objects shaped like the bus's synth payloads")

    p = sub.add_parser("grammar", help="dump the inhabitation tree grammar")
    _add_maze_arg(p)
    p.add_argument("--events", action="store_true",
                   help="emit the replayable construction event log as JSON")

    p = sub.add_parser("render", help="render solution frames to SVG")
    _add_maze_arg(p)
    p.add_argument("--svg", required=True, metavar="OUT",
                   help="output file; without --final, one file per tick "
                        "(OUT_000.svg, OUT_001.svg, ...)")
    p.add_argument("--solution-index", type=int, default=0, metavar="I",
                   help="which simple-path solution to follow (default 0)")
    p.add_argument("--final", action="store_true",
                   help="write only the end state")

    p = sub.add_parser("serve", help="run the bus service")
    p.add_argument("--port", type=int,
                   default=int(os.environ.get("MAZESYNTH_PORT", "7070")))
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--transport", choices=["tcp", "stdio", "ws"], default="tcp")

    p = sub.add_parser("oracle", help="brute-force cross-checks")
    _add_maze_arg(p)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--max-len", type=int, metavar="L",
                       help="print walk counts per length up to L as JSON")
    group.add_argument("--simple-paths", action="store_true",
                       help="print every cell-disjoint route")

    return parser


def cmd_synthesize(args) -> int:
    lab = _load_maze(args)
    result = synthesize(
        lab,
        max_solutions=args.max_solutions,
        max_depth=args.max_depth,
        constraints=_constraints(args),
    )
    if args.format == "json":
        doc = {
            "id": "cli",
            "solutions": [
                {
                    "id": "cli",
                    "index": i,
                    "term": str(sol.term),
                    "moves": [m.key for m in sol.plan.moves],
                    "cells": [list(c) for c in sol.plan.cells],
                }
                for i, sol in enumerate(result.solutions)
            ],
            "warnings": [
                {"id": "cli", "kind": kind, "detail": detail}
                for kind, detail in result.warnings()
            ],
            "count": len(result.solutions),
            "exhaustive": result.exhaustive,
        }
        print(json.dumps(doc, indent=2))
    else:
        for sol in result.solutions:
            print(sol.plan)
        for kind, detail in result.warnings():
            print(f"warning: {kind} {detail}", file=sys.stderr)
    return EXIT_OK if result.solutions else EXIT_NO_SOLUTION


def cmd_grammar(args) -> int:
    lab = _load_maze(args)
    repo, goal = encode(lab)
    grammar, events, _ = build_grammar(repo, goal)
    if args.events:
        print(events_to_json(events))
    else:
        print(grammar.to_text())
    return EXIT_OK


def cmd_render(args) -> int:
    from .bridge import SimState, frame_to_svg, render_frame
    from .bridge.sim import execute_plan

    lab = _load_maze(args)
    result = synthesize(lab, max_solutions=args.solution_index + 1,
                        constraints=[SimplePath()])
    if args.solution_index >= len(result.solutions) or args.solution_index < 0:
        print(
            f"mazesynth render: error: no solution with index {args.solution_index}"
            f" ({len(result.solutions)} found)",
            file=sys.stderr,
        )
        return EXIT_INPUT_ERROR
    plan = result.solutions[args.solution_index].plan

    state = SimState.for_labyrinth(lab)
    frames = [render_frame(state)]
    for _ in execute_plan(state, "r1", plan, 0):
        frames.append(render_frame(state))
    frames.pop()  # the halt envelope does not move the robot

    out = Path(args.svg)
    if args.final:
        out.write_text(frame_to_svg(frames[-1]))
        print(out)
    else:
        stem = out.with_suffix("") if out.suffix == ".svg" else out
        for i, frame in enumerate(frames):
            path = Path(f"{stem}_{i:03d}.svg")
            path.write_text(frame_to_svg(frame))
            print(path)
    return EXIT_OK


def cmd_serve(args) -> int:
    from .bridge import serve_stdio, serve_tcp, serve_websocket

    try:
        if args.transport == "stdio":
            serve_stdio()
            return EXIT_OK
        if args.transport == "tcp":
            server = serve_tcp(args.host, args.port)
        else:
            server = serve_websocket(args.host, args.port)
    except OSError as e:
        print(f"mazesynth serve: error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    print(f"serving {args.transport} on {args.host}:{args.port}", file=sys.stderr)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.shutdown()
    return EXIT_OK


def cmd_oracle(args) -> int:
    lab = _load_maze(args)
    if args.simple_paths:
        for plan in oracle_simple_paths(lab):
            print(plan)
    else:
        counts = oracle_walks(lab, args.max_len)
        print(json.dumps({str(k): counts[k] for k in sorted(counts)}))
    return EXIT_OK


_COMMANDS = {
    "synthesize": cmd_synthesize,
    "grammar": cmd_grammar,
    "render": cmd_render,
    "serve": cmd_serve,
    "oracle": cmd_oracle,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (LabyrinthError, ValueError) as e:
        print(f"mazesynth {args.command}: error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except OSError as e:
        print(f"mazesynth {args.command}: error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
