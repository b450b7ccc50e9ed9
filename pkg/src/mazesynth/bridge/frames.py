"""Laser frames: the world as colored polylines, exported as byte-stable SVG.

Coordinates are maze units — cell (r, c) spans [c, c+1] x [r, r+1] with the
origin at the top-left, y growing downward.  All geometry constants (colors,
star radii, robot inset, stroke width) are fixed so that rendering the same
state always produces the same bytes, which is what the snapshot tests pin.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .sim import SimState

GRID_COLOR = "#FFFFFF"
BLOCKED_COLOR = "#FF0000"
GOAL_COLOR = "#00FF00"
ROBOT_COLOR = "#0000FF"

STAR_OUTER = 0.4
STAR_INNER = 0.16
ROBOT_INSET = 0.2
STROKE_WIDTH = 0.05

Point = tuple[float, float]


@dataclass(frozen=True)
class Polyline:
    color: str
    points: tuple[Point, ...]


@dataclass(frozen=True)
class Frame:
    frame: int
    polylines: tuple[Polyline, ...]


def _round_points(points: list[Point]) -> tuple[Point, ...]:
    return tuple((round(x, 4), round(y, 4)) for x, y in points)


def _square(r: int, c: int, inset: float = 0.0) -> tuple[Point, ...]:
    x0, y0 = c + inset, r + inset
    x1, y1 = c + 1 - inset, r + 1 - inset
    return _round_points([(x0, y0), (x1, y0), (x1, y1), (x0, y1), (x0, y0)])


def _star(r: int, c: int) -> tuple[Point, ...]:
    """Closed five-pointed star: 10 segments, first point straight up."""
    cx, cy = c + 0.5, r + 0.5
    pts: list[Point] = []
    for k in range(10):
        radius = STAR_OUTER if k % 2 == 0 else STAR_INNER
        angle = math.radians(-90 + 36 * k)
        pts.append((cx + radius * math.cos(angle), cy + radius * math.sin(angle)))
    pts.append(pts[0])
    return _round_points(pts)


def render_frame(state: SimState) -> Frame:
    """Deterministic scene: grid, obstacles, goal star, robots — in that order.

    Blocked cells reflect the live world (injections included), row-major;
    robots are drawn sorted by id.  The frame number is the simulation tick.
    """
    lab = state.labyrinth
    lines: list[Polyline] = []

    border = _round_points(
        [(0, 0), (lab.cols, 0), (lab.cols, lab.rows), (0, lab.rows), (0, 0)]
    )
    lines.append(Polyline(GRID_COLOR, border))
    for x in range(1, lab.cols):
        lines.append(Polyline(GRID_COLOR, _round_points([(x, 0), (x, lab.rows)])))
    for y in range(1, lab.rows):
        lines.append(Polyline(GRID_COLOR, _round_points([(0, y), (lab.cols, y)])))

    for r, c in sorted(state.blocked_now):
        lines.append(Polyline(BLOCKED_COLOR, _square(r, c)))

    lines.append(Polyline(GOAL_COLOR, _star(*lab.goal)))

    for name in sorted(state.robots):
        r, c = state.robots[name].cell
        lines.append(Polyline(ROBOT_COLOR, _square(r, c, inset=ROBOT_INSET)))

    return Frame(frame=state.tick, polylines=tuple(lines))


def _fmt(v: float) -> str:
    if v == int(v):
        return str(int(v))
    return repr(round(v, 4))


def frame_to_svg(frame: Frame) -> str:
    """One polyline element per Frame polyline; viewBox hugs the geometry."""
    max_x = max((x for p in frame.polylines for x, _ in p.points), default=0)
    max_y = max((y for p in frame.polylines for _, y in p.points), default=0)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="0 0 {_fmt(max_x)} {_fmt(max_y)}">'
    ]
    for p in frame.polylines:
        pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in p.points)
        out.append(
            f'  <polyline points="{pts}" stroke="{p.color}" '
            f'stroke-width="{_fmt(STROKE_WIDTH)}" fill="none"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


_POLYLINE_RE = re.compile(
    r'<polyline points="([^"]*)" stroke="([^"]*)" stroke-width="[^"]*" fill="none"/>'
)


def svg_to_polylines(svg: str) -> tuple[Polyline, ...]:
    """Inverse of frame_to_svg for the polylines (frame number is not encoded)."""
    out = []
    for match in _POLYLINE_RE.finditer(svg):
        raw, color = match.group(1), match.group(2)
        points = tuple(
            (float(x), float(y))
            for x, y in (pair.split(",") for pair in raw.split() if pair)
        )
        out.append(Polyline(color, points))
    return tuple(out)


def frame_to_payload(frame: Frame) -> dict:
    return {
        "frame": frame.frame,
        "polylines": [
            {"color": p.color, "points": [[x, y] for x, y in p.points]}
            for p in frame.polylines
        ],
    }


def frame_from_payload(payload: dict) -> Frame:
    return Frame(
        frame=payload["frame"],
        polylines=tuple(
            Polyline(p["color"], tuple((x, y) for x, y in p["points"]))
            for p in payload["polylines"]
        ),
    )
