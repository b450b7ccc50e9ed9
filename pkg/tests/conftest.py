import pytest

from mazesynth.maze import Labyrinth, parse_labyrinth

DEMO_MAZE_TEXT = "...\n.#S\n...\n#G#"


@pytest.fixture
def demo_maze() -> Labyrinth:
    """4x3 labyrinth: start (1,2), goal (3,1), walls at (1,1), (3,0), (3,2)."""
    return parse_labyrinth(DEMO_MAZE_TEXT)


@pytest.fixture
def single_row() -> Labyrinth:
    return parse_labyrinth("S..G")


@pytest.fixture
def walled_goal() -> Labyrinth:
    """Goal boxed in by walls; the goal type is uninhabited."""
    return parse_labyrinth("S..\n.##\n.#G")
