"""Path-synthesis workbench: type inhabitation over grid labyrinths."""

__version__ = "0.1.0"
