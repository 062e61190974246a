"""Exact and numerical tools for diagonal free-group actions, Denjoy systems and weighted shifts."""

from .exceptions import PreconditionError, WindowError
from .zlattice import AbGroupInvariants, AbGroupPresentation, IntMatrix

__version__ = "0.1.0"

__all__ = ["AbGroupInvariants", "AbGroupPresentation", "IntMatrix", "PreconditionError", "WindowError"]
