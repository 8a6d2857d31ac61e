"""Mixed-state geometric phases of cyclic unitary evolutions."""

from ._core import *  # noqa: F401,F403
