"""Partial theta function: evaluation, zeros, spectrum and bound checks."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
