"""Numerical certificates for parabolic equations driven by pseudo-differential operators."""

from ._core import *  # noqa: F401,F403
from ._core import SpdelabError, __doc__  # noqa: F401
