"""Comparing statistical experiments by linear-Blackwell dominance."""

from ._infoorder import *  # noqa: F401,F403
from ._infoorder import InfoorderError, __doc__  # noqa: F401
