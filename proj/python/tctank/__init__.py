"""Sixth-order triple-coupled transformer LC tank analysis."""

from ._tctank import *  # noqa: F401,F403
from ._tctank import __version__  # noqa: F401
