"""Effective-potential reduction of coupled eigenproblems.

Thin Python bindings over the C++ core: build a coupled system from a JSON
configuration, enumerate every root of the reduced equation, compare with the
dense oracle, and drive the realisation statistics, the jump simulator and
the kinematics chain.
"""

from ._core import *  # noqa: F401,F403
from ._core import MvepError

__all__ = [name for name in dir() if not name.startswith("_")]
