"""Tabular episodic RL lab: MVP learner, exact solvers, hard instances."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401

__version__ = "0.1.0"
