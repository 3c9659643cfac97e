"""Wear simulation of Path ORAM on endurance-limited non-volatile memory."""

from nvoram.config import SimConfig
from nvoram.sim import compare, run_simulation
from nvoram.tree import TreeGeometry, path_nodes

__all__ = ["SimConfig", "TreeGeometry", "compare", "path_nodes", "run_simulation"]
__version__ = "0.1.0"
