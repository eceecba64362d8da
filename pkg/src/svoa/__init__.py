"""Exact computations in the compactified superstring vertex algebra."""

from .exactfield import Cyc
from .fock import State
from .lattice import SuperstringLattice
from .vertexop import VertexAlgebra, default_algebra

__all__ = ["Cyc", "State", "SuperstringLattice", "VertexAlgebra", "default_algebra"]
__version__ = "0.1.0"
