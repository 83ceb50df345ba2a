"""Exact computations on CW complexes with even 2-skeleton.

Homology over Z and Z/2, chromatic and circular chromatic numbers,
rainbow-square certification, k-fundamental group abelianizations and
walk lifting on circular complete graphs.
"""

from evencw.errors import (
    GenerationError,
    InputError,
    InternalConsistencyError,
    ResourceError,
)
from evencw.graph import Graph, VertexMap, Walk

__all__ = [
    "Graph",
    "VertexMap",
    "Walk",
    "InputError",
    "GenerationError",
    "ResourceError",
    "InternalConsistencyError",
]

__version__ = "0.1.0"
