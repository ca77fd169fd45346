"""Minimum-weight bipartite matching by the sequential auction algorithm."""

from .auction import Matching, MoveRecord, SolveResult, SolverConfig, cap, solve
from .graph import BipartiteGraph, GeneratorSpec, ParseError, generate, parse, serialize

__all__ = [
    "BipartiteGraph",
    "GeneratorSpec",
    "Matching",
    "MoveRecord",
    "ParseError",
    "SolveResult",
    "SolverConfig",
    "cap",
    "generate",
    "parse",
    "serialize",
    "solve",
]
