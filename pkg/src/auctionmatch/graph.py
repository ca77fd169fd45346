"""Weighted bipartite graphs, random generators and the ``p bpm`` text format.

Vertices are 0-based inside the library. The text format is 1-based.
"""

from __future__ import annotations

import io
import math
from array import array
from dataclasses import dataclass, field
from functools import cached_property
from typing import IO, Iterable, Sequence

import numpy as np

__all__ = [
    "BipartiteGraph",
    "GeneratorSpec",
    "ParseError",
    "InvalidSpecError",
    "generate",
    "parse",
    "serialize",
    "format_weight",
]


class ParseError(ValueError):
    """Malformed graph or matching text. ``lineno`` is 1-based (0 if unknown)."""

    def __init__(self, message: str, lineno: int = 0):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}" if lineno else message)


class InvalidSpecError(ValueError):
    pass


@dataclass(frozen=True)
class BipartiteGraph:
    """Left vertices ``0..n_left-1``, right vertices ``0..n_right-1``.

    ``neighbors[u]`` and ``weights[u]`` are parallel tuples giving the
    adjacency of left vertex ``u`` in its stored order.
    """

    n_left: int
    n_right: int
    neighbors: tuple[tuple[int, ...], ...]
    weights: tuple[tuple[float, ...], ...]
    w_max: float = field(init=False, compare=False)
    w_min: float = field(init=False, compare=False)

    def __post_init__(self) -> None:
        if self.n_left < 0 or self.n_right < 0:
            raise ValueError("vertex counts must be non-negative")
        if len(self.neighbors) != self.n_left or len(self.weights) != self.n_left:
            raise ValueError("adjacency length must equal n_left")
        w_max, w_min = -math.inf, math.inf
        for u, (nbrs, ws) in enumerate(zip(self.neighbors, self.weights)):
            if len(nbrs) != len(ws):
                raise ValueError(f"left vertex {u}: neighbor/weight length mismatch")
            if len(set(nbrs)) != len(nbrs):
                raise ValueError(f"left vertex {u}: duplicate neighbor")
            for v, w in zip(nbrs, ws):
                if not 0 <= v < self.n_right:
                    raise ValueError(f"left vertex {u}: right index {v} out of range")
                if not math.isfinite(w):
                    raise ValueError(f"left vertex {u}: non-finite weight {w!r}")
                w_max = max(w_max, w)
                w_min = min(w_min, w)
        object.__setattr__(self, "w_max", w_max)
        object.__setattr__(self, "w_min", w_min)

    @classmethod
    def from_edges(
        cls, n_left: int, n_right: int, edges: Iterable[tuple[int, int, float]]
    ) -> "BipartiteGraph":
        """Build from ``(u, v, w)`` triples (0-based), keeping their order."""
        nbrs: list[list[int]] = [[] for _ in range(n_left)]
        ws: list[list[float]] = [[] for _ in range(n_left)]
        for u, v, w in edges:
            if not 0 <= u < n_left:
                raise ValueError(f"left index {u} out of range")
            nbrs[u].append(v)
            ws[u].append(float(w))
        return cls(n_left, n_right, tuple(map(tuple, nbrs)), tuple(map(tuple, ws)))

    @classmethod
    def from_matrix(cls, matrix: Sequence[Sequence[float]]) -> "BipartiteGraph":
        """Complete bipartite graph; ``matrix[u][v]`` is the weight of (u, v)."""
        rows = [list(map(float, r)) for r in matrix]
        n_right = len(rows[0]) if rows else 0
        if any(len(r) != n_right for r in rows):
            raise ValueError("ragged weight matrix")
        nbrs = tuple(tuple(range(n_right)) for _ in rows)
        return cls(len(rows), n_right, nbrs, tuple(map(tuple, rows)))

    @property
    def n_edges(self) -> int:
        return sum(len(nb) for nb in self.neighbors)

    @cached_property
    def csr(self) -> tuple[array, array, array]:
        """Flat ``(offsets, targets, weights)`` arrays; row ``u`` is
        ``offsets[u]:offsets[u + 1]``."""
        offsets = array("q", [0])
        targets = array("q")
        weights = array("d")
        for nbrs, ws in zip(self.neighbors, self.weights):
            targets.extend(nbrs)
            weights.extend(ws)
            offsets.append(len(targets))
        return offsets, targets, weights

    def edges(self) -> Iterable[tuple[int, int, float]]:
        for u, (nbrs, ws) in enumerate(zip(self.neighbors, self.weights)):
            for v, w in zip(nbrs, ws):
                yield u, v, w

    def adjacency(self, u: int) -> list[tuple[int, float]]:
        return list(zip(self.neighbors[u], self.weights[u]))

    def weight(self, u: int, v: int) -> float:
        """Weight of edge (u, v); ``KeyError`` if absent."""
        try:
            i = self.neighbors[u].index(v)
        except ValueError:
            raise KeyError((u, v)) from None
        return self.weights[u][i]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.neighbors[u]

    def degree(self, u: int) -> int:
        return len(self.neighbors[u])

    def canonical(self) -> "BipartiteGraph":
        """Same graph with each adjacency sorted by right index."""
        nbrs, ws = [], []
        for row_n, row_w in zip(self.neighbors, self.weights):
            pairs = sorted(zip(row_n, row_w))
            nbrs.append(tuple(v for v, _ in pairs))
            ws.append(tuple(w for _, w in pairs))
        return BipartiteGraph(self.n_left, self.n_right, tuple(nbrs), tuple(ws))


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str  # "k_left_regular" | "complete"
    n_right: int
    n_left: int
    k: int = 3
    weight_low: float = 0.0
    weight_high: float = 1.0
    integer_weights: bool = False
    seed: int = 0

    def validate(self) -> None:
        if self.kind not in ("k_left_regular", "complete"):
            raise InvalidSpecError(f"unknown graph kind {self.kind!r}")
        if self.n_left < 0 or self.n_right < 0:
            raise InvalidSpecError("vertex counts must be non-negative")
        if self.weight_low > self.weight_high:
            raise InvalidSpecError("weight_low > weight_high")
        if self.integer_weights and not (
            float(self.weight_low).is_integer() and float(self.weight_high).is_integer()
        ):
            raise InvalidSpecError("integer weights need integral bounds")
        if not 0 <= self.seed < 2**64:
            raise InvalidSpecError("seed must be a 64-bit unsigned integer")
        if self.kind == "k_left_regular":
            if self.k < 1:
                raise InvalidSpecError("k must be >= 1")
            if self.k > self.n_right:
                raise InvalidSpecError(f"k={self.k} exceeds n_right={self.n_right}")


def _draw_weights(rng: np.random.Generator, spec: GeneratorSpec, size: int) -> tuple[float, ...]:
    if spec.integer_weights:
        lo, hi = int(spec.weight_low), int(spec.weight_high)
        return tuple(float(x) for x in rng.integers(lo, hi + 1, size=size))
    lo, hi = spec.weight_low, spec.weight_high
    return tuple(float(x) for x in lo + (hi - lo) * rng.random(size))


def generate(spec: GeneratorSpec) -> BipartiteGraph:
    """Sample a random graph; the same spec always yields the same graph.

    The stream is numpy's PCG64 seeded with ``spec.seed``. Left vertices are
    processed in order; for each one the neighbors are drawn first (one
    ``integers(n_right)`` call per candidate, repeats rejected, until ``k``
    distinct ones are found) and then one block of ``k`` weights. Complete
    graphs draw one block of ``n_right`` weights per left vertex.
    """
    spec.validate()
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    nbrs: list[tuple[int, ...]] = []
    ws: list[tuple[float, ...]] = []
    if spec.kind == "complete":
        row = tuple(range(spec.n_right))
        for _ in range(spec.n_left):
            nbrs.append(row)
            ws.append(_draw_weights(rng, spec, spec.n_right))
    else:
        for _ in range(spec.n_left):
            chosen: list[int] = []
            seen: set[int] = set()
            while len(chosen) < spec.k:
                v = int(rng.integers(spec.n_right))
                if v not in seen:
                    seen.add(v)
                    chosen.append(v)
            nbrs.append(tuple(chosen))
            ws.append(_draw_weights(rng, spec, spec.k))
    return BipartiteGraph(spec.n_left, spec.n_right, tuple(nbrs), tuple(ws))


def format_weight(w: float) -> str:
    """Shortest decimal that reads back to the same float; integers drop ``.0``."""
    if w.is_integer() and abs(w) < 2**53:
        return str(int(w))
    return repr(w)


def _parse_number(tok: str, lineno: int) -> float:
    try:
        w = float(tok)
    except ValueError:
        raise ParseError(f"bad weight {tok!r}", lineno) from None
    if not math.isfinite(w):
        raise ParseError(f"non-finite weight {tok!r}", lineno)
    return w


def _parse_count(tok: str, what: str, lineno: int) -> int:
    try:
        x = int(tok)
    except ValueError:
        raise ParseError(f"bad {what} {tok!r}", lineno) from None
    if x < 0:
        raise ParseError(f"negative {what}", lineno)
    return x


def parse(source: str | bytes | IO[str] | IO[bytes]) -> BipartiteGraph:
    """Read a graph in ``p bpm`` format.

    Raises:
        ParseError: on any malformed line, out-of-range index, duplicate edge
            or a header edge count that disagrees with the edge lines.
    """
    if hasattr(source, "read"):
        source = source.read()  # type: ignore[union-attr]
    if isinstance(source, bytes):
        try:
            source = source.decode("ascii")
        except UnicodeDecodeError as exc:
            raise ParseError(f"non-ASCII input: {exc}") from None
    assert isinstance(source, str)

    header: tuple[int, int, int] | None = None
    edges: list[tuple[int, int, float]] = []
    seen: set[tuple[int, int]] = set()
    lineno = 0
    for lineno, raw in enumerate(io.StringIO(source), start=1):
        toks = raw.split()
        if not toks or toks[0] == "c":
            continue
        tag = toks[0]
        if header is None:
            if tag != "p":
                raise ParseError("expected header 'p bpm <n_left> <n_right> <m>'", lineno)
            if len(toks) != 5 or toks[1] != "bpm":
                raise ParseError("malformed header", lineno)
            header = (
                _parse_count(toks[2], "n_left", lineno),
                _parse_count(toks[3], "n_right", lineno),
                _parse_count(toks[4], "edge count", lineno),
            )
            continue
        if tag == "p":
            raise ParseError("duplicate header", lineno)
        if tag != "e" or len(toks) != 4:
            raise ParseError(f"expected 'e <u> <v> <w>', got {raw.strip()!r}", lineno)
        n_left, n_right, m = header
        u = _parse_count(toks[1], "left index", lineno)
        v = _parse_count(toks[2], "right index", lineno)
        if not 1 <= u <= n_left:
            raise ParseError(f"left index {u} out of range [1, {n_left}]", lineno)
        if not 1 <= v <= n_right:
            raise ParseError(f"right index {v} out of range [1, {n_right}]", lineno)
        if (u, v) in seen:
            raise ParseError(f"duplicate edge ({u}, {v})", lineno)
        if len(edges) == m:
            raise ParseError(f"more edge lines than the {m} declared", lineno)
        seen.add((u, v))
        edges.append((u - 1, v - 1, _parse_number(toks[3], lineno)))
    if header is None:
        raise ParseError("missing header", lineno)
    n_left, n_right, m = header
    if len(edges) != m:
        raise ParseError(f"header declares {m} edges but {len(edges)} found", lineno)
    return BipartiteGraph.from_edges(n_left, n_right, edges)


def serialize(graph: BipartiteGraph) -> str:
    """Canonical text: header, then edges sorted by (u, v)."""
    out = [f"p bpm {graph.n_left} {graph.n_right} {graph.n_edges}\n"]
    for u, (nbrs, ws) in enumerate(zip(graph.neighbors, graph.weights)):
        for v, w in sorted(zip(nbrs, ws)):
            out.append(f"e {u + 1} {v + 1} {format_weight(w)}\n")
    return "".join(out)
