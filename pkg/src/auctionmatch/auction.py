"""Sequential (Gauss-Seidel) auction for minimum-weight bipartite matching.

Every right vertex ``v`` carries a label ``L(v)`` starting at 0. A free left
vertex ``u`` picks the neighbor minimizing ``L(v) + w(u, v)``, raises that
label to ``second_best - w(u, v) + epsilon`` and takes ``v``, evicting the
previous owner, which then bids in turn. A bidder whose best label already
exceeds the cap ``n_right/2 * (w_max - w_min + epsilon)`` is discarded.

Floating-point note: comparisons are exact. Pick ``epsilon`` well above the
rounding noise of the labels, roughly ``epsilon >= 2**20 * 2.2e-16 *
max(1, |w_max|) * n_right``, or the approximation guarantee degrades.
"""

from __future__ import annotations

import logging
import math
from array import array
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .graph import BipartiteGraph

log = logging.getLogger(__name__)

INF = math.inf


class IsolatedVertexError(ValueError):
    pass


@dataclass
class Matching:
    """Partial assignment; ``None`` marks an unmatched vertex."""

    right_to_left: list[Optional[int]]
    left_to_right: list[Optional[int]]

    @classmethod
    def empty(cls, n_left: int, n_right: int) -> "Matching":
        return cls([None] * n_right, [None] * n_left)

    @classmethod
    def from_pairs(cls, n_left: int, n_right: int, pairs) -> "Matching":
        m = cls.empty(n_left, n_right)
        for u, v in pairs:
            if m.left_to_right[u] is not None or m.right_to_left[v] is not None:
                raise ValueError(f"pair ({u}, {v}) reuses a matched vertex")
            m.left_to_right[u] = v
            m.right_to_left[v] = u
        return m

    def pairs(self) -> list[tuple[int, int]]:
        return [(u, v) for u, v in enumerate(self.left_to_right) if v is not None]

    def __len__(self) -> int:
        return sum(v is not None for v in self.left_to_right)

    def copy(self) -> "Matching":
        return Matching(list(self.right_to_left), list(self.left_to_right))

    def is_consistent(self) -> bool:
        for u, v in enumerate(self.left_to_right):
            if v is not None and self.right_to_left[v] != u:
                return False
        for v, u in enumerate(self.right_to_left):
            if u is not None and self.left_to_right[u] != v:
                return False
        return True


@dataclass(frozen=True)
class SolverConfig:
    epsilon: float
    cap_override: Optional[float] = None
    order: str = "input"  # or "shuffled"
    seed: int = 0
    record_trace: bool = False
    # One cap per connected component instead of the global one.
    per_component_cap: bool = False

    def __post_init__(self) -> None:
        if not self.epsilon > 0 or not math.isfinite(self.epsilon):
            raise ValueError(f"epsilon must be a positive finite number, got {self.epsilon!r}")
        if self.order not in ("input", "shuffled"):
            raise ValueError(f"unknown order {self.order!r}")


class MoveRecord(NamedTuple):
    index: int  # 1-based move number
    left: int
    right: int
    label_before: float
    label_after: float
    displaced: Optional[int]
    locked: bool


@dataclass(frozen=True)
class SolveResult:
    matching: Matching
    labels: list[float]
    discarded: tuple[int, ...]
    total_weight: float
    moves: int
    comparisons: int
    locks: int
    cap: float
    epsilon: float
    trace: Optional[list[MoveRecord]] = None
    last_move: Optional[MoveRecord] = None

    @property
    def matched(self) -> int:
        return len(self.matching)


def cap(graph: BipartiteGraph, epsilon: float) -> float:
    """Largest label a bidder may still compete for: ``n_right/2 * (w_max - w_min + epsilon)``."""
    if graph.n_edges == 0:
        raise ValueError("cap is undefined on a graph without edges")
    return graph.n_right / 2 * (graph.w_max - graph.w_min + epsilon)


def choose_best_and_second(
    u: int, graph: BipartiteGraph, labels: list[float]
) -> tuple[int, float, float]:
    """Return ``(v_best, best, second)`` for left vertex ``u``.

    ``best`` is the minimum of ``L(v) + w(u, v)`` over the neighbors, with ties
    going to the smallest right index; ``second`` is the minimum over the other
    neighbors, or ``inf`` when ``u`` has a single neighbor.
    """
    nbrs = graph.neighbors[u]
    if not nbrs:
        raise IsolatedVertexError(f"left vertex {u} has no neighbors")
    best = second = INF
    bv = -1
    for v, w in zip(nbrs, graph.weights[u]):
        val = labels[v] + w
        if val < best or (val == best and v < bv):
            second = best
            best = val
            bv = v
        elif val < second:
            second = val
    return bv, best, second


def _component_caps(graph: BipartiteGraph, epsilon: float) -> list[float]:
    """Cap per right vertex, using the size and weight range of its component."""
    parent = list(range(graph.n_left + graph.n_right))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    off = graph.n_left
    for u, v, _ in graph.edges():
        a, b = find(u), find(off + v)
        if a != b:
            parent[a] = b
    size: dict[int, int] = {}
    hi: dict[int, float] = {}
    lo: dict[int, float] = {}
    for v in range(graph.n_right):
        r = find(off + v)
        size[r] = size.get(r, 0) + 1
    for u, _, w in graph.edges():
        r = find(u)
        hi[r] = max(hi.get(r, -INF), w)
        lo[r] = min(lo.get(r, INF), w)
    caps = []
    for v in range(graph.n_right):
        r = find(off + v)
        if r in hi:
            caps.append(size[r] / 2 * (hi[r] - lo[r] + epsilon))
        else:
            caps.append(0.0)  # no incident edge; never bid on
    return caps


@dataclass
class AuctionState:
    """Mutable solver state for one run; not shared between threads.

    ``owner[v]`` / ``mate[u]`` hold -1 for unmatched vertices.
    """

    graph: BipartiteGraph
    epsilon: float
    caps: array
    labels: array
    owner: array
    mate: array
    record_trace: bool = False
    trace: list[MoveRecord] = field(default_factory=list)
    discarded: list[int] = field(default_factory=list)
    moves: int = 0
    comparisons: int = 0
    locks: int = 0
    last_move: Optional[MoveRecord] = None

    @classmethod
    def initial(cls, graph: BipartiteGraph, config: SolverConfig) -> "AuctionState":
        if config.cap_override is not None:
            caps = [float(config.cap_override)] * graph.n_right
        elif graph.n_edges == 0:
            caps = [0.0] * graph.n_right
        elif config.per_component_cap:
            caps = _component_caps(graph, config.epsilon)
        else:
            caps = [cap(graph, config.epsilon)] * graph.n_right
        return cls(
            graph=graph,
            epsilon=config.epsilon,
            caps=array("d", caps),
            labels=array("d", bytes(8 * graph.n_right)),
            owner=array("q", [-1]) * graph.n_right,
            mate=array("q", [-1]) * graph.n_left,
            record_trace=config.record_trace,
        )

    @property
    def matching(self) -> Matching:
        return Matching(
            [None if u < 0 else u for u in self.owner],
            [None if v < 0 else v for v in self.mate],
        )


def match_vertex(state: AuctionState, u: int) -> None:
    """Place free left vertex ``u``, following the eviction chain to its end.

    Each pass through the loop is one move: one label rises and one left
    vertex gains a partner. The evicted owner, if any, bids next. The choice
    rule is :func:`choose_best_and_second`, inlined over the flat arrays.
    """
    offsets, targets, weights = state.graph.csr
    labels, caps = state.labels, state.caps
    owner, mate = state.owner, state.mate
    eps = state.epsilon
    trace = state.trace if state.record_trace else None
    moves = state.moves
    comparisons = state.comparisons
    last = None
    while True:
        lo, hi = offsets[u], offsets[u + 1]
        if lo == hi:
            log.warning("left vertex %d has no neighbors; discarded", u)
            state.discarded.append(u)
            break
        comparisons += hi - lo
        best = second = INF
        v = -1
        for i in range(lo, hi):
            x = targets[i]
            val = labels[x] + weights[i]
            if val < best or (val == best and x < v):
                second = best
                best = val
                v = x
            elif val < second:
                second = val
        before = labels[v]
        if before > caps[v]:
            state.discarded.append(u)
            break
        if second == INF:
            after = caps[v] + eps
            locked = True
            state.locks += 1
        else:
            # before + (second - best) is second - w(u, v) computed so that
            # the label provably rises by at least eps in floating point.
            after = before + ((second - best) + eps)
            locked = False
        labels[v] = after
        y = owner[v]
        owner[v] = u
        mate[u] = v
        if y >= 0:
            mate[y] = -1
        moves += 1
        last = (moves, u, v, before, after, None if y < 0 else y, locked)
        if trace is not None:
            trace.append(MoveRecord(*last))
        if y < 0:
            break
        u = y
    if last is not None:
        state.last_move = MoveRecord(*last)
    state.moves = moves
    state.comparisons = comparisons


def processing_order(n_left: int, config: SolverConfig) -> list[int]:
    if config.order == "input":
        return list(range(n_left))
    rng = np.random.Generator(np.random.PCG64(config.seed))
    return [int(x) for x in rng.permutation(n_left)]


def solve(graph: BipartiteGraph, config: SolverConfig) -> SolveResult:
    """Run the auction over every left vertex in ``config.order``.

    Raises:
        ValueError: if ``n_left > n_right``.
    """
    if graph.n_left > graph.n_right:
        raise ValueError(
            f"need n_left <= n_right, got {graph.n_left} > {graph.n_right}"
        )
    state = AuctionState.initial(graph, config)
    for u in processing_order(graph.n_left, config):
        match_vertex(state, u)
    m = state.matching
    total = math.fsum(graph.weight(u, v) for u, v in m.pairs())
    return SolveResult(
        matching=m,
        labels=list(state.labels),
        discarded=tuple(sorted(state.discarded)),
        total_weight=total,
        moves=state.moves,
        comparisons=state.comparisons,
        locks=state.locks,
        cap=max(state.caps, default=0.0),
        epsilon=config.epsilon,
        trace=state.trace if config.record_trace else None,
        last_move=state.last_move,
    )
