"""Exact solvers, used as ground truth for the auction."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .auction import Matching
from .graph import BipartiteGraph

BRUTE_FORCE_LIMIT = 10


class InfeasibleError(ValueError):
    """No left-perfect matching exists."""


@dataclass(frozen=True)
class ExactResult:
    optimum_weight: float
    matching: Matching
    cardinality: int


def _result(graph: BipartiteGraph, pairs: list[tuple[int, int]]) -> ExactResult:
    m = Matching.from_pairs(graph.n_left, graph.n_right, pairs)
    weight = math.fsum(graph.weight(u, v) for u, v in pairs)
    return ExactResult(weight, m, len(pairs))


def brute_force(graph: BipartiteGraph) -> ExactResult:
    """Minimum weight among maximum-cardinality matchings, by enumeration.

    Left vertices are tried in order, each either left unmatched or given a
    free neighbor. Branches that cannot reach the best cardinality, or cannot
    beat the best weight at that cardinality, are cut.
    """
    n = graph.n_left
    if n > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force limited to n_left <= {BRUTE_FORCE_LIMIT}, got {n}")
    # Lower bound on the weight the vertices from u onward can still add.
    lb = [0.0] * (n + 1)
    for u in range(n - 1, -1, -1):
        lb[u] = lb[u + 1] + min(0.0, min(graph.weights[u], default=0.0))

    best_card = -1
    best_weight = math.inf
    best_pairs: list[tuple[int, int]] = []
    used = [False] * graph.n_right
    chosen: list[tuple[int, int]] = []

    def rec(u: int, card: int, weight: float) -> None:
        nonlocal best_card, best_weight, best_pairs
        reachable = card + (n - u)
        if reachable < best_card:
            return
        if reachable == best_card and weight + lb[u] >= best_weight:
            return
        if u == n:
            if card > best_card or weight < best_weight:
                best_card, best_weight, best_pairs = card, weight, list(chosen)
            return
        for v, w in zip(graph.neighbors[u], graph.weights[u]):
            if not used[v]:
                used[v] = True
                chosen.append((u, v))
                rec(u + 1, card + 1, weight + w)
                chosen.pop()
                used[v] = False
        rec(u + 1, card, weight)

    rec(0, 0, 0.0)
    return _result(graph, best_pairs)


def sentinel_weight(graph: BipartiteGraph) -> float:
    """Padding cost that no real assignment can compete with."""
    return 1 + graph.n_right * (abs(graph.w_max) + abs(graph.w_min) + 1)


def hungarian(graph: BipartiteGraph) -> ExactResult:
    """Exact minimum-weight left-perfect matching in O(n^3).

    The instance is padded to ``n_right x n_right``: missing edges cost
    :func:`sentinel_weight`, dummy left rows cost 0. Shortest augmenting
    paths with vertex potentials.

    Raises:
        InfeasibleError: if the optimum needs a missing edge.
    """
    n_left, n = graph.n_left, graph.n_right
    if n_left > n:
        raise InfeasibleError(f"n_left={n_left} exceeds n_right={n}")
    if n_left == 0:
        return _result(graph, [])
    if graph.n_edges == 0:
        raise InfeasibleError("graph has no edges")
    big = sentinel_weight(graph)
    cost = [[0.0] * n for _ in range(n)]
    for u in range(n_left):
        row = cost[u]
        for v in range(n):
            row[v] = big
        for v, w in zip(graph.neighbors[u], graph.weights[u]):
            row[v] = w

    # 1-based arrays; index 0 is the virtual root of each augmentation.
    pot_row = [0.0] * (n + 1)
    pot_col = [0.0] * (n + 1)
    col_owner = [0] * (n + 1)
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        col_owner[0] = i
        j0 = 0
        minv = [math.inf] * (n + 1)
        done = [False] * (n + 1)
        while True:
            done[j0] = True
            i0 = col_owner[j0]
            delta = math.inf
            j1 = 0
            crow = cost[i0 - 1]
            pi = pot_row[i0]
            for j in range(1, n + 1):
                if not done[j]:
                    cur = crow[j - 1] - pi - pot_col[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if done[j]:
                    pot_row[col_owner[j]] += delta
                    pot_col[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if col_owner[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            col_owner[j0] = col_owner[j1]
            j0 = j1

    pairs = []
    for j in range(1, n + 1):
        u = col_owner[j] - 1
        if u < n_left:
            if not graph.has_edge(u, j - 1):
                raise InfeasibleError("no left-perfect matching exists")
            pairs.append((u, j - 1))
    pairs.sort()
    return _result(graph, pairs)


def exact(graph: BipartiteGraph) -> ExactResult:
    """Brute force when small enough, otherwise Hungarian."""
    if graph.n_left <= BRUTE_FORCE_LIMIT:
        return brute_force(graph)
    return hungarian(graph)
