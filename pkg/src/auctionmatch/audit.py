"""Executable checks of the auction's label invariants on solver traces.

Every check returns an :class:`AuditReport` instead of raising, so a caller
can run them all and print one verdict line each.

Inequalities whose two sides are equal in exact arithmetic are compared with
a rounding allowance of a few ulps at the magnitude of the terms involved
(:func:`rounding_slack`). The monotonicity check needs none: the solver
computes labels so that ``after >= before + epsilon`` holds exactly.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

from .auction import Matching, MoveRecord, SolveResult
from .graph import BipartiteGraph

ULP = 2.0**-52
SLACK_ULPS = 16
MAX_PATH_RIGHT = 12
MAX_PATHS = 2_000_000


def rounding_slack(*terms: float, steps: int = 1) -> float:
    scale = max([1.0, *(abs(t) for t in terms if math.isfinite(t))])
    return SLACK_ULPS * steps * ULP * scale


@dataclass(frozen=True)
class AuditReport:
    check: str
    passed: bool
    detail: str = ""
    move: Optional[int] = None
    exempt: int = 0  # pairs skipped because their left vertex has degree 1
    checked: int = 0
    incomparable: bool = False

    def verdict(self) -> str:
        if self.incomparable:
            return f"incomparable {self.check} {self.detail}"
        if self.passed:
            return f"ok {self.check}"
        return f"violation {self.check} {self.detail}"

    def __bool__(self) -> bool:
        return self.passed


class TraceMissingError(ValueError):
    pass


def alternating_distances(graph: BipartiteGraph, matching: Matching) -> list[float]:
    """Unweighted alternating-path distance from each right vertex to a free one.

    Free right vertices get 0. A vertex ``v`` owned by ``u`` gets
    ``2 + min d(v')`` over the other neighbors ``v'`` of ``u``; vertices with
    no such path get ``inf``. Distances are whole numbers stored as floats.
    """
    owner = matching.right_to_left
    mate = matching.left_to_right
    radj: list[list[int]] = [[] for _ in range(graph.n_right)]
    for u, nbrs in enumerate(graph.neighbors):
        for v in nbrs:
            radj[v].append(u)
    dist = [math.inf] * graph.n_right
    queue: deque[int] = deque()
    for v in range(graph.n_right):
        if owner[v] is None:
            dist[v] = 0
            queue.append(v)
    while queue:
        x = queue.popleft()
        for u in radj[x]:
            v = mate[u]
            if v is not None and v != x and dist[v] == math.inf:
                dist[v] = dist[x] + 2
                queue.append(v)
    return dist


def replay(
    graph: BipartiteGraph, trace: Sequence[MoveRecord]
) -> Iterator[tuple[MoveRecord, list[float], Matching]]:
    """Re-apply the moves of a trace, yielding the state after each one.

    The yielded label list and matching are updated in place; copy them to
    keep a snapshot.
    """
    labels = [0.0] * graph.n_right
    m = Matching.empty(graph.n_left, graph.n_right)
    for rec in trace:
        labels[rec.right] = rec.label_after
        m.right_to_left[rec.right] = rec.left
        m.left_to_right[rec.left] = rec.right
        if rec.displaced is not None:
            m.left_to_right[rec.displaced] = None
        yield rec, labels, m


def replay_state(
    graph: BipartiteGraph, trace: Sequence[MoveRecord]
) -> tuple[list[float], Matching]:
    labels = [0.0] * graph.n_right
    m = Matching.empty(graph.n_left, graph.n_right)
    for _, labels, m in replay(graph, trace):
        pass
    return list(labels), m.copy()


def state_before_last_move(
    graph: BipartiteGraph, result: SolveResult
) -> tuple[list[float], Matching]:
    """Labels and matching after move ``P - 1``.

    Undoes the final move; needs only ``result.last_move``, not a full trace.
    """
    labels = list(result.labels)
    m = result.matching.copy()
    rec = result.last_move
    if rec is None:
        return labels, m
    labels[rec.right] = rec.label_before
    m.left_to_right[rec.left] = None
    m.right_to_left[rec.right] = rec.displaced
    if rec.displaced is not None:
        m.left_to_right[rec.displaced] = rec.right
    return labels, m


def check_monotone(trace: Iterable[MoveRecord], epsilon: float) -> AuditReport:
    """Each move raises exactly one label, by at least ``epsilon`` unless locked."""
    current: dict[int, float] = {}
    n = 0
    for n, rec in enumerate(trace, start=1):
        if rec.index != n:
            return AuditReport("monotone", False, f"move {n}: record numbered {rec.index}", n)
        prev = current.get(rec.right, 0.0)
        if rec.label_before != prev:
            return AuditReport(
                "monotone", False,
                f"move {n}: label_before {rec.label_before!r} != replayed {prev!r}", n,
            )
        if rec.locked:
            ok = rec.label_after > rec.label_before
        else:
            ok = rec.label_after >= rec.label_before + epsilon
        if not ok:
            return AuditReport(
                "monotone", False,
                f"move {n}: label of right {rec.right + 1} went "
                f"{rec.label_before!r} -> {rec.label_after!r}", n,
            )
        current[rec.right] = rec.label_after
    return AuditReport("monotone", True, checked=n)


def _matched_violation(
    graph: BipartiteGraph, labels: Sequence[float], m: Matching, epsilon: float
) -> tuple[Optional[str], int, int]:
    exempt = checked = 0
    for u, v in enumerate(m.left_to_right):
        if v is None:
            continue
        nbrs = graph.neighbors[u]
        if len(nbrs) < 2:
            exempt += 1
            continue
        wu = graph.weights[u]
        w_uv = 0.0
        other = math.inf
        for x, w in zip(nbrs, wu):
            if x == v:
                w_uv = w
            else:
                val = labels[x] + w
                if val < other:
                    other = val
        rhs = other - w_uv + epsilon
        checked += 1
        if labels[v] > rhs + rounding_slack(labels[v], other, w_uv, epsilon):
            return (
                f"pair ({u + 1},{v + 1}): label {labels[v]!r} > bound {rhs!r}",
                exempt, checked,
            )
    return None, exempt, checked


def check_matched_inequality(
    graph: BipartiteGraph, trace: Optional[Sequence[MoveRecord]], epsilon: float
) -> AuditReport:
    """After every move, each matched ``(u, v)`` with ``deg(u) >= 2`` satisfies
    ``L(v) <= min_{v' != v} (L(v') + w(u, v')) - w(u, v) + epsilon``."""
    if trace is None:
        raise TraceMissingError("check_matched_inequality needs a trace")
    exempt = checked = 0
    for rec, labels, m in replay(graph, trace):
        bad, ex, ch = _matched_violation(graph, labels, m, epsilon)
        exempt, checked = max(exempt, ex), checked + ch
        if bad:
            return AuditReport("matched_inequality", False, f"move {rec.index}: {bad}", rec.index, exempt)
    return AuditReport("matched_inequality", True, exempt=exempt, checked=checked)


def check_state_inequality(
    graph: BipartiteGraph, labels: Sequence[float], matching: Matching, epsilon: float
) -> AuditReport:
    """The matched-edge inequality on a single state (no trace needed)."""
    bad, exempt, checked = _matched_violation(graph, labels, matching, epsilon)
    if bad:
        return AuditReport("matched_inequality", False, bad, None, exempt)
    return AuditReport("matched_inequality", True, exempt=exempt, checked=checked)


def check_path_inequality(
    graph: BipartiteGraph, labels: Sequence[float], matching: Matching, epsilon: float
) -> AuditReport:
    """Enumerate every simple alternating path ``v1, u2, v2, ..., uk, vk``
    that starts with an unmatched edge and check
    ``L(vk) <= L(v1) + sum(unmatched w) - sum(matched w) + (k - 1) * epsilon``.

    Raises:
        ValueError: for graphs with more than 12 right vertices, or when the
            number of paths exceeds ``MAX_PATHS``.
    """
    if graph.n_right > MAX_PATH_RIGHT:
        raise ValueError(f"path enumeration limited to n_right <= {MAX_PATH_RIGHT}")
    mate = matching.left_to_right
    radj: list[list[tuple[int, float]]] = [[] for _ in range(graph.n_right)]
    for u, (nbrs, ws) in enumerate(zip(graph.neighbors, graph.weights)):
        for v, w in zip(nbrs, ws):
            radj[v].append((u, w))
    w_matched = {u: graph.weight(u, v) for u, v in enumerate(mate) if v is not None}

    count = 0
    on_path = [False] * graph.n_right

    def walk(start: int, x: int, balance: float, steps: int, mags: float) -> Optional[str]:
        # balance = sum(unmatched) - sum(matched) along the path so far
        nonlocal count
        for u, w_in in radj[x]:
            v = mate[u]
            if v is None or v == x or on_path[v]:
                continue
            count += 1
            if count > MAX_PATHS:
                raise ValueError(f"more than {MAX_PATHS} alternating paths")
            b = balance + w_in - w_matched[u]
            mg = mags + abs(w_in) + abs(w_matched[u]) + epsilon
            bound = labels[start] + b + (steps + 1) * epsilon
            if labels[v] > bound + rounding_slack(labels[v], labels[start], mg, steps=steps + 1):
                names = f"from right {start + 1} to right {v + 1} ({steps + 1} matched edges)"
                return f"path {names}: label {labels[v]!r} > bound {bound!r}"
            on_path[v] = True
            bad = walk(start, v, b, steps + 1, mg)
            on_path[v] = False
            if bad:
                return bad
        return None

    for s in range(graph.n_right):
        on_path[s] = True
        bad = walk(s, s, 0.0, 0, 0.0)
        on_path[s] = False
        if bad:
            return AuditReport("path_inequality", False, bad)
    return AuditReport("path_inequality", True, checked=count)


def distance_bound_violation(
    graph: BipartiteGraph, labels: Sequence[float], matching: Matching, epsilon: float
) -> tuple[Optional[str], list[float]]:
    dist = alternating_distances(graph, matching)
    spread = graph.w_max - graph.w_min + epsilon if graph.n_edges else epsilon
    for v, d in enumerate(dist):
        if d == math.inf:
            continue
        bound = d / 2 * spread
        if labels[v] > bound + rounding_slack(labels[v], bound, steps=max(1, int(d))):
            return f"right {v + 1}: label {labels[v]!r} > {bound!r} at distance {int(d)}", dist
    return None, dist


def check_distance_bound(
    graph: BipartiteGraph, trace: Optional[Sequence[MoveRecord]], epsilon: float
) -> AuditReport:
    """After move ``P - 1``, ``L(v) <= d(v)/2 * (w_max - w_min + epsilon)``
    for every right vertex at finite alternating distance ``d(v)``."""
    if trace is None:
        raise TraceMissingError("check_distance_bound needs a trace")
    labels, m = replay_state(graph, trace[:-1])
    bad, dist = distance_bound_violation(graph, labels, m, epsilon)
    if bad:
        return AuditReport("distance_bound", False, f"after move {len(trace) - 1}: {bad}", len(trace) - 1)
    return AuditReport("distance_bound", True, checked=sum(d != math.inf for d in dist))


def check_epsilon_optimal(
    graph: BipartiteGraph, result: SolveResult, oracle_result, epsilon: float
) -> AuditReport:
    """``total_weight <= optimum + n_left * epsilon`` for left-perfect results."""
    if result.discarded or oracle_result.cardinality != graph.n_left:
        return AuditReport(
            "epsilon_optimal", False,
            f"{len(result.discarded)} discarded, "
            f"oracle cardinality {oracle_result.cardinality} of {graph.n_left}",
            incomparable=True,
        )
    bound = oracle_result.optimum_weight + graph.n_left * epsilon
    scale = graph.n_left * max(abs(graph.w_max), abs(graph.w_min), epsilon) if graph.n_edges else 1.0
    if result.total_weight > bound + rounding_slack(scale, steps=max(1, graph.n_left)):
        return AuditReport(
            "epsilon_optimal", False,
            f"weight {result.total_weight!r} > optimum {oracle_result.optimum_weight!r} "
            f"+ {graph.n_left}*{epsilon!r}",
        )
    return AuditReport("epsilon_optimal", True, checked=1)

