"""Literal, recursive, exact-arithmetic replay of the matching procedure.

Independent of ``auctionmatch.auction``: dict-based state, Fraction labels,
recursion instead of a loop, and the label update written as
``second - w(u, v) + eps``. Used to derive expected values for small cases.
"""

from fractions import Fraction


def run(n_right, adj, eps, order=None):
    """``adj[u]`` is a list of ``(v, w)``; returns (labels, owner, moves, discarded)."""
    eps = Fraction(eps)
    ws = [Fraction(w) for row in adj for _, w in row]
    cap = Fraction(n_right, 2) * (max(ws) - min(ws) + eps)
    L = {v: Fraction(0) for v in range(n_right)}
    T = {}
    log = []
    discarded = []

    def match_vertex(u):
        if not adj[u]:
            discarded.append(u)
            return
        scored = sorted((L[v] + Fraction(w), v, Fraction(w)) for v, w in adj[u])
        best_val, v, w = scored[0]
        if L[v] > cap:
            discarded.append(u)
            return
        before = L[v]
        if len(scored) == 1:
            L[v] = cap + eps
        else:
            L[v] = min(L[x] + Fraction(wx) for x, wx in adj[u] if x != v) - w + eps
        y = T.get(v)
        T[v] = u
        log.append((u, v, before, L[v], y))
        if y is not None:
            match_vertex(y)

    for u in order if order is not None else range(len(adj)):
        match_vertex(u)
    return L, T, log, discarded
