"""Independent brute-force references used by the test and verify suites.

Nothing here calls the matching or peeling code it is meant to check.
"""

from __future__ import annotations

import math
from itertools import combinations

import mpmath
import numpy as np

from .graphs import AdjGraph, ProcessTrace


def _tail_mp(k: int, mu: float, terms: int):
    m = mpmath.mpf(mu)
    term = mpmath.e ** (-m) * m**k / mpmath.factorial(k)
    total = mpmath.mpf(0)
    for i in range(k, k + terms):
        total += term
        term *= m / (i + 1)
    return total


def upper_tail_mp(k: int, mu: float, terms: int = 2000, dps: int = 40) -> float:
    """P(Poisson(mu) >= k) by a direct ``terms``-term sum from k in extended
    precision.  Accurate while k + terms lies well past mu."""
    if k <= 0:
        return 1.0
    with mpmath.workdps(dps):
        return float(_tail_mp(k, mu, terms))


def log_upper_tail_mp(k: int, mu: float, terms: int = 2000, dps: int = 40) -> float:
    """log of ``upper_tail_mp``, usable where the tail underflows a double."""
    if k <= 0:
        return 0.0
    with mpmath.workdps(dps):
        return float(mpmath.log(_tail_mp(k, mu, terms)))


def regular_subgraph_sizes(g: AdjGraph, k: int) -> set[int]:
    """Sizes |S| of every vertex set carrying a k-regular subgraph.

    Exhaustive search over edge subsets: edges are decided in order, a vertex
    may take at most k edges, and once all edges at a vertex are decided its
    degree must be 0 or k.
    """
    edges = [tuple(e) for e in g.edges().tolist()]
    n = g.n
    last = [-1] * n
    for i, (u, v) in enumerate(edges):
        last[u] = i
        last[v] = i
    closing = [[] for _ in edges]
    for v in range(n):
        if last[v] >= 0:
            closing[last[v]].append(v)
    remaining = list(g.degrees.tolist())
    deg = [0] * n
    found: set[int] = set()

    def rec(i: int, used: int) -> None:
        if i == len(edges):
            if used:
                found.add(sum(1 for d in deg if d == k))
            return
        u, v = edges[i]
        remaining[u] -= 1
        remaining[v] -= 1
        for take in (True, False):
            if take:
                if deg[u] >= k or deg[v] >= k:
                    continue
                deg[u] += 1
                deg[v] += 1
            ok = all(deg[w] in (0, k) for w in closing[i])
            # a vertex already started must still be able to reach k
            ok = ok and all(deg[w] == 0 or deg[w] + remaining[w] >= k for w in (u, v))
            if ok:
                rec(i + 1, used + take)
            if take:
                deg[u] -= 1
                deg[v] -= 1
        remaining[u] += 1
        remaining[v] += 1

    rec(0, 0)
    return found


def has_k_factor_brute(g: AdjGraph, k: int) -> bool:
    return g.n in regular_subgraph_sizes(g, k)


def max_regular_brute(g: AdjGraph, k: int) -> int | None:
    sizes = regular_subgraph_sizes(g, k)
    return max(sizes) if sizes else None


def first_cycle_step(trace: ProcessTrace) -> int:
    """Index of the first edge of the process that closes a cycle (union-find)."""
    parent = list(range(trace.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    u, v = trace.endpoints
    for i, (a, b) in enumerate(zip(u.tolist(), v.tolist()), start=1):
        ra, rb = find(a), find(b)
        if ra == rb:
            return i
        parent[ra] = rb
    raise ValueError("the process never closes a cycle")


def perfect_matchings(points: list[int]):
    """All perfect matchings of a list of points, as tuples of index pairs."""
    if not points:
        yield ()
        return
    a = points[0]
    for j in range(1, len(points)):
        rest = points[1:j] + points[j + 1:]
        for m in perfect_matchings(rest):
            yield ((a, points[j]),) + m


def pairing_law(degrees) -> dict[tuple, float]:
    """Exact law of the projected multigraph (sorted edge multiset) of a pairing."""
    owner = np.repeat(np.arange(len(degrees)), degrees).tolist()
    law: dict[tuple, float] = {}
    count = 0
    for m in perfect_matchings(list(range(len(owner)))):
        key = tuple(sorted(tuple(sorted((owner[a], owner[b]))) for a, b in m))
        law[key] = law.get(key, 0) + 1
        count += 1
    return {key: c / count for key, c in law.items()}


def multi_law(n: int, M: int, k: int) -> dict[tuple, float]:
    """Multi(n, M, k) by enumeration: P(d) proportional to prod 1/d_i!."""
    from .degree_sequences import enumerate_sequences

    seqs = list(enumerate_sequences(n, M, k))
    logw = np.array([-sum(math.lgamma(x + 1) for x in d) for d in seqs])
    w = np.exp(logw - logw.max())
    w /= w.sum()
    return dict(zip(seqs, w.tolist()))


def dense_sets_brute(g: AdjGraph, k: int, smax: int) -> list[tuple[int, ...]]:
    """Every vertex set of size 1..smax spanning at least k|S|/2 edges."""
    out = []
    adj = [set(nb) for nb in g.adj]
    for s in range(1, smax + 1):
        for S in combinations(range(g.n), s):
            e = sum(1 for i, u in enumerate(S) for v in S[i + 1:] if v in adj[u])
            if 2 * e >= k * s:
                out.append(S)
    return out
