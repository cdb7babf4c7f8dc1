"""k-cores, k-factors, k-regular subgraphs and the process hitting time m_k."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .graphs import AdjGraph, Multigraph, ProcessTrace, format_graph, pair_count
from .matching import maximum_matching

EXACT_CORE_LIMIT = 26
EXACT_DENSE_LIMIT = 20
DEFAULT_EPS0 = 1.0 / (30.0 * math.e**5)


class SizeLimitError(ValueError):
    pass


@dataclass(frozen=True)
class CoreResult:
    vertices: np.ndarray  # sorted
    edges: int
    peel_order: np.ndarray

    @property
    def size(self) -> int:
        return int(self.vertices.size)


@dataclass(frozen=True)
class RegularWitness:
    vertices: np.ndarray  # sorted
    edges: np.ndarray  # (k|S|/2, 2), u < v, sorted

    @property
    def size(self) -> int:
        return int(self.vertices.size)

    def check(self, g: AdjGraph, k: int) -> bool:
        """Every vertex of S has exactly k witness edges, all of them edges of g."""
        e = self.edges
        if e.shape[0] * 2 != k * self.size:
            return False
        if not all(g.has_edge(int(u), int(v)) for u, v in e):
            return False
        deg = np.bincount(e.ravel(), minlength=g.n)
        inside = np.zeros(g.n, dtype=bool)
        inside[self.vertices] = True
        return bool(np.all(deg[inside] == k) and np.all(deg[~inside] == 0))

    def format(self, n: int) -> str:
        text = format_graph(AdjGraph.from_edges(n, self.edges))
        return text + "S: " + " ".join(map(str, self.vertices.tolist())) + "\n"


@dataclass(frozen=True)
class HittingReport:
    k: int
    m_lower: int
    m_upper: int
    method: str  # "exact" or "bracketed"
    core_size: int
    witness_size: int

    def __post_init__(self):
        if not self.m_lower < self.m_upper:
            raise ValueError("m_lower must be below m_upper")


# -- cores ------------------------------------------------------------------

def k_core(g: AdjGraph, k: int) -> CoreResult:
    """Maximal induced subgraph of minimum degree >= k, by peeling.

    Vertices are removed in rounds (every vertex below k at once); the peel
    order lists the rounds in sequence, each sorted.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    deg = g.degrees.copy()
    alive = np.ones(g.n, dtype=bool)
    order = []
    bad = np.flatnonzero(deg < k)
    while bad.size:
        alive[bad] = False
        order.append(bad)
        starts, stops = g.indptr[bad], g.indptr[bad + 1]
        lens = stops - starts
        idx = np.repeat(starts - np.cumsum(lens) + lens, lens) + np.arange(lens.sum())
        nb = g.indices[idx]
        nb = nb[alive[nb]]
        if nb.size == 0:
            break
        np.subtract.at(deg, nb, 1)
        cand = np.unique(nb)
        bad = cand[deg[cand] < k]
    verts = np.flatnonzero(alive)
    return CoreResult(
        vertices=verts,
        edges=int(deg[verts].sum()) // 2,
        peel_order=np.concatenate(order) if order else np.zeros(0, dtype=np.int64),
    )


def _core_of(adj: list[list[int]], k: int, allowed: set[int]) -> set[int]:
    """k-core of the subgraph induced on ``allowed`` (plain Python, small graphs)."""
    alive = set(allowed)
    deg = {v: sum(1 for u in adj[v] if u in alive) for v in alive}
    stack = [v for v in alive if deg[v] < k]
    gone = set(stack)
    while stack:
        v = stack.pop()
        for u in adj[v]:
            if u in alive and u not in gone:
                deg[u] -= 1
                if deg[u] < k:
                    gone.add(u)
                    stack.append(u)
    return alive - gone


# -- k-factors --------------------------------------------------------------

def _factor_matching(g: AdjGraph, k: int, stop_on_failure: bool):
    """Tutte gadget matching.  Returns (perfect, factor edges, vertices left short)."""
    n = g.n
    if n and int(g.degrees.min()) < k:
        raise ValueError("gadget needs minimum degree >= k")
    deg = g.degrees.tolist()
    adjv = g.adj
    # external node for each (v, i-th neighbour); then d(v) - k internal nodes per v
    ext_start = [0] * (n + 1)
    for v in range(n):
        ext_start[v + 1] = ext_start[v] + deg[v]
    n_ext = ext_start[n]
    int_start = [0] * (n + 1)
    for v in range(n):
        int_start[v + 1] = int_start[v] + deg[v] - k
    total = n_ext + int_start[n]
    adj: list[list[int]] = [[] for _ in range(total)]
    # position of u in v's list, to find the twin external node
    pos = [dict(zip(adjv[v], range(deg[v]))) for v in range(n)]
    for v in range(n):
        ints = range(n_ext + int_start[v], n_ext + int_start[v + 1])
        base = ext_start[v]
        for i, u in enumerate(adjv[v]):
            a = base + i
            adj[a].append(ext_start[u] + pos[u][v])
            adj[a].extend(ints)
        for b in ints:
            adj[b].extend(range(base, base + deg[v]))

    # start from a greedy partial k-factor: every chosen edge pairs two external
    # nodes, and the unchosen external nodes of v fill its internal nodes
    match = [-1] * total
    load = [0] * n
    for v in range(n):
        for i, u in enumerate(adjv[v]):
            if u > v and load[v] < k and load[u] < k:
                a, b = ext_start[v] + i, ext_start[u] + pos[u][v]
                match[a], match[b] = b, a
                load[v] += 1
                load[u] += 1
    for v in range(n):
        free_int = list(range(n_ext + int_start[v], n_ext + int_start[v + 1]))
        for a in range(ext_start[v], ext_start[v + 1]):
            if not free_int:
                break
            if match[a] == -1:
                b = free_int.pop()
                match[a], match[b] = b, a

    match, perfect = maximum_matching(adj, match, stop_on_failure)
    edges = []
    short = set()
    for v in range(n):
        for i, u in enumerate(adjv[v]):
            a = ext_start[v] + i
            if match[a] == -1:
                short.add(v)
            elif u > v and match[a] == ext_start[u] + pos[u][v]:
                edges.append((v, u))
        for b in range(n_ext + int_start[v], n_ext + int_start[v + 1]):
            if match[b] == -1:
                short.add(v)
    return perfect, edges, short


def has_k_factor(g: AdjGraph, k: int) -> RegularWitness | None:
    """A spanning k-regular subgraph of g, or None when there is none."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if g.n == 0 or (k * g.n) % 2 or int(g.degrees.min()) < k:
        return None
    perfect, edges, _ = _factor_matching(g, k, stop_on_failure=True)
    if not perfect:
        return None
    return RegularWitness(np.arange(g.n), np.array(sorted(edges), dtype=np.int64).reshape(-1, 2))


def _lift(sub_witness: RegularWitness, labels: np.ndarray) -> RegularWitness:
    e = labels[sub_witness.edges]
    e = np.sort(e, axis=1)
    e = e[np.lexsort((e[:, 1], e[:, 0]))]
    return RegularWitness(np.sort(labels[sub_witness.vertices]), e)


def _factor_on(g: AdjGraph, k: int, vertices) -> RegularWitness | None:
    sub, labels = g.induced(sorted(vertices))
    w = has_k_factor(sub, k)
    return None if w is None else _lift(w, labels)


def _small_k_witness(g: AdjGraph, k: int, core: CoreResult) -> RegularWitness | None:
    # k = 1: any edge; k = 2: any cycle, and the 2-core is nonempty iff one exists
    if core.size == 0:
        return None
    if k == 1:
        v = int(core.vertices[0])
        u = int(g.neighbors(v)[0])
        return RegularWitness(np.array(sorted((u, v))), np.array([sorted((u, v))]))
    inside = np.zeros(g.n, dtype=bool)
    inside[core.vertices] = True
    start = int(core.vertices[0])
    path, seen = [start], {start: 0}
    prev, cur = -1, start
    while True:
        nxt = next(int(u) for u in g.neighbors(cur) if inside[u] and u != prev)
        if nxt in seen:
            cyc = path[seen[nxt]:]
            break
        seen[nxt] = len(path)
        path.append(nxt)
        prev, cur = cur, nxt
    e = np.sort(np.array([(cyc[i], cyc[(i + 1) % len(cyc)]) for i in range(len(cyc))]), axis=1)
    return RegularWitness(np.array(sorted(cyc)), e[np.lexsort((e[:, 1], e[:, 0]))])


def find_k_regular(g: AdjGraph, k: int, mode: str = "exact",
                   maximum: bool = True, max_rounds: int = 200) -> RegularWitness | None:
    """Search for a k-regular subgraph of g.

    exact: returns a largest witness, the lexicographically smallest vertex set
    among those, or None when no k-regular subgraph exists (``maximum=False``
    returns any witness).  Needs a k-core of at most 26 vertices.

    heuristic: tries the (k+1)-core, the k-core, then repeatedly deletes the
    vertices the matching leaves short and re-peels.  None means inconclusive.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if mode not in ("exact", "heuristic"):
        raise ValueError(f"unknown mode {mode!r}")
    core = k_core(g, k)
    if mode == "exact":
        if core.size > EXACT_CORE_LIMIT:
            raise SizeLimitError(f"k-core has {core.size} > {EXACT_CORE_LIMIT} vertices")
        return _exact_search(g, k, core, maximum)
    if k <= 2:
        return _small_k_witness(g, k, core)
    if core.size == 0:
        return None
    upper = k_core(g, k + 1)
    if upper.size:
        w = _factor_on(g, k, upper.vertices)
        if w is not None:
            return w
    current = core.vertices
    for _ in range(max_rounds):
        sub, labels = g.induced(current)
        if (k * sub.n) % 2 == 0:
            perfect, edges, short = _factor_matching(sub, k, stop_on_failure=False)
            if perfect:
                return _lift(RegularWitness(np.arange(sub.n), np.array(sorted(edges)).reshape(-1, 2)),
                             labels)
            gone = _cheapest_deletions(sub, k, sorted(short))
        else:
            # odd k and odd order: no factor, so drop the cheapest odd-sized cascade
            gone = _cheapest_deletions(sub, k, range(sub.n), odd_only=True)
        keep = np.ones(sub.n, dtype=bool)
        keep[list(gone)] = False
        rest, rest_labels = sub.induced(np.flatnonzero(keep))
        nxt = k_core(rest, k).vertices
        if nxt.size == 0:
            return None
        current = labels[rest_labels[nxt]]
    return None


def _cascade(adj, deg, k: int, v: int, cap: int) -> set[int] | None:
    """Vertices lost when v is deleted and the k-core restored; None past ``cap``."""
    lost = {v}
    stack = [v]
    dec: dict[int, int] = {}
    while stack:
        x = stack.pop()
        for u in adj[x]:
            if u in lost:
                continue
            dec[u] = dec.get(u, 0) + 1
            if deg[u] - dec[u] < k:
                lost.add(u)
                if len(lost) > cap:
                    return None
                stack.append(u)
    return lost


def _cheapest_deletions(sub: AdjGraph, k: int, cands, odd_only: bool = False) -> set[int]:
    # deleting a vertex can peel a long chain of degree-k vertices, so take the
    # cheapest cascades (up to twice the smallest), pairwise far apart
    adj, deg = sub.adj, sub.degrees.tolist()
    cap = 8
    while True:
        costs = []
        for v in cands:
            lost = _cascade(adj, deg, k, v, cap)
            if lost is not None and (len(lost) % 2 or not odd_only):
                costs.append((len(lost), v, lost))
        if costs or cap >= sub.n:
            break
        cap *= 4
    if not costs:
        return set(range(sub.n))
    costs.sort(key=lambda t: (t[0], t[1]))
    if odd_only:
        return costs[0][2]
    limit = 2 * costs[0][0]
    gone: set[int] = set()
    touched: set[int] = set()
    for size, _, lost in costs:
        if size > limit:
            break
        nb = {u for x in lost for u in adj[x]}
        if (lost | nb) & touched:
            continue
        gone |= lost
        touched |= lost | nb
    return gone


def _exact_search(g: AdjGraph, k: int, core: CoreResult, maximum: bool) -> RegularWitness | None:
    if core.size == 0:
        return None
    adj = g.adj
    verts = core.vertices.tolist()

    def try_set(s):
        return _factor_on(g, k, s)

    if not maximum:
        def dfs(included: frozenset, excluded: frozenset):
            u = _core_of(adj, k, set(verts) - excluded)
            if not included <= u or not u:
                return None
            w = try_set(u)
            if w is not None:
                return w
            free = sorted(u - included)
            if not free:
                return None
            v = free[0]
            return dfs(included | {v}, excluded) or dfs(included, excluded | {v})

        return dfs(frozenset(), frozenset())

    def sized(t: int, included: frozenset, excluded: frozenset):
        # include-first over sorted vertices visits equal-size sets in lex order
        u = _core_of(adj, k, set(verts) - excluded)
        if len(u) < t or len(included) > t or not included <= u:
            return None
        if len(u) == t:
            return try_set(u)
        v = min(u - included)
        return sized(t, included | {v}, excluded) or sized(t, included, excluded | {v})

    for t in range(core.size, k, -1):
        if (k * t) % 2:
            continue
        w = sized(t, frozenset(), frozenset())
        if w is not None:
            return w
    return None


# -- hitting time -----------------------------------------------------------

def hitting_time(trace: ProcessTrace, k: int, mode: str = "heuristic") -> HittingReport:
    """Bracket m_k, the first step whose graph has a k-regular subgraph.

    The k-core is monotone in m, so the last step with an empty core is found
    by bisection; no k-regular subgraph exists before it.  Detection above it
    is also bisected: exactly when detection is exact (mode "exact", or
    k <= 2 where a nonempty k-core already contains a witness), otherwise the
    upper end is a step at which a witness was actually found.
    """
    from .graphs import prefix_graph

    if mode not in ("exact", "heuristic"):
        raise ValueError(f"unknown mode {mode!r}")
    n = trace.n
    if mode == "exact" and n > EXACT_CORE_LIMIT:
        raise SizeLimitError(f"exact hitting time needs n <= {EXACT_CORE_LIMIT}")
    N = pair_count(n)

    def core_nonempty(m):
        return k_core(prefix_graph(trace, m), k).size > 0

    # largest m with an empty core: gallop up from m = 1, then bisect
    lo, hi = 0, 1
    while not core_nonempty(hi):
        if hi == N:
            raise ValueError(f"the complete graph on {n} vertices has no {k}-core")
        lo, hi = hi, min(N, 2 * hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if core_nonempty(mid):
            hi = mid
        else:
            lo = mid
    m_empty = lo

    def detect(m):
        return find_k_regular(prefix_graph(trace, m), k, mode, maximum=False)

    exact = mode == "exact" or k <= 2
    # gallop to a step with a witness, then bisect between the last miss and it
    miss, step, m = m_empty, 1, m_empty + 1
    w = detect(m)
    while w is None:
        miss = m
        if m == N:
            raise RuntimeError("no witness found even in the complete graph")
        step *= 2
        m = min(N, m_empty + step)
        w = detect(m)
    hit, best = m, w
    while hit - miss > 1:
        mid = (miss + hit) // 2
        wm = detect(mid)
        if wm is None:
            miss = mid
        else:
            hit, best = mid, wm
    core = k_core(prefix_graph(trace, hit), k)
    if exact:
        return HittingReport(k, hit - 1, hit, "exact", core.size, best.size)
    return HittingReport(k, m_empty, hit, "bracketed", core.size, best.size)


# -- property B -------------------------------------------------------------

def property_b_count(g: AdjGraph, k: int) -> int:
    """Vertices of degree >= k+1 all of whose neighbours have degree exactly k."""
    deg = g.degrees
    src = np.repeat(np.arange(g.n), deg)
    off = np.bincount(src, weights=(deg[g.indices] != k), minlength=g.n)
    return int(np.count_nonzero((deg >= k + 1) & (off == 0)))


def property_b_count_pairing(mg: Multigraph, k: int) -> int:
    """Pairing-model count: vertices of degree exactly k+1 joined by k+1 edges to
    k+1 distinct vertices of degree k (no loops), the event the expectation counts."""
    deg = mg.degrees
    e = mg.edges
    src = np.concatenate([e[:, 0], e[:, 1]])
    dst = np.concatenate([e[:, 1], e[:, 0]])
    sel = deg[src] == k + 1
    src, dst = src[sel], dst[sel]
    bad = (dst == src) | (deg[dst] != k)
    order = np.lexsort((dst, src))
    s, d = src[order], dst[order]
    rep = np.zeros(s.size, dtype=bool)
    rep[1:] = (s[1:] == s[:-1]) & (d[1:] == d[:-1])
    bad_v = np.zeros(mg.n, dtype=bool)
    bad_v[src[bad]] = True
    bad_v[s[rep]] = True
    return int(np.count_nonzero((deg == k + 1) & ~bad_v))


def expected_property_b(n_k: int, n_k1: int, M: int, k: int) -> float:
    """n_{k+1} C(n_k, k+1) k^{k+1} (k+1)! prod_{i=0}^{k} 1/(M - 1 - 2i)."""
    if M <= 2 * k + 2:
        raise ValueError(f"M={M} must exceed 2k+2={2 * k + 2}")
    if n_k1 == 0 or n_k < k + 1:
        return 0.0
    log_binom = gammaln(n_k + 1) - gammaln(k + 2) - gammaln(n_k - k)
    log_val = (
        math.log(n_k1) + log_binom + (k + 1) * math.log(k) + gammaln(k + 2)
        - sum(math.log(M - 1 - 2 * i) for i in range(k + 1))
    )
    return float(math.exp(log_val))


# -- small dense sets -------------------------------------------------------

def _subset_edge_counts(g: AdjGraph) -> np.ndarray:
    """e(S) for every subset S of [n] encoded as a bitmask."""
    n = g.n
    nbmask = np.zeros(n, dtype=np.uint64)
    for v in range(n):
        for u in g.neighbors(v):
            nbmask[v] |= np.uint64(1) << np.uint64(u)
    counts = np.zeros(1 << n, dtype=np.int32)
    for v in range(n):
        size = 1 << v
        low = np.arange(size, dtype=np.uint64)
        counts[size:2 * size] = counts[:size] + np.bitwise_count(low & nbmask[v])
    return counts


def dense_small_set(g: AdjGraph, k: int, eps0: float = DEFAULT_EPS0,
                    mode: str = "exact") -> np.ndarray | None:
    """A vertex set S with 1 <= |S| <= eps0 n spanning at least k|S|/2 edges.

    exact (n <= 20) returns the smallest such set, first in bitmask order, or
    None.  sampled peels min-degree vertices greedily and checks each
    intermediate set of admissible size; None there is inconclusive.
    """
    if mode not in ("exact", "sampled"):
        raise ValueError(f"unknown mode {mode!r}")
    smax = int(math.floor(eps0 * g.n))
    if smax < 1 or g.m == 0:
        return None
    if mode == "exact":
        if g.n > EXACT_DENSE_LIMIT:
            raise SizeLimitError(f"exact search needs n <= {EXACT_DENSE_LIMIT}")
        counts = _subset_edge_counts(g)
        sizes = np.bitwise_count(np.arange(1 << g.n, dtype=np.uint64)).astype(np.int64)
        hit = (sizes >= 1) & (sizes <= smax) & (2 * counts >= k * sizes)
        masks = np.flatnonzero(hit)
        if masks.size == 0:
            return None
        best = masks[np.argmin(sizes[masks] * (1 << g.n) + masks)]
        return np.array([v for v in range(g.n) if best >> v & 1])
    return _greedy_dense(g, k, smax)


def _greedy_dense(g: AdjGraph, k: int, smax: int) -> np.ndarray | None:
    # peel from each component of the (ceil(k/2))-core, since a set of average
    # degree >= k contains one of minimum degree >= k/2
    adj = g.adj
    pool = set(k_core(g, (k + 1) // 2).vertices.tolist())
    while pool:
        seed = min(pool)
        comp, stack = {seed}, [seed]
        while stack:
            v = stack.pop()
            for u in adj[v]:
                if u in pool and u not in comp:
                    comp.add(u)
                    stack.append(u)
        pool -= comp
        alive = set(comp)
        deg = {v: sum(1 for u in adj[v] if u in alive) for v in alive}
        edges = sum(deg.values()) // 2
        while alive:
            s = len(alive)
            if s <= smax and 2 * edges >= k * s:
                return np.array(sorted(alive))
            v = min(alive, key=lambda x: (deg[x], x))
            alive.remove(v)
            for u in adj[v]:
                if u in alive:
                    deg[u] -= 1
                    edges -= 1
    return None


def dense_set_bound(n: int, smax: int, k: int = 3) -> float:
    """sum_{s=k+1}^{smax} (27 e^5 s / n)^{s/2}; smaller sets cannot be dense enough."""
    return float(sum((27 * math.e**5 * s / n) ** (s / 2) for s in range(k + 1, smax + 1)))
