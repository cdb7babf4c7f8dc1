"""Edmonds' blossom algorithm for maximum matching in general graphs.

Searches grow one alternating tree at a time from a free root.  Blossoms are
contracted through a union-find over bases, so a contraction costs the length
of the two paths to the common ancestor.  When a search fails, every vertex of
its (Hungarian) tree is retired: no later augmenting path can use it, which
keeps the total cost of failed searches linear in the graph size.
"""

from __future__ import annotations

from collections import deque

_FREE, _EVEN, _ODD = 0, 1, 2


class _Search:
    def __init__(self, adj: list[list[int]], match: list[int]):
        n = len(adj)
        self.adj = adj
        self.match = match
        self.parent = [-1] * n
        self.label = [_FREE] * n
        self.dsu = list(range(n))
        self.stamp = [0] * n
        self.clock = 0
        self.dead = [False] * n
        self.tree: list[int] = []

    def _find(self, x: int) -> int:
        dsu = self.dsu
        root = x
        while dsu[root] != root:
            root = dsu[root]
        while dsu[x] != root:
            dsu[x], x = root, dsu[x]
        return root

    def _reset(self) -> None:
        for v in self.tree:
            self.parent[v] = -1
            self.label[v] = _FREE
            self.dsu[v] = v
        self.tree = []

    def _lca(self, a: int, b: int) -> int:
        self.clock += 1
        c = self.clock
        match, parent, stamp, find = self.match, self.parent, self.stamp, self._find
        while True:
            a = find(a)
            stamp[a] = c
            if match[a] == -1:
                break
            a = parent[match[a]]
        while True:
            b = find(b)
            if stamp[b] == c:
                return b
            b = parent[match[b]]

    def _shrink(self, x: int, b: int, child: int, q: deque, merged: list[int]) -> None:
        # walk from even vertex x up to base b; odd vertices on the way turn even.
        # Bases are merged by the caller afterwards: merging here would cut the
        # walk short inside a sub-blossom.
        match, parent, label, find = self.match, self.parent, self.label, self._find
        while find(x) != b:
            y = match[x]
            parent[x] = child
            child = y
            if label[y] == _ODD:
                label[y] = _EVEN
                q.append(y)
            merged.append(find(x))
            merged.append(find(y))
            x = parent[y]

    def augment_from(self, root: int) -> bool:
        self._reset()
        adj, match, parent, label, dead = self.adj, self.match, self.parent, self.label, self.dead
        find, tree = self._find, self.tree
        label[root] = _EVEN
        tree.append(root)
        q = deque([root])
        while q:
            v = q.popleft()
            for to in adj[v]:
                if dead[to] or match[v] == to:
                    continue
                lt = label[to]
                if lt == _EVEN:
                    bv, bt = find(v), find(to)
                    if bv == bt:
                        continue
                    b = self._lca(v, to)
                    merged: list[int] = []
                    self._shrink(v, b, to, q, merged)
                    self._shrink(to, b, v, q, merged)
                    dsu = self.dsu
                    for r in merged:
                        dsu[r] = b
                elif lt == _FREE:
                    parent[to] = v
                    label[to] = _ODD
                    tree.append(to)
                    w = match[to]
                    if w == -1:
                        self._flip(to)
                        return True
                    label[w] = _EVEN
                    tree.append(w)
                    q.append(w)
        for v in tree:
            dead[v] = True
        return False

    def _flip(self, v: int) -> None:
        match, parent = self.match, self.parent
        while v != -1:
            pv = parent[v]
            nxt = match[pv]
            match[v] = pv
            match[pv] = v
            v = nxt


def greedy_matching(adj: list[list[int]]) -> list[int]:
    match = [-1] * len(adj)
    for v, nb in enumerate(adj):
        if match[v] == -1:
            for u in nb:
                if match[u] == -1 and u != v:
                    match[v] = u
                    match[u] = v
                    break
    return match


def maximum_matching(adj: list[list[int]], match: list[int] | None = None,
                     stop_on_failure: bool = False) -> tuple[list[int], bool]:
    """Grow ``match`` (mate array, -1 = free) to a maximum matching.

    Returns (match, perfect).  A free vertex with no augmenting path stays free
    in every maximum matching, so with ``stop_on_failure`` the search ends at
    the first such vertex and the matching returned is then not maximum.
    """
    match = greedy_matching(adj) if match is None else list(match)
    search = _Search(adj, match)
    perfect = True
    for r in range(len(adj)):
        if match[r] != -1 or search.dead[r]:
            continue
        if not search.augment_from(r):
            perfect = False
            if stop_on_failure:
                break
    return match, perfect


def is_matching(adj: list[list[int]], match: list[int]) -> bool:
    for v, u in enumerate(match):
        if u != -1 and (match[u] != v or u not in adj[v]):
            return False
    return True
