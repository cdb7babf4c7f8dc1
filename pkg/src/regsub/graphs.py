"""Graph containers and random graph generators.

Vertices are 0-based.  ``AdjGraph`` is a simple undirected graph in CSR form
(sorted neighbour lists); ``Multigraph`` is a raw edge list from the pairing
model and may contain loops and repeated edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .degree_sequences import DegreeSequence, sample_sequence


class NotSimpleError(ValueError):
    pass


class TriesExhaustedError(RuntimeError):
    def __init__(self, tries: int):
        self.tries = tries
        super().__init__(f"no simple graph after {tries} attempts")


def pair_count(n: int) -> int:
    return n * (n - 1) // 2


def pair_index(u: np.ndarray, v: np.ndarray, n: int) -> np.ndarray:
    """Row-major index of the pair {u, v}, u != v, among all C(n, 2) pairs."""
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    a, b = np.minimum(u, v), np.maximum(u, v)
    return a * (2 * n - a - 1) // 2 + (b - a - 1)


def pair_from_index(t: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of ``pair_index``."""
    t = np.asarray(t, dtype=np.int64)
    # row a holds indices [a(2n-a-1)/2, (a+1)(2n-a-2)/2)
    disc = (2 * n - 1) ** 2 - 8 * t.astype(np.float64)
    a = np.floor(((2 * n - 1) - np.sqrt(np.maximum(disc, 0.0))) / 2).astype(np.int64)
    a = np.clip(a, 0, n - 2)
    start = a * (2 * n - a - 1) // 2
    # float rounding can put a one row off
    over = start > t
    a[over] -= 1
    start = a * (2 * n - a - 1) // 2
    nxt = (a + 1) * (2 * n - a - 2) // 2
    under = t >= nxt
    a[under] += 1
    start = a * (2 * n - a - 1) // 2
    b = t - start + a + 1
    return a, b


@dataclass(frozen=True, eq=False)
class AdjGraph:
    n: int
    indptr: np.ndarray
    indices: np.ndarray

    @classmethod
    def from_edges(cls, n: int, edges) -> "AdjGraph":
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= n):
            raise ValueError("vertex out of range")
        if np.any(e[:, 0] == e[:, 1]):
            raise NotSimpleError("loop")
        key = pair_index(e[:, 0], e[:, 1], n) if n > 1 else np.zeros(0, np.int64)
        if np.unique(key).size != key.size:
            raise NotSimpleError("repeated edge")
        src = np.concatenate([e[:, 0], e[:, 1]])
        dst = np.concatenate([e[:, 1], e[:, 0]])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        return cls(n, indptr, dst)

    @classmethod
    def empty(cls, n: int) -> "AdjGraph":
        return cls(n, np.zeros(n + 1, dtype=np.int64), np.zeros(0, dtype=np.int64))

    @classmethod
    def complete(cls, n: int) -> "AdjGraph":
        u, v = np.triu_indices(n, 1)
        return cls.from_edges(n, np.column_stack([u, v]))

    @property
    def m(self) -> int:
        return int(self.indices.size // 2)

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    @cached_property
    def adj(self) -> list[list[int]]:
        """Neighbour lists as plain Python lists, for loop-heavy algorithms."""
        ind = self.indices.tolist()
        ptr = self.indptr.tolist()
        return [ind[ptr[v]:ptr[v + 1]] for v in range(self.n)]

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < nb.size and nb[i] == v)

    def edges(self) -> np.ndarray:
        """Edges (u, v) with u < v in lexicographic order, shape (m, 2)."""
        src = np.repeat(np.arange(self.n), self.degrees)
        mask = src < self.indices
        return np.column_stack([src[mask], self.indices[mask]])

    def induced(self, vertices) -> tuple["AdjGraph", np.ndarray]:
        """Induced subgraph on ``vertices`` relabelled 0..s-1, plus the label map."""
        verts = np.unique(np.asarray(vertices, dtype=np.int64))
        pos = np.full(self.n, -1, dtype=np.int64)
        pos[verts] = np.arange(verts.size)
        e = self.edges()
        keep = (pos[e[:, 0]] >= 0) & (pos[e[:, 1]] >= 0)
        sub = AdjGraph.from_edges(verts.size, pos[e[keep]])
        return sub, verts

    def __eq__(self, other) -> bool:
        return (isinstance(other, AdjGraph) and self.n == other.n
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))

    def __repr__(self) -> str:
        return f"AdjGraph(n={self.n}, m={self.m})"


@dataclass(frozen=True, eq=False)
class Multigraph:
    n: int
    edges: np.ndarray  # shape (M/2, 2); loops and repeats allowed

    @cached_property
    def degrees(self) -> np.ndarray:
        """Degree of each vertex, a loop counting 2."""
        return np.bincount(self.edges.ravel(), minlength=self.n)

    @property
    def m(self) -> int:
        return int(self.edges.shape[0])

    def loop_count(self) -> int:
        return int(np.count_nonzero(self.edges[:, 0] == self.edges[:, 1]))

    def is_simple(self) -> bool:
        e = self.edges
        if np.any(e[:, 0] == e[:, 1]):
            return False
        key = pair_index(e[:, 0], e[:, 1], self.n)
        key.sort()
        return not np.any(key[1:] == key[:-1])

    def to_simple(self) -> AdjGraph:
        if not self.is_simple():
            raise NotSimpleError("multigraph has loops or repeated edges")
        return AdjGraph.from_edges(self.n, self.edges)


# -- generators -------------------------------------------------------------

def configuration_pairing(d: DegreeSequence, rng: np.random.Generator) -> Multigraph:
    """Uniform perfect matching of the M = sum(d) points, projected to vertices."""
    deg = d.degrees
    M = int(deg.sum())
    if M % 2:
        raise ValueError(f"degree sum {M} is odd")
    points = np.repeat(np.arange(deg.size, dtype=np.int64), deg)
    rng.shuffle(points)
    return Multigraph(deg.size, points.reshape(-1, 2))


def sample_mnmk(n: int, M: int, k: int, rng: np.random.Generator) -> Multigraph:
    if M % 2:
        raise ValueError("M must be even")
    return configuration_pairing(sample_sequence(n, M, k, rng), rng)


@dataclass(frozen=True)
class SimpleSample:
    graph: AdjGraph
    attempts: int
    degrees: DegreeSequence = field(repr=False)


def sample_hnmk(n: int, M: int, k: int, rng: np.random.Generator,
                max_tries: int = 10**4) -> SimpleSample:
    """M(n, M, k) conditioned on being simple, by whole-sample rejection."""
    if M % 2:
        raise ValueError("M must be even")
    for attempt in range(1, max_tries + 1):
        seq = sample_sequence(n, M, k, rng)
        g = configuration_pairing(seq, rng)
        if g.is_simple():
            return SimpleSample(g.to_simple(), attempt, seq)
    raise TriesExhaustedError(max_tries)


def sample_gnp(n: int, p: float, rng: np.random.Generator) -> AdjGraph:
    """G(n, p) by geometric skipping over the C(n, 2) pair indices."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    N = pair_count(n)
    if p == 0.0 or N == 0:
        return AdjGraph.empty(n)
    if p == 1.0:
        return AdjGraph.complete(n)
    chunk = int(N * p + 6 * math.sqrt(N * p) + 64)
    found = []
    pos = -1
    while True:
        gaps = rng.geometric(p, size=chunk)
        idx = pos + np.cumsum(gaps)
        if idx[-1] >= N:
            found.append(idx[idx < N])
            break
        found.append(idx)
        pos = int(idx[-1])
    t = np.concatenate(found)
    u, v = pair_from_index(t, n)
    return AdjGraph.from_edges(n, np.column_stack([u, v]))


def sample_gnm(n: int, m: int, rng: np.random.Generator) -> AdjGraph:
    N = pair_count(n)
    if not 0 <= m <= N:
        raise ValueError("m out of range")
    t = rng.choice(N, size=m, replace=False)
    u, v = pair_from_index(t, n)
    return AdjGraph.from_edges(n, np.column_stack([u, v]))


@dataclass
class ProcessTrace:
    """A uniformly random ordering of all C(n, 2) pairs; prefix m is G_m."""

    n: int
    order: np.ndarray  # pair indices
    cursor: int = 0

    @cached_property
    def endpoints(self) -> tuple[np.ndarray, np.ndarray]:
        return pair_from_index(self.order, self.n)

    @property
    def total(self) -> int:
        return int(self.order.size)

    def edge(self, i: int) -> tuple[int, int]:
        """The i-th added edge (1-based step i)."""
        u, v = self.endpoints
        return int(u[i - 1]), int(v[i - 1])

    def prefix_edges(self, m: int) -> np.ndarray:
        if not 0 <= m <= self.total:
            raise ValueError(f"m={m} outside [0, {self.total}]")
        u, v = self.endpoints
        return np.column_stack([u[:m], v[:m]])


def process_trace(n: int, rng: np.random.Generator) -> ProcessTrace:
    return ProcessTrace(n, rng.permutation(pair_count(n)).astype(np.int64))


def prefix_graph(trace: ProcessTrace, m: int) -> AdjGraph:
    g = AdjGraph.from_edges(trace.n, trace.prefix_edges(m))
    trace.cursor = m
    return g


# -- serialisation ----------------------------------------------------------

def format_graph(g: AdjGraph | Multigraph) -> str:
    """Header "n m", then one "u v" line per edge in sorted order."""
    if isinstance(g, AdjGraph):
        e = g.edges()
    else:
        e = np.sort(g.edges, axis=1)
        e = e[np.lexsort((e[:, 1], e[:, 0]))]
    lines = [f"{g.n} {e.shape[0]}"]
    lines += [f"{u} {v}" for u, v in e.tolist()]
    return "\n".join(lines) + "\n"


def parse_graph(text: str, multigraph: bool = False):
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("S:")]
    n, m = int(rows[0][0]), int(rows[0][1])
    e = np.array([[int(a), int(b)] for a, b in rows[1:]], dtype=np.int64).reshape(-1, 2)
    if e.shape[0] != m:
        raise ValueError(f"header says {m} edges, found {e.shape[0]}")
    if multigraph:
        return Multigraph(n, e)
    return AdjGraph.from_edges(n, e)


def write_graph(path, g) -> None:
    Path(path).write_text(format_graph(g))


def read_graph(path, multigraph: bool = False):
    return parse_graph(Path(path).read_text(), multigraph)
