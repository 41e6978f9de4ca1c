"""Graphs, random linear embeddings in the unit cube, and the embedding file format."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations

import numpy as np
from numba import njit

from . import seeding
from .errors import (CycleTooShort, DuplicateEdge, IndexOutOfRange, InvalidProbability,
                     ParseError)
from .seeding import SeedSpec, next_uniform


@dataclass(frozen=True, eq=False)
class Graph:
    n: int
    edges: tuple[tuple[int, int], ...]
    model: str = "custom"
    params: dict = field(default_factory=dict)
    parts: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a graph needs at least one vertex")
        norm = []
        for i, j in self.edges:
            i, j = int(i), int(j)
            if i == j:
                raise ValueError(f"self-loop at vertex {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"edge ({i}, {j}) out of range for n={self.n}")
            norm.append((min(i, j), max(i, j)))
        if len(set(norm)) != len(norm):
            raise ValueError("duplicate edge")
        object.__setattr__(self, "edges", tuple(sorted(norm)))

    def __eq__(self, other):
        return isinstance(other, Graph) and (self.n, self.edges) == (other.n, other.edges)

    def __hash__(self):
        return hash((self.n, self.edges))

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def edge_index(self) -> np.ndarray:
        """n x n matrix of edge ids (row order of ``edge_array``), -1 where absent."""
        eid = np.full((self.n, self.n), -1, dtype=np.int64)
        for e, (i, j) in enumerate(self.edges):
            eid[i, j] = eid[j, i] = e
        return eid

    @cached_property
    def edge_array(self) -> np.ndarray:
        return np.array(self.edges, dtype=np.int64).reshape(-1, 2)

    @cached_property
    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return [sorted(a) for a in adj]

    def has_edge(self, i: int, j: int) -> bool:
        return self.edge_index[i, j] >= 0

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def components(self) -> int:
        seen, count = set(), 0
        for s in range(self.n):
            if s in seen:
                continue
            count += 1
            stack = [s]
            seen.add(s)
            while stack:
                v = stack.pop()
                for w in self.adjacency[v]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
        return count


@dataclass(frozen=True, eq=False)
class LinearEmbedding:
    graph: Graph
    coords: np.ndarray

    def __post_init__(self):
        coords = np.ascontiguousarray(self.coords, dtype=np.float64)
        if coords.shape != (self.graph.n, 3):
            raise ValueError(f"expected {self.graph.n} x 3 coordinates, got {coords.shape}")
        if not np.all(np.isfinite(coords)):
            raise ValueError("coordinates must be finite")
        object.__setattr__(self, "coords", coords)

    @property
    def in_cube(self) -> bool:
        return bool(np.all((self.coords >= 0.0) & (self.coords <= 1.0)))

    def polygon(self, cycle) -> np.ndarray:
        return self.coords[list(cycle)]


def complete_graph(n: int) -> Graph:
    return Graph(n, tuple(combinations(range(n), 2)), "complete", {"n": n})


@njit(cache=True)
def gnp_edge_mask(n, p, key):
    """Edge indicators for pairs (i, j), i < j, drawn in lexicographic order."""
    mask = np.zeros((n, n), dtype=np.bool_)
    state = key
    for i in range(n):
        for j in range(i + 1, n):
            u, state = next_uniform(state)
            if u < p:
                mask[i, j] = True
                mask[j, i] = True
    return mask


def gnp_graph(n: int, p: float, seed: SeedSpec) -> Graph:
    if not 0.0 < p < 1.0:
        raise InvalidProbability(f"p must lie in (0, 1), got {p}")
    mask = gnp_edge_mask(n, float(p), seed.key(seeding.GRAPH))
    edges = tuple((i, j) for i, j in combinations(range(n), 2) if mask[i, j])
    return Graph(n, edges, "gnp", {"n": n, "p": p})


def tripartite_331() -> Graph:
    parts = ((0, 1, 2), (3, 4, 5), (6,))
    edges = tuple((i, j) for a, b in combinations(parts, 2) for i in a for j in b)
    return Graph(7, edges, "tripartite331", {}, parts)


def disjoint_cycles_graph(k: int, l: int) -> Graph:
    if k < 3 or l < 3:
        raise CycleTooShort(f"cycle lengths must be at least 3, got ({k}, {l})")
    edges = [(i, (i + 1) % k) for i in range(k)]
    edges += [(k + j, k + (j + 1) % l) for j in range(l)]
    return Graph(k + l, tuple(edges), "disjoint_cycles", {"k": k, "l": l})


@njit(cache=True)
def fill_coords(n, key):
    out = np.empty((n, 3))
    state = key
    for v in range(n):
        for c in range(3):
            out[v, c], state = next_uniform(state)
    return out


def sample_embedding(g: Graph, seed: SeedSpec) -> LinearEmbedding:
    """Vertices i.i.d. uniform in the open unit cube, from the sample's COORDS stream."""
    return LinearEmbedding(g, fill_coords(g.n, seed.key(seeding.COORDS)))


# --- file format ------------------------------------------------------------


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def load_embedding(text: str) -> LinearEmbedding:
    """Parse ``n m`` / n coordinate lines / m edge lines; ``#`` starts a comment."""
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError("empty embedding file")
    lineno, header = lines[0]
    if len(header) != 2:
        raise ParseError("header must be 'n m'", lineno)
    try:
        n, m = int(header[0]), int(header[1])
    except ValueError:
        raise ParseError("header must hold two integers", lineno) from None
    if n < 1 or m < 0:
        raise ParseError("need n >= 1 and m >= 0", lineno)
    body = lines[1:]
    if len(body) != n + m:
        last = body[-1][0] if body else lineno
        raise ParseError(f"expected {n} coordinate and {m} edge lines, found {len(body)}", last)
    coords = np.empty((n, 3))
    for v, (lineno, tokens) in enumerate(body[:n]):
        if len(tokens) != 3:
            raise ParseError("coordinate line needs three numbers", lineno)
        try:
            coords[v] = [float(t) for t in tokens]
        except ValueError:
            raise ParseError("malformed coordinate", lineno) from None
        if not np.all(np.isfinite(coords[v])):
            raise ParseError("coordinates must be finite", lineno)
    edges, seen = [], set()
    for lineno, tokens in body[n:]:
        if len(tokens) != 2:
            raise ParseError("edge line needs two vertex indices", lineno)
        try:
            i, j = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise ParseError("malformed vertex index", lineno) from None
        if not (0 <= i < n and 0 <= j < n):
            raise IndexOutOfRange(f"vertex index out of range [0, {n})", lineno)
        if i == j:
            raise ParseError(f"self-loop at vertex {i}", lineno)
        if i > j:
            raise ParseError("edge must be written as 'i j' with i < j", lineno)
        if (i, j) in seen:
            raise DuplicateEdge(f"duplicate edge ({i}, {j})", lineno)
        seen.add((i, j))
        edges.append((i, j))
    return LinearEmbedding(Graph(n, tuple(edges)), coords)


def dump_embedding(e: LinearEmbedding) -> str:
    out = [f"{e.graph.n} {e.graph.m}"]
    out += [" ".join(repr(float(c)) for c in row) for row in e.coords]
    out += [f"{i} {j}" for i, j in e.graph.edges]
    return "\n".join(out) + "\n"
