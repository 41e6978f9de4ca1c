"""Per-embedding linking and writhe statistics, and batched sampling.

The per-embedding work is done in compiled code around one idea: tabulate the
signed crossing ``X[e, f]`` of every pair of endpoint-disjoint edges once
(edges oriented from lower to higher vertex), then any cycle's signed edge
vector ``s`` gives ``lk(A, B) = s_A . X . s_B / 2`` and
``Wr(A) = sum_{e<f in A} s_e s_f X[e, f]``.  The backtracking cycle search
keeps these sums incremental along the current path, so a disjoint pair
costs O(1) beyond its enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from numba import njit, prange

from . import seeding
from ._runtime import set_threads
from .cycles import enumerate_disjoint_pairs
from .errors import (DegenerateProjection, EnumerationCapExceeded, InsufficientSamples,
                     NoPairs, OddCrossingSum)
from .geometry import (DEGENERATE, TOL, crossing_rows, direction_from_uniforms, project,
                       sample_direction)
from .models import Graph, LinearEmbedding, fill_coords, gnp_edge_mask
from .seeding import SeedSpec, next_uniform, stream_key
from .stats import RunningMoments

ENUMERATION_CAP = 12
DEFAULT_DIRECTIONS = 100


# --- compiled kernels -------------------------------------------------------


@njit(cache=True)
def crossing_table(P, edges, tol):
    """Signed crossings of endpoint-disjoint edge pairs, viewed from +z.

    Returns ``(X, e, f)``; ``e >= 0`` names the first degenerate edge pair.
    """
    E = edges.shape[0]
    X = np.zeros((E, E), np.int64)
    for e in range(E):
        a = edges[e, 0]
        b = edges[e, 1]
        for f in range(e + 1, E):
            c = edges[f, 0]
            d = edges[f, 1]
            if a == c or a == d or b == c or b == d:
                continue
            x = crossing_rows(P, a, b, c, d, tol)
            if x == DEGENERATE:
                return X, e, f
            X[e, f] = x
            X[f, e] = x
    return X, -1, -1


@njit(cache=True)
def graph_arrays(mask):
    """Edge list, edge-id matrix and padded sorted neighbour lists of a boolean adjacency."""
    n = mask.shape[0]
    m = 0
    for i in range(n):
        for j in range(i + 1, n):
            if mask[i, j]:
                m += 1
    edges = np.empty((m, 2), np.int64)
    eid = np.full((n, n), -1, np.int64)
    nbr = np.full((n, max(n - 1, 1)), -1, np.int64)
    deg = np.zeros(n, np.int64)
    e = 0
    for i in range(n):
        for j in range(i + 1, n):
            if mask[i, j]:
                edges[e, 0] = i
                edges[e, 1] = j
                eid[i, j] = e
                eid[j, i] = e
                e += 1
    for i in range(n):
        for j in range(n):
            if mask[i, j]:
                nbr[i, deg[i]] = j
                deg[i] += 1
    return edges, eid, nbr, deg


@njit(cache=True)
def pair_census(n, nbr, deg, eid, X, counts):
    """Tally |lk| over all disjoint cycle pairs into ``counts``.

    Returns ``(pairs, sum_sq, sum_abs, odd)``; ``odd`` reports a parity failure.
    |lk| beyond the last bin is tallied in the last bin.
    """
    E = X.shape[0]
    bins = counts.shape[0]
    acc = np.zeros((n + 1, E), np.int64)
    closed = np.zeros(E, np.int64)
    path_a = np.empty(n, np.int64)
    it_a = np.zeros(n, np.int64)
    path_b = np.empty(n, np.int64)
    it_b = np.zeros(n, np.int64)
    run_b = np.zeros(n + 1, np.int64)
    used = np.zeros(n, np.bool_)
    pairs = 0
    sum_sq = 0
    sum_abs = 0
    odd = False
    for r in range(n - 5):
        max_a = n - r - 3
        path_a[0] = r
        used[r] = True
        it_a[0] = 0
        da = 0
        while da >= 0:
            v = path_a[da]
            if it_a[da] >= deg[v]:
                used[v] = False
                da -= 1
                continue
            w = nbr[v, it_a[da]]
            it_a[da] += 1
            if w <= r or used[w] or da + 2 > max_a:
                continue
            e = eid[v, w]
            if v < w:
                for f in range(E):
                    acc[da + 1, f] = acc[da, f] + X[e, f]
            else:
                for f in range(E):
                    acc[da + 1, f] = acc[da, f] - X[e, f]
            da += 1
            path_a[da] = w
            used[w] = True
            it_a[da] = 0
            if da < 2 or path_a[1] > w or eid[w, r] < 0:
                continue
            ec = eid[w, r]
            for f in range(E):
                closed[f] = acc[da, f] - X[ec, f]
            # every cycle B on unused vertices above r
            for r2 in range(r + 1, n - 2):
                if used[r2]:
                    continue
                path_b[0] = r2
                used[r2] = True
                it_b[0] = 0
                db = 0
                while db >= 0:
                    x = path_b[db]
                    if it_b[db] >= deg[x]:
                        used[x] = False
                        db -= 1
                        continue
                    y = nbr[x, it_b[db]]
                    it_b[db] += 1
                    if y <= r2 or used[y]:
                        continue
                    f = eid[x, y]
                    run_b[db + 1] = run_b[db] + (closed[f] if x < y else -closed[f])
                    db += 1
                    path_b[db] = y
                    used[y] = True
                    it_b[db] = 0
                    if db >= 2 and path_b[1] < y and eid[y, r2] >= 0:
                        total = run_b[db] - closed[eid[y, r2]]
                        if total % 2 != 0:
                            odd = True
                        lk = abs(total) // 2
                        pairs += 1
                        sum_sq += lk * lk
                        sum_abs += lk
                        counts[min(lk, bins - 1)] += 1
    return pairs, sum_sq, sum_abs, odd


@njit(cache=True)
def cycle_writhe_squares(n, nbr, deg, eid, X, by_length):
    """Add Wr^2 of every simple cycle, for crossing table X, into ``by_length[k]``."""
    path = np.empty(n, np.int64)
    it = np.zeros(n, np.int64)
    pe = np.empty(n, np.int64)
    ps = np.empty(n, np.int64)
    wr = np.zeros(n + 1, np.int64)
    used = np.zeros(n, np.bool_)
    for r in range(n - 2):
        path[0] = r
        used[r] = True
        it[0] = 0
        d = 0
        while d >= 0:
            v = path[d]
            if it[d] >= deg[v]:
                used[v] = False
                d -= 1
                continue
            w = nbr[v, it[d]]
            it[d] += 1
            if w <= r or used[w]:
                continue
            e = eid[v, w]
            s = 1 if v < w else -1
            inc = 0
            for t in range(d):
                inc += ps[t] * X[pe[t], e]
            pe[d] = e
            ps[d] = s
            wr[d + 1] = wr[d] + s * inc
            d += 1
            path[d] = w
            used[w] = True
            it[d] = 0
            if d >= 2 and path[1] < w and eid[w, r] >= 0:
                ec = eid[w, r]
                inc = 0
                for t in range(d):
                    inc += ps[t] * X[pe[t], ec]
                total = wr[d] - inc
                by_length[d + 1] += total * total


@njit(parallel=True, cache=True)
def _link_batch(mask, gnp, n, p, master, start, count, bins, tol):
    pairs = np.zeros(count, np.int64)
    sum_sq = np.zeros(count, np.int64)
    sum_abs = np.zeros(count, np.int64)
    counts = np.zeros((count, bins), np.int64)
    attempts = np.zeros(count, np.int64)
    odd = np.zeros(count, np.bool_)
    for s in prange(count):
        idx = np.uint64(start + s)
        if gnp:
            m = gnp_edge_mask(n, p, stream_key(master, idx, np.uint64(0), np.uint64(seeding.GRAPH)))
        else:
            m = mask
        edges, eid, nbr, deg = graph_arrays(m)
        attempt = 0
        while True:
            P = fill_coords(n, stream_key(master, idx, np.uint64(attempt),
                                          np.uint64(seeding.COORDS)))
            X, e, f = crossing_table(P, edges, tol)
            if e < 0:
                break
            attempt += 1
        row = np.zeros(bins, np.int64)
        pr, sq, ab, bad = pair_census(n, nbr, deg, eid, X, row)
        pairs[s] = pr
        sum_sq[s] = sq
        sum_abs[s] = ab
        counts[s, :] = row
        attempts[s] = attempt
        odd[s] = bad
    return pairs, sum_sq, sum_abs, counts, attempts, odd


@njit(parallel=True, cache=True)
def _writhe_batch(mask, gnp, n, p, master, start, count, attempts, directions, tol):
    totals = np.zeros((count, n + 1), np.int64)
    redo = np.zeros(count, np.int64)
    for s in prange(count):
        idx = np.uint64(start + s)
        if gnp:
            m = gnp_edge_mask(n, p, stream_key(master, idx, np.uint64(0), np.uint64(seeding.GRAPH)))
        else:
            m = mask
        edges, eid, nbr, deg = graph_arrays(m)
        P = fill_coords(n, stream_key(master, idx, np.uint64(attempts[s]),
                                      np.uint64(seeding.COORDS)))
        state = stream_key(master, idx, np.uint64(0), np.uint64(seeding.DIRECTIONS))
        row = np.zeros(n + 1, np.int64)
        done = 0
        while done < directions:
            u1, state = next_uniform(state)
            u2, state = next_uniform(state)
            Q = project(P, direction_from_uniforms(u1, u2))
            X, e, f = crossing_table(Q, edges, tol)
            if e >= 0:
                redo[s] += 1
                continue
            cycle_writhe_squares(n, nbr, deg, eid, X, row)
            done += 1
        totals[s, :] = row
    return totals, redo


# --- per-embedding API ------------------------------------------------------


@dataclass
class LinkTally:
    """Linking statistics of one embedding, over all disjoint cycle pairs."""

    counts: dict[int, int] = field(default_factory=dict)
    total_pairs: int = 0
    sum_sq: int = 0
    sum_abs: int = 0

    @classmethod
    def from_values(cls, values: Iterable[int]) -> "LinkTally":
        t = cls()
        for lk in values:
            a = abs(int(lk))
            t.counts[a] = t.counts.get(a, 0) + 1
            t.total_pairs += 1
            t.sum_sq += a * a
            t.sum_abs += a
        return t

    @classmethod
    def from_row(cls, row, pairs, sum_sq, sum_abs) -> "LinkTally":
        counts = {int(k): int(c) for k, c in enumerate(row) if c}
        return cls(counts, int(pairs), int(sum_sq), int(sum_abs))

    @property
    def nonzero(self) -> int:
        return self.total_pairs - self.counts.get(0, 0)

    @property
    def avg_sq(self) -> float:
        return self.sum_sq / self.total_pairs

    @property
    def avg_abs(self) -> float:
        return self.sum_abs / self.total_pairs


@dataclass(frozen=True)
class WritheEstimate:
    k: int
    estimate: float
    directions: int
    resampled: int = 0


def _bins(n: int) -> int:
    return n * n // 8 + 2


def _degenerate_pair(g: Graph, e: int, f: int):
    ea, eb = g.edges[e], g.edges[f]
    for pair in enumerate_disjoint_pairs(g):
        ka = {tuple(sorted(x)) for x in zip(pair.first, pair.first[1:] + pair.first[:1])}
        kb = {tuple(sorted(x)) for x in zip(pair.second, pair.second[1:] + pair.second[:1])}
        if (ea in ka and eb in kb) or (ea in kb and eb in ka):
            return pair
    return None


def link_tally(e: LinearEmbedding) -> LinkTally:
    """Tally |lk| over every disjoint cycle pair, projecting along +z."""
    g = e.graph
    X, i, j = crossing_table(e.coords, g.edge_array, TOL)
    if i >= 0:
        raise DegenerateProjection(
            f"edges {g.edges[i]} and {g.edges[j]} are in a degenerate position",
            pair=_degenerate_pair(g, i, j))
    edges, eid, nbr, deg = graph_arrays(g.edge_index >= 0)
    row = np.zeros(_bins(g.n), np.int64)
    pairs, sq, ab, odd = pair_census(g.n, nbr, deg, eid, X, row)
    if odd:
        raise OddCrossingSum("a disjoint cycle pair has an odd signed crossing sum")
    return LinkTally.from_row(row, pairs, sq, ab)


def mean_sum_sq_link(samples: Iterable[LinkTally]) -> tuple[float, float]:
    """Sample mean and standard error of the per-embedding sum of squared lk."""
    m = RunningMoments().extend(t.sum_sq for t in samples)
    if m.count < 2:
        raise InsufficientSamples("need at least two samples")
    return m.mean, m.stderr


def mean_average_link(samples: Iterable[LinkTally], skip_empty: bool = False) -> tuple[float, float]:
    """Means over samples of the per-embedding average lk^2 and |lk|.

    With ``skip_empty`` embeddings without any disjoint pair are left out
    instead of raising.
    """
    sq, ab = RunningMoments(), RunningMoments()
    for t in samples:
        if t.total_pairs == 0:
            if skip_empty:
                continue
            raise NoPairs("an embedding has no disjoint cycle pair")
        sq.push(t.avg_sq)
        ab.push(t.avg_abs)
    if sq.count == 0:
        raise NoPairs("no embedding has a disjoint cycle pair")
    return sq.mean, ab.mean


def proportion_by_lk(samples: Iterable[LinkTally]) -> dict[int, float]:
    """Pooled fraction of all pairs attaining each |lk|."""
    pooled: dict[int, int] = {}
    for t in samples:
        for k, c in t.counts.items():
            pooled[k] = pooled.get(k, 0) + c
    total = sum(pooled.values())
    if total == 0:
        raise NoPairs("no disjoint cycle pairs to take proportions over")
    return {k: c / total for k, c in sorted(pooled.items())}


def _cycle_graph_arrays(k: int):
    mask = np.zeros((k, k), np.bool_)
    for i in range(k):
        mask[i, (i + 1) % k] = mask[(i + 1) % k, i] = True
    return graph_arrays(mask)


def mean_squared_writhe(polygon, directions: int = DEFAULT_DIRECTIONS,
                        rng: np.random.Generator | None = None,
                        fixed_directions=None) -> WritheEstimate:
    """Average of the squared directional writhe over sampled directions.

    Directions are uniform on the sphere (drawn from ``rng``) unless
    ``fixed_directions`` is given; degenerate directions are redrawn and counted.
    """
    P = np.ascontiguousarray(polygon, dtype=np.float64)
    k = P.shape[0]
    edges, eid, nbr, deg = _cycle_graph_arrays(k)
    if fixed_directions is not None:
        dirs = [np.asarray(d, float) / np.linalg.norm(d) for d in fixed_directions]
        directions = len(dirs)
    elif directions < 1:
        raise ValueError("need at least one direction")
    rng = rng if rng is not None else np.random.default_rng()
    acc = np.zeros(k + 1, np.int64)
    done = redo = 0
    while done < directions:
        d = dirs[done] if fixed_directions is not None else sample_direction(rng)
        X, i, j = crossing_table(project(P, d), edges, TOL)
        if i >= 0:
            if fixed_directions is not None:
                raise DegenerateProjection(f"direction {d} is degenerate for this polygon")
            redo += 1
            continue
        cycle_writhe_squares(k, nbr, deg, eid, X, acc)
        done += 1
    return WritheEstimate(k, acc[k] / directions, directions, redo)


def sum_sq_writhe(e: LinearEmbedding, directions: int = DEFAULT_DIRECTIONS,
                  rng: np.random.Generator | None = None) -> float:
    """Sum over all cycles of the direction-sampled mean squared writhe."""
    g = e.graph
    if directions < 1:
        raise ValueError("need at least one direction")
    rng = rng if rng is not None else np.random.default_rng()
    edges, eid, nbr, deg = graph_arrays(g.edge_index >= 0)
    acc = np.zeros(g.n + 1, np.int64)
    done = 0
    while done < directions:
        X, i, _ = crossing_table(project(e.coords, sample_direction(rng)), edges, TOL)
        if i >= 0:
            continue
        cycle_writhe_squares(g.n, nbr, deg, eid, X, acc)
        done += 1
    return float(acc.sum()) / directions


# --- batched sampling -------------------------------------------------------


@dataclass
class LinkSamples:
    """Per-sample linking results for sample indices ``start .. start+count-1``."""

    graph_model: str
    n: int
    p: float | None
    master_seed: int
    start: int
    pairs: np.ndarray
    sum_sq: np.ndarray
    sum_abs: np.ndarray
    counts: np.ndarray
    attempts: np.ndarray

    def __len__(self) -> int:
        return len(self.pairs)

    def tally(self, i: int) -> LinkTally:
        return LinkTally.from_row(self.counts[i], self.pairs[i], self.sum_sq[i], self.sum_abs[i])

    def tallies(self) -> list[LinkTally]:
        return [self.tally(i) for i in range(len(self))]

    @property
    def resamples(self) -> int:
        return int(self.attempts.sum())

    def nonzero(self) -> np.ndarray:
        return self.pairs - self.counts[:, 0]

    def seed_of(self, i: int) -> SeedSpec:
        return SeedSpec(self.master_seed, self.start + i, int(self.attempts[i]))


def _check_cap(n: int, allow_large: bool):
    if n > ENUMERATION_CAP and not allow_large:
        raise EnumerationCapExceeded(
            f"n={n} exceeds the enumeration cap {ENUMERATION_CAP}; pass allow_large to override")


def _mask(g: Graph) -> np.ndarray:
    return np.ascontiguousarray(g.edge_index >= 0)


def sample_link_tallies(g: Graph | None, samples: int, seed: int, *, n: int | None = None,
                        p: float | None = None, start: int = 0, threads: int | None = None,
                        allow_large: bool = False) -> LinkSamples:
    """Link tallies of ``samples`` random embeddings.

    Pass a fixed graph ``g``, or ``g=None`` with ``n`` and ``p`` to draw a
    fresh (n, p)-graph per sample.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    gnp = g is None
    if gnp:
        if n is None or p is None:
            raise ValueError("an (n, p) run needs both n and p")
        mask = np.zeros((n, n), np.bool_)
    else:
        n, mask = g.n, _mask(g)
    _check_cap(n, allow_large)
    set_threads(threads)
    pairs, sq, ab, counts, attempts, odd = _link_batch(
        mask, gnp, n, float(p or 0.0), seeding.as_u64(seed), start, samples, _bins(n), TOL)
    if odd.any():
        bad = int(np.flatnonzero(odd)[0])
        raise OddCrossingSum(f"sample {start + bad} produced an odd signed crossing sum")
    model = "gnp" if gnp else g.model
    return LinkSamples(model, n, p, seed, start, pairs, sq, ab, counts, attempts)


def sample_writhe_squares(g: Graph | None, samples: int, seed: int, directions: int = DEFAULT_DIRECTIONS,
                          *, n: int | None = None, p: float | None = None, start: int = 0,
                          attempts: np.ndarray | None = None, threads: int | None = None,
                          allow_large: bool = False) -> tuple[np.ndarray, int]:
    """Per-sample, per-cycle-length sums of mean squared writhe.

    Returns ``(values, redrawn)``: ``values[s, k]`` is the sum over k-cycles of
    sample s of the mean of Wr^2 over ``directions`` sphere directions.
    """
    if samples < 1 or directions < 1:
        raise ValueError("need at least one sample and one direction")
    gnp = g is None
    if gnp:
        mask = np.zeros((n, n), np.bool_)
    else:
        n, mask = g.n, _mask(g)
    _check_cap(n, allow_large)
    if attempts is None:
        attempts = np.zeros(samples, np.int64)
    set_threads(threads)
    totals, redo = _writhe_batch(mask, gnp, n, float(p or 0.0), seeding.as_u64(seed), start,
                                 samples, np.ascontiguousarray(attempts, np.int64), directions, TOL)
    return totals / directions, int(redo.sum())


def sample_polygon_writhe(k: int, samples: int, seed: int, directions: int = DEFAULT_DIRECTIONS,
                          threads: int | None = None) -> tuple[np.ndarray, int]:
    """Mean squared writhe of ``samples`` random k-gons (vertices uniform in the cube)."""
    edges = tuple((i, (i + 1) % k) for i in range(k))
    g = Graph(k, edges, "cycle", {"k": k})
    values, redo = sample_writhe_squares(g, samples, seed, directions, threads=threads)
    return values[:, k], redo
