"""Simple-cycle and disjoint-cycle-pair enumeration, with exact counting formulas.

A cycle is a tuple of distinct vertices in canonical form: the minimum vertex
first and, of its two cycle neighbours, the smaller one second.  Enumeration
is a backtracking search rooted at each vertex ``r`` that only visits vertices
greater than ``r`` and emits a closed path only when its second vertex is
smaller than its last, so every undirected cycle appears exactly once without
a dedup table.
"""

from __future__ import annotations

from math import comb, factorial
from typing import Iterator, NamedTuple

from .models import Graph

Cycle = tuple[int, ...]


class CyclePair(NamedTuple):
    first: Cycle
    second: Cycle


def is_canonical(cycle: Cycle) -> bool:
    return (len(cycle) >= 3 and len(set(cycle)) == len(cycle)
            and cycle[0] == min(cycle) and cycle[1] < cycle[-1])


def canonical(cycle) -> Cycle:
    """Rotate and possibly reflect a cyclic vertex sequence into canonical form."""
    c = list(cycle)
    i = c.index(min(c))
    c = c[i:] + c[:i]
    if c[1] > c[-1]:
        c = [c[0]] + c[:0:-1]
    return tuple(c)


def _cycles(adj, n, min_len, max_len, blocked=frozenset(), min_root=0) -> Iterator[Cycle]:
    for root in range(min_root, n):
        if root in blocked:
            continue
        path = [root]
        on_path = {root}
        iters = [iter(adj[root])]
        while iters:
            w = next(iters[-1], None)
            if w is None:
                iters.pop()
                on_path.discard(path.pop())
                continue
            if w <= root or w in on_path or w in blocked or len(path) >= max_len:
                continue
            path.append(w)
            on_path.add(w)
            if len(path) >= min_len and path[1] < w and root in adj[w]:
                yield tuple(path)
            iters.append(iter(adj[w]))


def enumerate_cycles(g: Graph, min_len: int = 3, max_len: int | None = None) -> Iterator[Cycle]:
    """Stream every simple cycle with ``min_len <= length <= max_len``, canonical, once."""
    if max_len is None:
        max_len = g.n
    if min_len < 3 or max_len < min_len:
        raise ValueError(f"invalid length range [{min_len}, {max_len}]")
    adj = [set(a) for a in g.adjacency]
    return _cycles(adj, g.n, min_len, max_len)


def enumerate_disjoint_pairs(g: Graph) -> Iterator[CyclePair]:
    """Stream each unordered pair of vertex-disjoint cycles once.

    The pair is ordered so that ``first`` holds the smaller minimum vertex.
    """
    if g.n < 6:
        return
    adj = [set(a) for a in g.adjacency]
    for a in _cycles(adj, g.n, 3, g.n - 3):
        if g.n - a[0] - len(a) < 3:
            continue
        for b in _cycles(adj, g.n, 3, g.n - len(a), frozenset(a), a[0] + 1):
            yield CyclePair(a, b)


def count_cycles_closed_form(n: int, k: int) -> int:
    """Number of k-cycles in K_n: n! / ((n - k)! 2k)."""
    if not 3 <= k <= n:
        raise ValueError(f"need 3 <= k <= n, got k={k}, n={n}")
    num = factorial(n) // factorial(n - k)
    assert num % (2 * k) == 0
    return num // (2 * k)


def count_pairs_closed_form(n: int, k: int, l: int) -> int:
    """Number of unordered disjoint (k-cycle, l-cycle) pairs in K_n."""
    if k < 3 or l < 3 or k + l > n:
        raise ValueError(f"need k, l >= 3 and k + l <= n, got ({n}, {k}, {l})")
    total = comb(n, k) * comb(n - k, l) * factorial(k - 1) * factorial(l - 1)
    total //= 4
    return total // 2 if k == l else total


def counting_identity(n: int) -> tuple[int, int]:
    """Both sides of sum_{k,l} n!/(n-k-l)! = sum_{i=6}^n n!/(n-i)! (i-5)."""
    if n < 6:
        raise ValueError("the identity needs n >= 6")
    nf = factorial(n)
    lhs = sum(nf // factorial(n - k - l) for k in range(3, n - 2) for l in range(3, n - k + 1))
    rhs = sum(nf // factorial(n - i) * (i - 5) for i in range(6, n + 1))
    return lhs, rhs
