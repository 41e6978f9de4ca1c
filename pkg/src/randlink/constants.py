"""Monte Carlo estimates of the crossing constants s, u, v, w and of q, q'.

Two independent routes lead to q: the linking probability of two random
triangles (which equals 18q/4), and the combination s + 2(u + v) of the
per-configuration crossing expectations.

Point configurations (all points i.i.d. uniform in the cube, crossings seen
from +z, consecutive path edges oriented head to tail):

    s  4 points  P0->P1, P2->P3             value |e(P0P1, P2P3)|, s = mean / 2
    u  5 points  P0->P1 ; P2->P3->P4        e(P0P1, P2P3) * e(P0P1, P3P4)
    v  6 points  P0->P1->P2 ; P3->P4->P5    e(P0P1, P3P4) * e(P1P2, P4P5)
    w  5 points  P0->P1->P2->P3->P4         e(P0P1, P2P3) * e(P1P2, P3P4)

Sample ``i`` of an estimator draws from its own counter-based stream (see
:mod:`randlink.seeding`), and samples are summed in fixed-size chunks, so
estimates are bit-identical for any thread count.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from numba import njit, prange

from . import seeding
from ._runtime import set_threads
from .geometry import DEGENERATE, TOL, crossing_rows
from .seeding import next_uniform, stream_key
from .stats import Z99, bernoulli_ci99, mean_ci99

CHUNK = 1 << 15

TRIANGLES, S, U, V, W = 0, 1, 2, 3, 4
_POINTS = (6, 4, 5, 6, 5)
_DOMAINS = (seeding.TRIANGLES, seeding.CONFIG_S, seeding.CONFIG_U,
            seeding.CONFIG_V, seeding.CONFIG_W)


@dataclass(frozen=True)
class ConstantEstimate:
    name: str
    estimate: float
    samples: int
    ci99_halfwidth: float
    resamples: int = 0

    @property
    def interval(self) -> tuple[float, float]:
        return self.estimate - self.ci99_halfwidth, self.estimate + self.ci99_halfwidth

    def excludes_zero(self) -> bool:
        lo, hi = self.interval
        return lo > 0.0 or hi < 0.0


@njit(cache=True)
def _config_value(kind, P, tol):
    """Per-sample statistic for one configuration; DEGENERATE flags a resample."""
    if kind == TRIANGLES:
        total = 0
        for i in range(3):
            for j in range(3):
                c = crossing_rows(P, i, (i + 1) % 3, 3 + j, 3 + (j + 1) % 3, tol)
                if c == DEGENERATE:
                    return DEGENERATE
                total += c
        return 1 if total != 0 else 0
    if kind == S:
        c = crossing_rows(P, 0, 1, 2, 3, tol)
        return c if c == DEGENERATE else abs(c)
    if kind == U:
        a = crossing_rows(P, 0, 1, 2, 3, tol)
        b = crossing_rows(P, 0, 1, 3, 4, tol)
    elif kind == V:
        a = crossing_rows(P, 0, 1, 3, 4, tol)
        b = crossing_rows(P, 1, 2, 4, 5, tol)
    else:
        a = crossing_rows(P, 0, 1, 2, 3, tol)
        b = crossing_rows(P, 1, 2, 3, 4, tol)
    if a == DEGENERATE or b == DEGENERATE:
        return DEGENERATE
    return a * b


@njit(cache=True)
def _draw(P, state):
    for i in range(P.shape[0]):
        for c in range(3):
            P[i, c], state = next_uniform(state)
    return state


@njit(parallel=True, cache=True)
def _run(kind, npoints, domain, master, count, tol):
    """Per-chunk sums of the statistic, of its square, and resample counts."""
    nchunks = (count + CHUNK - 1) // CHUNK
    sums = np.zeros(nchunks, np.int64)
    sq = np.zeros(nchunks, np.int64)
    redo = np.zeros(nchunks, np.int64)
    for c in prange(nchunks):
        P = np.empty((npoints, 3))
        lo = c * CHUNK
        hi = min(count, lo + CHUNK)
        for i in range(lo, hi):
            attempt = 0
            while True:
                _draw(P, stream_key(master, np.uint64(i), np.uint64(attempt), np.uint64(domain)))
                x = _config_value(kind, P, tol)
                if x != DEGENERATE:
                    break
                attempt += 1
            sums[c] += x
            sq[c] += x * x
            redo[c] += attempt
    return sums.sum(), sq.sum(), redo.sum()


@njit(cache=True)
def _values(kind, configs, tol):
    out = np.empty(configs.shape[0], np.int64)
    for i in range(configs.shape[0]):
        out[i] = _config_value(kind, configs[i], tol)
    return out


def config_values(kind: int, configs) -> np.ndarray:
    """Statistic for explicit configurations of shape (N, points, 3); 2 marks degenerate."""
    configs = np.ascontiguousarray(configs, dtype=np.float64)
    if configs.ndim != 3 or configs.shape[1:] != (_POINTS[kind], 3):
        raise ValueError(f"expected shape (N, {_POINTS[kind]}, 3), got {configs.shape}")
    return _values(kind, configs, TOL)


def _sample(kind: int, samples: int, seed: int, threads: int | None):
    if samples < 1:
        raise ValueError("need at least one sample")
    set_threads(threads)
    total, sq, redo = _run(kind, _POINTS[kind], _DOMAINS[kind], seeding.as_u64(seed),
                           int(samples), TOL)
    return int(total), int(sq), int(redo)


def q_from_triangle_counts(linked: int, trials: int, resamples: int = 0) -> ConstantEstimate:
    """q = (4/18) P(two random triangles link), with the Bernoulli 99% interval."""
    ci = bernoulli_ci99(linked, trials)
    return ConstantEstimate("q", ci.estimate * 4 / 18, trials, ci.halfwidth * 4 / 18, resamples)


def estimate_q_triangles(samples: int, seed: int = 0, threads: int | None = None) -> ConstantEstimate:
    linked, _, redo = _sample(TRIANGLES, samples, seed, threads)
    return q_from_triangle_counts(linked, samples, redo)


def estimate_s(samples: int, seed: int = 0, threads: int | None = None) -> ConstantEstimate:
    crossed, _, redo = _sample(S, samples, seed, threads)
    ci = bernoulli_ci99(crossed, samples)
    return ConstantEstimate("s", ci.estimate / 2, samples, ci.halfwidth / 2, redo)


def _product_estimate(name, kind, samples, seed, threads):
    total, sq, redo = _sample(kind, samples, seed, threads)
    mean, hw = mean_ci99(total, sq, samples)
    return ConstantEstimate(name, mean, samples, hw, redo)


def estimate_u(samples: int, seed: int = 0, threads: int | None = None) -> ConstantEstimate:
    return _product_estimate("u", U, samples, seed, threads)


def estimate_v(samples: int, seed: int = 0, threads: int | None = None) -> ConstantEstimate:
    return _product_estimate("v", V, samples, seed, threads)


def estimate_w(samples: int, seed: int = 0, threads: int | None = None) -> ConstantEstimate:
    return _product_estimate("w", W, samples, seed, threads)


def _combine(name, terms):
    counts = {t.samples for _, t in terms}
    if len(counts) > 1:
        warnings.warn(f"combining estimates with different sample counts {sorted(counts)}",
                      stacklevel=3)
    return ConstantEstimate(
        name,
        sum(c * t.estimate for c, t in terms),
        min(counts),
        math.sqrt(sum((c * t.ci99_halfwidth) ** 2 for c, t in terms)),
        sum(t.resamples for _, t in terms),
    )


def derive_q(s: ConstantEstimate, u: ConstantEstimate, v: ConstantEstimate) -> ConstantEstimate:
    """q = s + 2(u + v); independent half-widths add in quadrature."""
    return _combine("q", [(1, s), (2, u), (2, v)])


def derive_qprime(s: ConstantEstimate, u: ConstantEstimate, v: ConstantEstimate,
                  w: ConstantEstimate) -> ConstantEstimate:
    """q' = 3s + 2(2u + v + w)."""
    return _combine("q'", [(3, s), (4, u), (2, v), (2, w)])


def estimate_all(samples: int, seed: int = 0, threads: int | None = None) -> dict[str, ConstantEstimate]:
    """s, u, v, w and both derived constants, from independent streams."""
    s = estimate_s(samples, seed, threads)
    u = estimate_u(samples, seed, threads)
    v = estimate_v(samples, seed, threads)
    w = estimate_w(samples, seed, threads)
    return {"s": s, "u": u, "v": v, "w": w, "q": derive_q(s, u, v), "q'": derive_qprime(s, u, v, w)}


__all__ = [
    "ConstantEstimate", "Z99", "config_values", "derive_q", "derive_qprime", "estimate_all",
    "estimate_q_triangles", "estimate_s", "estimate_u", "estimate_v", "estimate_w",
    "q_from_triangle_counts",
]
