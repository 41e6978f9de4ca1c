"""Experiment runners behind the command line: simulations, censuses, theory tables."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import theory
from .cycles import counting_identity
from .errors import CensusViolation
from .invariants import (LinkSamples, mean_average_link, mean_sum_sq_link, proportion_by_lk,
                         sample_link_tallies, sample_writhe_squares)
from .models import (Graph, complete_graph, disjoint_cycles_graph, sample_embedding,
                     tripartite_331)
from .stats import RunningMoments, bernoulli_ci99

SIMULATE_COLUMNS = [
    "model", "n", "p", "samples", "seed", "mean_sum_sq_lk", "stderr", "expected",
    "mean_avg_sq_lk", "mean_avg_abs_lk", "prop_lk0", "prop_lk1", "prop_lk2",
    "resamples", "wall_ms",
]
WRITHE_COLUMNS = ["mean_sum_sq_writhe", "writhe_stderr", "expected_sum_sq_writhe", "writhe_redrawn"]


@dataclass
class SimulationSpec:
    model: str                      # complete | gnp | cycles | tripartite331
    n: int | None = None
    p: float | None = None
    k: int | None = None
    l: int | None = None
    samples: int = 1000
    seed: int = 0
    writhe: bool = False
    directions: int = 100
    params: theory.TheoryParams = field(default_factory=theory.TheoryParams)
    threads: int | None = None
    allow_large: bool = False
    timing: bool = False

    def graph(self) -> Graph | None:
        if self.model == "complete":
            return complete_graph(self.n)
        if self.model == "cycles":
            return disjoint_cycles_graph(self.k, self.l)
        if self.model == "tripartite331":
            return tripartite_331()
        if self.model == "gnp":
            return None
        raise ValueError(f"unknown graph model {self.model!r}")

    def expected(self, g: Graph | None) -> float | None:
        q = self.params
        if self.model == "complete":
            return theory.expected_mean_sum_sq_link_complete(self.n, q) if self.n >= 6 else 0.0
        if self.model == "gnp":
            return theory.expected_mean_sum_sq_link_np(self.n, self.p, q) if self.n >= 6 else 0.0
        if self.model == "cycles":
            return theory.expected_pair_sq_link(self.k, self.l, q)
        return theory.k331_expected_sum(q)

    def expected_writhe(self) -> float | None:
        if self.model == "complete" and self.params.qprime is not None:
            return theory.expected_sum_sq_writhe_complete(self.n, self.params)
        return None


def simulate(spec: SimulationSpec) -> dict:
    """One CSV row: experimental statistics next to the closed-form expectation."""
    t0 = time.perf_counter()
    g = spec.graph()
    n = g.n if g is not None else spec.n
    result = sample_link_tallies(g, spec.samples, spec.seed, n=spec.n, p=spec.p,
                                 threads=spec.threads, allow_large=spec.allow_large)
    tallies = result.tallies()
    if len(tallies) >= 2:
        mean, stderr = mean_sum_sq_link(tallies)
    else:
        mean, stderr = float(tallies[0].sum_sq), float("nan")
    row = {
        "model": result.graph_model, "n": n, "p": spec.p if spec.model == "gnp" else 1.0,
        "samples": spec.samples, "seed": spec.seed, "mean_sum_sq_lk": mean, "stderr": stderr,
        "expected": spec.expected(g),
    }
    if result.pairs.sum() > 0:
        avg_sq, avg_abs = mean_average_link(tallies, skip_empty=True)
        props = proportion_by_lk(tallies)
    else:
        avg_sq = avg_abs = float("nan")
        props = {}
    row.update(mean_avg_sq_lk=avg_sq, mean_avg_abs_lk=avg_abs,
               prop_lk0=props.get(0, 0.0), prop_lk1=props.get(1, 0.0),
               prop_lk2=props.get(2, 0.0), resamples=result.resamples)
    if spec.writhe:
        values, redrawn = sample_writhe_squares(
            g, spec.samples, spec.seed, spec.directions, n=spec.n, p=spec.p,
            attempts=result.attempts, threads=spec.threads, allow_large=spec.allow_large)
        m = RunningMoments().extend(values.sum(axis=1).tolist())
        row.update(mean_sum_sq_writhe=m.mean, writhe_stderr=m.stderr,
                   expected_sum_sq_writhe=spec.expected_writhe(), writhe_redrawn=redrawn)
    row["wall_ms"] = round(1000 * (time.perf_counter() - t0)) if spec.timing else None
    return row


# --- censuses ---------------------------------------------------------------


@dataclass
class CensusReport:
    graph: str
    samples: int
    seed: int
    p1: float
    p1_halfwidth: float
    theory_p1: float
    theory_is_lower_bound: bool
    mean_sum_sq: float
    expected_sum_sq: float
    nonzero_histogram: dict[int, int]
    sum_sq_histogram: dict[int, int]
    resamples: int

    def rows(self) -> list[dict]:
        base = {"graph": self.graph, "samples": self.samples, "seed": self.seed}
        out = [
            dict(base, statistic="p1", value=self.p1, ci99_halfwidth=self.p1_halfwidth),
            dict(base, statistic="theory_p1_lower_bound" if self.theory_is_lower_bound
                 else "theory_p1", value=self.theory_p1, ci99_halfwidth=None),
            dict(base, statistic="mean_sum_sq_lk", value=self.mean_sum_sq, ci99_halfwidth=None),
            dict(base, statistic="expected_sum_sq_lk", value=self.expected_sum_sq,
                 ci99_halfwidth=None),
        ]
        out += [dict(base, statistic=f"embeddings_with_{k}_links", value=c, ci99_halfwidth=None)
                for k, c in sorted(self.nonzero_histogram.items())]
        out += [dict(base, statistic=f"embeddings_with_sum_sq_{k}", value=c, ci99_halfwidth=None)
                for k, c in sorted(self.sum_sq_histogram.items())]
        out.append(dict(base, statistic="resamples", value=self.resamples, ci99_halfwidth=None))
        return out


def _violation(result: LinkSamples, g: Graph, i: int, why: str) -> CensusViolation:
    coords = sample_embedding(g, result.seed_of(i)).coords
    return CensusViolation(f"sample {result.start + i}: {why}", coords)


def check_k6_sample(result: LinkSamples, i: int) -> str | None:
    row = result.counts[i]
    nonzero = int(result.pairs[i] - row[0])
    if result.pairs[i] != 10:
        return f"expected 10 disjoint pairs, found {result.pairs[i]}"
    if nonzero not in (1, 3) or row[1] != nonzero:
        return f"expected one or three Hopf links and nothing else, tally {row.tolist()}"
    if result.sum_sq[i] not in (1, 3):
        return f"sum of squared linking numbers is {result.sum_sq[i]}"
    return None


def check_k331_sample(result: LinkSamples, i: int) -> str | None:
    row = result.counts[i]
    nonzero = int(result.pairs[i] - row[0])
    if result.pairs[i] != 9:
        return f"expected 9 disjoint pairs, found {result.pairs[i]}"
    if not 1 <= nonzero <= 5:
        return f"{nonzero} nontrivial links"
    if nonzero % 2 == 0:
        ok = row[2] == 1 and row[1] == nonzero - 1
    else:
        ok = row[1] == nonzero
    if not ok:
        return f"linking-number pattern {row.tolist()} breaks the parity classification"
    if result.sum_sq[i] not in (1, 3, 5, 7):
        return f"sum of squared linking numbers is {result.sum_sq[i]}"
    return None


def census(which: str, samples: int, seed: int, params: theory.TheoryParams = theory.DEFAULT,
           threads: int | None = None) -> CensusReport:
    """Sample K6 or K331 embeddings, verify each against its classification, report p1."""
    if which == "k6":
        g, check = complete_graph(6), check_k6_sample
        theory_p1, lower, expected = theory.k6_p1(params), False, 45 * params.q
    elif which == "k331":
        g, check = tripartite_331(), check_k331_sample
        theory_p1, lower, expected = theory.k331_p1_lower(params), True, theory.k331_expected_sum(params)
    else:
        raise ValueError(f"unknown census {which!r}")
    result = sample_link_tallies(g, samples, seed, threads=threads)
    for i in range(len(result)):
        why = check(result, i)
        if why:
            raise _violation(result, g, i, why)
    nonzero = result.nonzero()
    ones = int(np.count_nonzero(nonzero == 1))
    ci = bernoulli_ci99(ones, samples)
    nz_hist = {int(k): int(c) for k, c in zip(*np.unique(nonzero, return_counts=True))}
    sq_hist = {int(k): int(c) for k, c in zip(*np.unique(result.sum_sq, return_counts=True))}
    return CensusReport(which, samples, seed, ci.estimate, ci.halfwidth, theory_p1, lower,
                        float(result.sum_sq.mean()), expected, nz_hist, sq_hist, result.resamples)


# --- closed forms -----------------------------------------------------------


def theory_rows(model: str, ns, p: float | None, params: theory.TheoryParams) -> list[dict]:
    rows = []
    for n in ns:
        if model == "complete":
            expected = theory.expected_mean_sum_sq_link_complete(n, params)
            lo, hi = theory.link_sum_bounds(n, 1.0, params)
            row = {"model": "complete", "n": n, "p": 1.0, "expected": expected,
                   "lower_bound": lo, "upper_bound": hi}
            row["expected_sum_sq_writhe"] = (theory.expected_sum_sq_writhe_complete(n, params)
                                             if params.qprime is not None else None)
        else:
            expected = theory.expected_mean_sum_sq_link_np(n, p, params)
            lo, hi = theory.link_sum_bounds(n, p, params)
            row = {"model": "gnp", "n": n, "p": p, "expected": expected,
                   "lower_bound": lo, "upper_bound": hi}
        rows.append(row)
    return rows


def identity_rows(ns) -> list[dict]:
    rows = []
    for n in ns:
        lhs, rhs = counting_identity(n)
        rows.append({"n": n, "lhs": lhs, "rhs": rhs, "equal": lhs == rhs})
    return rows
