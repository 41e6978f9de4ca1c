"""Mergeable running moments and normal-approximation confidence intervals."""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist
from typing import Iterable

Z99 = NormalDist().inv_cdf(0.995)


@dataclass
class RunningMoments:
    """Count, mean and sum of squared deviations (Welford / Chan et al. merge)."""

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    def push(self, x: float) -> "RunningMoments":
        self.count += 1
        delta = x - self.mean
        self.mean += delta / self.count
        self.m2 += delta * (x - self.mean)
        return self

    def extend(self, xs: Iterable[float]) -> "RunningMoments":
        for x in xs:
            self.push(x)
        return self

    @property
    def variance(self) -> float:
        """Unbiased sample variance; 0 with fewer than two observations."""
        return self.m2 / (self.count - 1) if self.count > 1 else 0.0

    @property
    def stderr(self) -> float:
        return math.sqrt(self.variance / self.count) if self.count > 1 else 0.0


def push(m: RunningMoments, x: float) -> RunningMoments:
    return RunningMoments(m.count, m.mean, m.m2).push(x)


def merge(a: RunningMoments, b: RunningMoments) -> RunningMoments:
    if a.count == 0:
        return RunningMoments(b.count, b.mean, b.m2)
    if b.count == 0:
        return RunningMoments(a.count, a.mean, a.m2)
    n = a.count + b.count
    delta = b.mean - a.mean
    mean = a.mean + delta * b.count / n
    m2 = a.m2 + b.m2 + delta * delta * a.count * b.count / n
    return RunningMoments(n, mean, m2)


@dataclass(frozen=True)
class BernoulliCI:
    successes: int
    trials: int
    estimate: float
    halfwidth: float

    @property
    def interval(self) -> tuple[float, float]:
        return self.estimate - self.halfwidth, self.estimate + self.halfwidth


def bernoulli_ci99(successes: int, trials: int) -> BernoulliCI:
    """Normal-approximation 99% interval; half-width 0 when p-hat is 0 or 1."""
    if trials < 1:
        raise ValueError("need at least one trial")
    if not 0 <= successes <= trials:
        raise ValueError(f"successes {successes} outside [0, {trials}]")
    p = successes / trials
    return BernoulliCI(successes, trials, p, Z99 * math.sqrt(p * (1.0 - p) / trials))


def mean_ci99(total: float, total_sq: float, count: int) -> tuple[float, float]:
    """Mean and 99% half-width from a sum and a sum of squares."""
    if count < 1:
        raise ValueError("need at least one observation")
    mean = total / count
    if count < 2:
        return mean, 0.0
    var = max(0.0, (total_sq - count * mean * mean) / (count - 1))
    return mean, Z99 * math.sqrt(var / count)
