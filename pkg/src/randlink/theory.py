"""Closed-form expected values, as functions of the constants q and q'.

Factorial coefficients are summed exactly as integers (or exact rationals when
an edge probability is involved) and converted to float only when multiplied
by q, so nothing cancels catastrophically at n ~ 20.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .errors import MissingQPrime, OutOfRange

Q_REFERENCE = 0.033867


@dataclass(frozen=True)
class TheoryParams:
    q: float = Q_REFERENCE
    qprime: float | None = None

    def require_qprime(self) -> float:
        if self.qprime is None:
            raise MissingQPrime("this formula needs q'")
        return self.qprime


DEFAULT = TheoryParams()


def expected_pair_sq_link(k: int, l: int, params: TheoryParams = DEFAULT) -> float:
    """Mean squared linking number of a random k-gon and l-gon: k l q / 2."""
    if k < 3 or l < 3:
        raise ValueError("cycle lengths must be at least 3")
    return 0.5 * k * l * params.q


def link_coefficient(n: int) -> int:
    """sum_{i=6}^{n} n!/(n-i)! (i-5); the mean sum of squared lk is q/16 times this."""
    if n < 6:
        raise ValueError("need n >= 6")
    nf = factorial(n)
    return sum(nf // factorial(n - i) * (i - 5) for i in range(6, n + 1))


def link_coefficient_np(n: int, p: float) -> Fraction:
    if n < 6:
        raise ValueError("need n >= 6")
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    pf = Fraction(p)
    nf = factorial(n)
    return sum((pf ** i * (nf // factorial(n - i) * (i - 5)) for i in range(6, n + 1)), Fraction(0))


def expected_mean_sum_sq_link_complete(n: int, params: TheoryParams = DEFAULT) -> float:
    return params.q * link_coefficient(n) / 16


def expected_mean_sum_sq_link_np(n: int, p: float, params: TheoryParams = DEFAULT) -> float:
    return params.q * float(link_coefficient_np(n, p)) / 16


def link_sum_bounds(n: int, p: float, params: TheoryParams = DEFAULT) -> tuple[float, float]:
    """(q/32) p^n n n!  and  (q/16) e^(1/p) p^n n n!."""
    base = p ** n * n * factorial(n)
    return params.q * base / 32, params.q * math.exp(1.0 / p) * base / 16


def cycle_count_coefficients(n: int) -> dict[int, int]:
    """Number of k-cycles in K_n, keyed by k."""
    nf = factorial(n)
    return {k: nf // factorial(n - k) // (2 * k) for k in range(3, n + 1)}


def expected_mean_sq_writhe(k: int, params: TheoryParams = DEFAULT) -> float:
    """q k^2 - (6q - q') k."""
    qp = params.require_qprime()
    if k < 3:
        raise ValueError("cycle length must be at least 3")
    q = params.q
    return q * k * k - (6 * q - qp) * k


def expected_sum_sq_writhe_complete(n: int, params: TheoryParams = DEFAULT) -> float:
    qp = params.require_qprime()
    if n < 3:
        raise ValueError("need n >= 3")
    counts = cycle_count_coefficients(n)
    quad = sum(k * k * c for k, c in counts.items())
    lin = sum(k * c for k, c in counts.items())
    q = params.q
    return q * quad - (6 * q - qp) * lin


def _probability(value: float, what: str) -> float:
    if -1e-12 < value < 0.0:
        value = 0.0
    elif 1.0 < value < 1.0 + 1e-12:
        value = 1.0
    if not 0.0 <= value <= 1.0:
        raise OutOfRange(f"{what} = {value} is not a probability")
    return value


def k6_p1(params: TheoryParams = DEFAULT) -> float:
    """Probability of exactly one Hopf link in K_6: (3 - 45q)/2."""
    return _probability((3 - 45 * params.q) / 2, "p1")


def k331_p1_lower(params: TheoryParams = DEFAULT) -> float:
    """Lower bound on the probability of exactly one nontrivial link in K_{3,3,1}."""
    return _probability((3 - 54 * params.q) / 2, "p1 lower bound")


def k331_expected_sum(params: TheoryParams = DEFAULT) -> float:
    return 54 * params.q
