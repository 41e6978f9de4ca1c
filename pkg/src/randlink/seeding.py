"""Counter-based random streams.

Every sample draws from its own stream, keyed by
``(master_seed, sample_index, attempt, domain)``.  The key is built by
chaining the SplitMix64 finalizer::

    k0  = mix64(master_seed ^ 0x9E3779B97F4A7C15)
    k1  = mix64(k0 ^ sample_index)
    key = mix64(k1 ^ (attempt * 0xD1B54A32D192ED03 + domain * 0xAEF17502108EF2D9))

and the stream itself is SplitMix64 started at ``key``: each draw adds the
golden-ratio increment to the state and returns ``mix64(state)``.  Uniform
doubles are ``((z >> 11) + 0.5) * 2**-53``, i.e. strictly inside (0, 1).

Because a sample's stream depends only on its key, results are identical
whatever the thread count or execution order.  ``domain`` separates the
independent uses of one sample index (graph edges, vertex coordinates,
writhe directions, each constant estimator).  ``attempt`` is bumped when a
degenerate configuration forces a resample.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

MASK64 = (1 << 64) - 1

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_ATTEMPT_MUL = np.uint64(0xD1B54A32D192ED03)
_DOMAIN_MUL = np.uint64(0xAEF17502108EF2D9)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0

# stream domains
COORDS = 1
GRAPH = 2
DIRECTIONS = 3
TRIANGLES = 10
CONFIG_S = 11
CONFIG_U = 12
CONFIG_V = 13
CONFIG_W = 14
POLYGON = 20


@njit(cache=True)
def mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(cache=True)
def stream_key(master, index, attempt, domain):
    k = mix64(np.uint64(master) ^ GOLDEN)
    k = mix64(k ^ np.uint64(index))
    return mix64(k ^ (np.uint64(attempt) * _ATTEMPT_MUL + np.uint64(domain) * _DOMAIN_MUL))


@njit(cache=True)
def next_uniform(state):
    """Advance ``state``; return ``(u, new_state)`` with u in (0, 1)."""
    state = np.uint64(state) + GOLDEN
    z = mix64(state)
    return ((z >> _S11) + 0.5) * _INV53, state


def as_u64(value: int) -> np.uint64:
    return np.uint64(int(value) & MASK64)


@dataclass(frozen=True)
class SeedSpec:
    """Identifies one sample's random stream."""

    master_seed: int
    sample_index: int = 0
    attempt: int = 0

    def key(self, domain: int) -> np.uint64:
        return np.uint64(stream_key(as_u64(self.master_seed), as_u64(self.sample_index),
                                    as_u64(self.attempt), as_u64(domain)))

    def retry(self) -> "SeedSpec":
        return SeedSpec(self.master_seed, self.sample_index, self.attempt + 1)


def uniforms(seed: SeedSpec, domain: int, count: int) -> np.ndarray:
    """The first ``count`` draws of a stream, for use outside compiled code."""
    return _fill_uniforms(seed.key(domain), count)


@njit(cache=True)
def _fill_uniforms(state, count):
    out = np.empty(count)
    state = np.uint64(state)
    for i in range(count):
        out[i], state = next_uniform(state)
    return out
