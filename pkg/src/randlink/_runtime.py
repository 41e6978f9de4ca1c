import logging
import os

import numba

log = logging.getLogger("randlink")

# the TBB layer shipped with some numba wheels is too old and warns on first use
if "NUMBA_THREADING_LAYER" not in os.environ:
    numba.config.THREADING_LAYER = "omp"


def max_threads() -> int:
    return numba.config.NUMBA_NUM_THREADS


def set_threads(threads: int | None) -> int:
    """Use ``threads`` workers (default: all), capped at NUMBA_NUM_THREADS."""
    cap = max_threads()
    if threads is None:
        threads = cap
    if threads < 1:
        raise ValueError("thread count must be positive")
    if threads > cap:
        log.warning("requested %d threads but NUMBA_NUM_THREADS=%d; using %d",
                    threads, cap, cap)
        threads = cap
    numba.set_num_threads(threads)
    return threads
