"""Linking numbers and writhe of cycles in random linear graph embeddings."""

from . import _runtime  # noqa: F401  (selects the numba threading layer first)

__version__ = "0.1.0"
