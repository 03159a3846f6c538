"""Enumeration kernel: compiled fast path with a pure-Python fallback.

`assignment_chunks` streams candidate-index assignment rows for a
radius-bounded substitution space; which implementation backs it is decided
once at import time and reported by `BACKEND`.
"""

from . import _enum_py

try:
    from . import _enum_cy

    assignment_chunks = _enum_cy.assignment_chunks
    BACKEND = "cython"
except ImportError:  # extension not built; pure Python is semantically identical
    _enum_cy = None
    assignment_chunks = _enum_py.assignment_chunks
    BACKEND = "python"


def backends() -> dict:
    """Available kernel implementations keyed by name (for tests/benchmarks)."""
    out = {"python": _enum_py.assignment_chunks}
    if _enum_cy is not None:
        out["cython"] = _enum_cy.assignment_chunks
    return out


__all__ = ["assignment_chunks", "backends", "BACKEND"]
