"""Bounded polytopes {x : A x <= b} with exact extrema of linear maps.

The systems solved here are small (4 variables, ~20 rows) but appear in
the innermost loop of intensity optimization, so the vertex enumeration
kernel has a compiled implementation with a numpy fallback.  Set the
environment variable RFIQKD_PURE_PYTHON=1 before import to force the
fallback.
"""

from __future__ import annotations

import os
from functools import cached_property

import numpy as np

from . import _vertex_py

try:
    from . import _vertex_cy
except ImportError:  # pragma: no cover - build without the extension
    _vertex_cy = None

if _vertex_cy is not None and os.environ.get("RFIQKD_PURE_PYTHON", "0") in ("", "0"):
    BACKEND = "cython"
    _kernel = _vertex_cy.enumerate_vertices
else:
    BACKEND = "python"
    _kernel = _vertex_py.enumerate_vertices

# Vertices closer than this (max-norm) are duplicates of one geometric
# vertex reached through different active sets.
_DEDUP_TOL = 1e-9


class EmptyPolytopeError(RuntimeError):
    """No point satisfies the constraint system."""


def _dedup(vertices: np.ndarray) -> np.ndarray:
    if len(vertices) < 2:
        return vertices
    order = np.lexsort(vertices.T[::-1])
    v = vertices[order]
    keep = np.empty(len(v), dtype=bool)
    keep[0] = True
    last = 0
    for i in range(1, len(v)):
        if np.max(np.abs(v[i] - v[last])) > _DEDUP_TOL:
            keep[i] = True
            last = i
        else:
            keep[i] = False
    return v[keep]


def enumerate_vertices(A: np.ndarray, b: np.ndarray,
                       feas_tol: float = 1e-12) -> np.ndarray:
    """Deduplicated vertices of {x : A x <= b}, lexicographically sorted."""
    raw = _kernel(np.asarray(A, dtype=float), np.asarray(b, dtype=float),
                  feas_tol)
    return _dedup(np.asarray(raw))


class Polytope:
    """A bounded constraint system with cached vertices."""

    def __init__(self, A: np.ndarray, b: np.ndarray, feas_tol: float = 1e-12):
        self.A = np.asarray(A, dtype=float)
        self.b = np.asarray(b, dtype=float)
        self.feas_tol = feas_tol

    @cached_property
    def vertices(self) -> np.ndarray:
        return enumerate_vertices(self.A, self.b, self.feas_tol)

    @property
    def is_empty(self) -> bool:
        return len(self.vertices) == 0

    def extrema(self, objective: np.ndarray) -> tuple[float, float]:
        """(min, max) of objective . x over the polytope.

        Exact for bounded non-empty systems, where the optimum of a linear
        map is attained at a vertex.
        """
        if self.is_empty:
            raise EmptyPolytopeError("constraint system has no feasible point")
        values = self.vertices @ np.asarray(objective, dtype=float)
        return (float(values.min()), float(values.max()))

    def contains(self, x: np.ndarray, tol: float = 1e-9) -> bool:
        return bool(np.all(self.A @ np.asarray(x, dtype=float) <= self.b + tol))
