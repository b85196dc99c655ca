"""Pure-numpy vertex enumeration for small linear inequality systems.

Every vertex of {x : A x <= b} is the solution of d active constraints, so
for the tiny systems used here (d = 4, a few tens of rows) exhaustive
enumeration of all d-subsets is exact and fast enough.  The compiled
backend in ``_vertex_cy`` implements the same contract.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=64)
def _combo_indices(m: int, d: int) -> np.ndarray:
    return np.array(list(itertools.combinations(range(m), d)), dtype=np.intp)


def enumerate_vertices(A: np.ndarray, b: np.ndarray,
                       feas_tol: float = 1e-12,
                       pivot_tol: float = 1e-12) -> np.ndarray:
    """Candidate vertices of {x : A x <= b}, unfiltered for duplicates.

    Sub-systems whose normalized determinant falls below pivot_tol are
    skipped as degenerate; remaining solutions are kept when they satisfy
    every constraint within feas_tol.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    m, d = A.shape
    if m < d:
        return np.empty((0, d))
    idx = _combo_indices(m, d)
    sub_a = A[idx]                    # (n_c, d, d)
    sub_b = b[idx]                    # (n_c, d)
    row_norms = np.linalg.norm(sub_a, axis=2)
    scale = np.prod(np.where(row_norms > 0.0, row_norms, 1.0), axis=1)
    ok = (row_norms.min(axis=1) > 0.0)
    det = np.zeros(len(idx))
    det[ok] = np.linalg.det(sub_a[ok])
    ok &= np.abs(det) > pivot_tol * scale
    if not ok.any():
        return np.empty((0, d))
    x = np.linalg.solve(sub_a[ok], sub_b[ok][..., None])[..., 0]
    feasible = np.all(x @ A.T <= b[None, :] + feas_tol, axis=1)
    return x[feasible]
