"""Massless eigenbasis on the unit interval and its matrix elements.

Mode n in Z maps to the spinor (sin(n pi y), -i cos(n pi y)); the first
component vanishes at both ends, which is the boundary condition the box
imposes.  The mode set is orthonormal and complete for spinors whose first
component vanishes at the endpoints.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


def eigenfunction(n: int, y):
    """Mode-n spinor at y in [0, 1]; y may be an array (last axis = spinor)."""
    arr = np.asarray(y, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError(f"y = {y!r} outside [0, 1]")
    ph = n * np.pi * arr
    return np.stack(
        [np.sin(ph).astype(complex), -1j * np.cos(ph)],
        axis=-1,
    )


def cos_first_moment(j: int) -> float:
    """integral_0^1 y cos(j pi y) dy for integer j."""
    if j == 0:
        return 0.5
    return ((-1.0) ** j - 1.0) / (np.pi**2 * j**2)


def position_matrix_element(n: int, k: int) -> float:
    """V_{nk} = integral_0^1 y psi_n^dag psi_k dy; depends only on n - k."""
    return cos_first_moment(n - k)


def beta_matrix_element(n: int, k: int) -> float:
    """integral_0^1 psi_n^dag beta psi_k dy = -delta_{n,-k} (mass coupling
    pairs +n with -n)."""
    return -1.0 if n == -k else 0.0


def mode_indices(n_max: int) -> np.ndarray:
    """Canonical index order used for dense matrices: -n_max .. n_max."""
    return np.arange(-n_max, n_max + 1)


@lru_cache(maxsize=16)
def position_matrix(n_max: int) -> np.ndarray:
    """Dense V over mode_indices(n_max); cached, read-only."""
    idx = mode_indices(n_max)
    diff = np.subtract.outer(idx, idx)
    with np.errstate(divide="ignore", invalid="ignore"):
        v = (np.power(-1.0, diff) - 1.0) / (np.pi**2 * diff.astype(float) ** 2)
    v[diff == 0] = 0.5
    v.setflags(write=False)
    return v
