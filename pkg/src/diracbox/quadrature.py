"""Composite Gauss-Legendre panels for oscillatory projection integrals."""

from __future__ import annotations

import numpy as np


def gauss_legendre_panels(a: float, b: float, n_panels: int, order: int = 16):
    """Nodes and weights of `n_panels` equal Gauss-Legendre panels on [a, b].

    Returns flat arrays (x, w) with len = n_panels * order, ordered left to
    right (deterministic summation order for callers).
    """
    if n_panels < 1 or order < 2:
        raise ValueError("need n_panels >= 1 and order >= 2")
    x0, w0 = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * x0[None, :]).ravel()
    w = (half[:, None] * w0[None, :]).ravel()
    return x, w
