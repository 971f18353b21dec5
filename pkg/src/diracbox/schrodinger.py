"""Nonrelativistic reference solver for the same moving box.

In the wall-fixed frame the problem reduces to a free particle on the unit
interval with the rescaled time tau2 = integral dt / L^2, so each sine mode
only picks up the phase exp(-i pi^2 n^2 tau2 / 2)  (units hbar = m = 1).
Used as an independent sanity layer: no time stepping at all.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .basis import cos_first_moment
from .errors import ResolutionError
from .observables import ObservableRecord, MEAN_IMAG_LIMIT
from .packet import SpinorPacket, default_panels, gaussian_profile
from .quadrature import gauss_legendre_panels
from .wall import WallMotion


@dataclass(eq=False)
class SchrodingerModeState:
    """Coefficients over sqrt(2/L) sin(n pi x / L), n = 1..n_max, at the
    rescaled time tau2."""

    c: np.ndarray
    tau2: float = 0.0
    residual: float | None = field(default=None, repr=False)

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=complex)

    @property
    def n_max(self) -> int:
        return len(self.c)

    def total_norm(self) -> float:
        return float(np.sum(np.abs(self.c) ** 2))


def schrodinger_project(p: SpinorPacket, w: WallMotion, n_max: int, *,
                        renormalize: bool = True, tail_threshold: float = 1e-8,
                        residual_limit: float = 1e-3,
                        panels: int | None = None) -> SchrodingerModeState:
    """Project the scalar Gaussian profile f(x) onto the sine basis at t = 0."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    L0 = float(w.length(0.0))
    if not (0.0 < p.x0 < L0):
        raise ValueError(f"packet center x0 = {p.x0!r} outside the box (0, {L0!r})")
    tail = p.tail_mass(L0)
    if tail > tail_threshold:
        warnings.warn(
            f"packet tail mass outside the box is {tail:.3e} "
            f"(threshold {tail_threshold:.1e})",
            stacklevel=2,
        )
    if panels is None:
        panels = default_panels(n_max, L0, p.d)
    x, wq = gauss_legendre_panels(0.0, L0, panels, 16)
    f = gaussian_profile(p, x)
    ph = np.pi * np.outer(np.arange(1, n_max + 1), x / L0)
    c = math.sqrt(2.0 / L0) * np.sum(np.sin(ph) * (wq * f)[None, :], axis=1)
    captured = float(np.sum(np.abs(c) ** 2))
    residual = 1.0 - captured
    if residual > residual_limit:
        raise ResolutionError(
            f"sine projection captures only {captured:.6f} of the norm "
            f"(residual {residual:.3e} > limit {residual_limit:.1e})"
        )
    if renormalize:
        c = c / math.sqrt(captured)
    return SchrodingerModeState(c, tau2=0.0, residual=residual)


def schrodinger_evolve(c0: SchrodingerModeState, w: WallMotion,
                       t: float) -> SchrodingerModeState:
    """Exact evolution to lab time t: pure per-mode phases, valid for any
    wall law."""
    tau2 = float(w.tau2_of_t(t))
    n2 = np.arange(1, c0.n_max + 1, dtype=float) ** 2
    phase = np.exp(-0.5j * np.pi**2 * n2 * (tau2 - c0.tau2))
    return SchrodingerModeState(c0.c * phase, tau2=tau2, residual=c0.residual)


@lru_cache(maxsize=16)
def sine_position_matrix(n_max: int) -> np.ndarray:
    """X_{nk} = integral_0^1 y 2 sin(n pi y) sin(k pi y) dy, n, k = 1..n_max."""
    n = np.arange(1, n_max + 1)
    diff = np.subtract.outer(n, n)
    total = np.add.outer(n, n)
    x = np.empty((n_max, n_max))
    for i in range(n_max):
        for j in range(n_max):
            x[i, j] = cos_first_moment(int(diff[i, j])) - cos_first_moment(
                int(total[i, j])
            )
    x.setflags(write=False)
    return x


def schrodinger_energy(s: SchrodingerModeState, L: float) -> float:
    n2 = np.arange(1, s.n_max + 1, dtype=float) ** 2
    return float(np.sum(np.pi**2 * n2 / (2.0 * L**2) * np.abs(s.c) ** 2))


def schrodinger_observables(s: SchrodingerModeState, w: WallMotion,
                            t: float) -> ObservableRecord:
    """Energy and mean position (the force columns do not apply here)."""
    L = float(w.length(t))
    x_mat = sine_position_matrix(s.n_max)
    weighted = np.sum(x_mat * s.c[None, :], axis=1)
    val = complex(np.sum(np.conj(s.c) * weighted))
    if abs(val.imag) > MEAN_IMAG_LIMIT:
        raise RuntimeError(
            f"mean position has imaginary residue {val.imag:.3e}"
        )
    mean_y = val.real
    return ObservableRecord(
        t=float(t),
        tau=s.tau2,
        L=L,
        norm=s.total_norm(),
        energy=schrodinger_energy(s, L),
        mean_y=mean_y,
        mean_x=L * mean_y,
        force=float("nan"),
        force_fd=float("nan"),
    )
