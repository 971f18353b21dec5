"""Observables of a mode state: norm, kinetic energy, mean position
(trembling motion), the boundary quantum force, and a discrete geometric
phase for the pair Hamiltonians.

Two force conventions are exposed.  The default ("corrected") series

    F_n = (n pi / L^2) (|a_n|^2 - |a_-n|^2)

satisfies <F> = -(1/Ldot) d<E>/dt identically in the continuum limit (this
follows from the pair equations; the energy's tau-derivative terms cancel).
The "paper-literal" variant drops the n pi factor and is kept for comparison.
Mean position likewise: <y> is dimensionless, <x> = L <y>.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import position_matrix
from .packet import ModeState
from .wall import WallMotion

FORCE_CONVENTIONS = ("corrected", "paper-literal")

MEAN_IMAG_LIMIT = 1e-10


@dataclass
class ObservableRecord:
    t: float
    tau: float
    L: float
    norm: float
    energy: float
    mean_y: float
    mean_x: float
    force: float
    force_fd: float = float("nan")


# -- array-level kernels (shared with the evolution loop) --------------------

def energy_from_coefficients(a0, a_plus, a_minus, L: float, m: float) -> float:
    n_pi = np.pi * np.arange(1, len(a_plus) + 1)
    kinetic = np.sum(n_pi * (np.abs(a_plus) ** 2 - np.abs(a_minus) ** 2)) / L
    mass = -m * abs(a0) ** 2 - 2.0 * m * float(
        np.sum((np.conj(a_plus) * a_minus).real)
    )
    return float(kinetic + mass)


def mean_y_from_vector(c: np.ndarray, v: np.ndarray) -> float:
    # fixed summation order (elementwise + pairwise sum); no BLAS so the
    # result is bit-stable across thread settings
    w = np.sum(v * c[None, :], axis=1)
    val = complex(np.sum(np.conj(c) * w))
    if abs(val.imag) > MEAN_IMAG_LIMIT:
        raise RuntimeError(
            f"mean position has imaginary residue {val.imag:.3e}; "
            "coefficient bookkeeping is corrupted"
        )
    return val.real


def force_from_coefficients(a_plus, a_minus, L: float,
                            convention: str = "corrected") -> float:
    weights = np.abs(a_plus) ** 2 - np.abs(a_minus) ** 2
    if convention == "corrected":
        weights = weights * (np.pi * np.arange(1, len(a_plus) + 1))
    elif convention != "paper-literal":
        raise ValueError(f"unknown force convention {convention!r}")
    return float(np.sum(weights)) / L**2


# -- state-level operations ---------------------------------------------------

def kinetic_energy(s: ModeState, m: float, w: WallMotion, t: float) -> float:
    """<E(t)>: the -m|a0|^2 term plus the pair series."""
    return energy_from_coefficients(s.a0, s.a_plus, s.a_minus, float(w.length(t)), m)


def mean_position(s: ModeState, w: WallMotion, t: float) -> tuple[float, float]:
    """(mean_y, mean_x) with mean_x = L(t) * mean_y."""
    c = s.index_vector()
    mean_y = mean_y_from_vector(c, position_matrix(s.n_max))
    return mean_y, float(w.length(t)) * mean_y


def quantum_force(s: ModeState, w: WallMotion, t: float,
                  convention: str = "corrected") -> float:
    """Back-reaction on the wall, -<dH/dL>."""
    return force_from_coefficients(
        s.a_plus, s.a_minus, float(w.length(t)), convention
    )


def record(s: ModeState, m: float, w: WallMotion, t: float, *,
           force_convention: str = "corrected") -> ObservableRecord:
    mean_y, mean_x = mean_position(s, w, t)
    return ObservableRecord(
        t=float(t),
        tau=s.tau,
        L=float(w.length(t)),
        norm=s.total_norm(),
        energy=kinetic_energy(s, m, w, t),
        mean_y=mean_y,
        mean_x=mean_x,
        force=quantum_force(s, w, t, force_convention),
    )


def force_from_energy_series(tau, energy, length, rate) -> np.ndarray:
    """Finite-difference companion of the force column.

    Second-order three-point derivative of <E> in tau (valid on the slightly
    non-uniform record grid), converted through F = -(dE/dtau) / (Ldot L).
    Endpoints and points with Ldot = 0 are nan.
    """
    tau = np.asarray(tau, dtype=float)
    energy = np.asarray(energy, dtype=float)
    length = np.asarray(length, dtype=float)
    rate = np.asarray(rate, dtype=float)
    out = np.full(tau.shape, np.nan)
    if len(tau) < 3:
        return out
    hm = tau[1:-1] - tau[:-2]
    hp = tau[2:] - tau[1:-1]
    dedtau = (
        -hp / (hm * (hm + hp)) * energy[:-2]
        + (hp - hm) / (hp * hm) * energy[1:-1]
        + hm / (hp * (hm + hp)) * energy[2:]
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        val = -dedtau / (rate[1:-1] * length[1:-1])
    val[~np.isfinite(val)] = np.nan
    out[1:-1] = val
    return out


def pair_hamiltonian(n: int, mL: float) -> np.ndarray:
    """The 2x2 Hermitian matrix coupling (a_n, a_-n); real symmetric."""
    npi = n * np.pi
    return np.array([[npi, -mL], [-mL, -npi]], dtype=float)


def berry_phase(n: int, cycle, band: str = "upper") -> float:
    """Discrete geometric phase of one pair band over a closed loop of
    mass-coupling values M = m L.

    Phase = -Im log prod_j <u(M_j)|u(M_{j+1})> over instantaneous
    eigenvectors; gauge- and eigenvector-sign-invariant for closed loops.
    Vanishes identically here because the pair Hamiltonians are real
    symmetric and the loop cannot encircle the (n pi = 0, M = 0) degeneracy.
    """
    if n < 1:
        raise ValueError("pair index n must be >= 1")
    ms = np.asarray(cycle, dtype=float)
    if ms.ndim != 1 or len(ms) < 3:
        raise ValueError("cycle must be a 1-d sequence of at least 3 values")
    scale = max(1.0, float(np.max(np.abs(ms))))
    if abs(ms[0] - ms[-1]) > 1e-12 * scale:
        raise ValueError("cycle must be closed (first value == last value)")
    ms = ms[:-1]  # drop the duplicated closing point; wrap instead
    npi = n * np.pi
    if np.min(np.hypot(npi, ms)) < 1e-12:
        raise ValueError("degenerate point (n pi = M = 0) on the loop")
    h = np.zeros((len(ms), 2, 2))
    h[:, 0, 0] = npi
    h[:, 1, 1] = -npi
    h[:, 0, 1] = -ms
    h[:, 1, 0] = -ms
    _, vecs = np.linalg.eigh(h)
    col = 1 if band == "upper" else 0
    u = vecs[:, :, col].astype(complex)
    overlaps = np.sum(np.conj(u) * np.roll(u, -1, axis=0), axis=1)
    return float(-np.angle(np.prod(overlaps)))
