"""Gaussian spinor packets and their projection onto the truncated basis."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc

from .errors import ResolutionError
from .quadrature import gauss_legendre_panels
from .wall import WallMotion


@dataclass
class SpinorPacket:
    """Gaussian packet: width d, center x0, velocity v0, spin amplitudes
    (s1, s2).  The profile is normalized to unit norm over the real line."""

    d: float
    x0: float
    v0: float = 0.0
    s1: complex = 1.0 + 0.0j
    s2: complex = 0.0 + 0.0j

    def __post_init__(self):
        if not (self.d > 0.0):
            raise ValueError(f"packet width d must be positive, got {self.d!r}")
        self.s1 = complex(self.s1)
        self.s2 = complex(self.s2)
        if abs(self.s1) ** 2 + abs(self.s2) ** 2 <= 0.0:
            raise ValueError("spin amplitudes s1, s2 must not both vanish")

    def spinor(self) -> np.ndarray:
        s = np.array([self.s1, self.s2], dtype=complex)
        return s / math.sqrt(abs(self.s1) ** 2 + abs(self.s2) ** 2)

    def tail_mass(self, L0: float) -> float:
        """Probability mass of |f|^2 outside [0, L0] (|f|^2 is normal with
        mean x0 and standard deviation d)."""
        a = self.x0 / (self.d * math.sqrt(2.0))
        b = (L0 - self.x0) / (self.d * math.sqrt(2.0))
        return 0.5 * (float(erfc(a)) + float(erfc(b)))


def gaussian_profile(p: SpinorPacket, x):
    """f(x) = (d sqrt(2 pi))^(-1/2) exp(-(x - x0)^2 / 4 d^2 + i v0 x)."""
    arr = np.asarray(x, dtype=float)
    pref = (p.d * math.sqrt(2.0 * math.pi)) ** -0.5
    return pref * np.exp(-((arr - p.x0) ** 2) / (4.0 * p.d**2) + 1j * p.v0 * arr)


def packet_value(p: SpinorPacket, L0: float, x):
    """Spinor value f(x) * (s1, s2)/|s| at x in [0, L0] (last axis = spinor)."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > L0):
        raise ValueError(f"x = {x!r} outside the box [0, {L0!r}]")
    f = gaussian_profile(p, arr)
    return np.multiply.outer(f, p.spinor())


@dataclass(eq=False)
class ModeState:
    """Truncated expansion coefficients at one evolution time tau.

    a_plus[j] and a_minus[j] hold the amplitudes of modes +(j+1) and -(j+1);
    the mass couples each such pair.
    """

    a0: complex
    a_plus: np.ndarray
    a_minus: np.ndarray
    tau: float = 0.0
    residual: float | None = field(default=None, repr=False)

    def __post_init__(self):
        self.a_plus = np.asarray(self.a_plus, dtype=complex)
        self.a_minus = np.asarray(self.a_minus, dtype=complex)
        if self.a_plus.shape != self.a_minus.shape or self.a_plus.ndim != 1:
            raise ValueError("a_plus and a_minus must be 1-d arrays of equal length")
        self.a0 = complex(self.a0)

    @property
    def n_max(self) -> int:
        return len(self.a_plus)

    def pair_norms(self) -> np.ndarray:
        """|a_n|^2 + |a_-n|^2 for n = 1..n_max (conserved by the evolution)."""
        return np.abs(self.a_plus) ** 2 + np.abs(self.a_minus) ** 2

    def total_norm(self) -> float:
        return abs(self.a0) ** 2 + float(np.sum(self.pair_norms()))

    def coefficient(self, n: int) -> complex:
        if n == 0:
            return self.a0
        if abs(n) > self.n_max:
            raise IndexError(f"|n| = {abs(n)} exceeds truncation {self.n_max}")
        return complex(self.a_plus[n - 1] if n > 0 else self.a_minus[-n - 1])

    def index_vector(self) -> np.ndarray:
        """Coefficients ordered by mode index -n_max .. n_max."""
        return np.concatenate(
            (self.a_minus[::-1], np.array([self.a0], dtype=complex), self.a_plus)
        )

    def copy(self) -> "ModeState":
        return ModeState(
            self.a0, self.a_plus.copy(), self.a_minus.copy(), self.tau, self.residual
        )


def default_panels(n_max: int, L0: float, d: float | None = None) -> int:
    """Panel count giving >= 8 Gauss-Legendre nodes per half-wave of the
    highest retained mode (order-16 panels), and panels no wider than ~2d."""
    p = max((n_max + 1) // 2, 8)
    if d is not None and d > 0.0:
        p = max(p, math.ceil(L0 / (2.0 * d)))
    return p


def project_function(psi_fn, L0: float, n_max: int, *, panels: int | None = None,
                     order: int = 16):
    """Project a spinor field onto modes |n| <= n_max by panel quadrature.

    psi_fn(x) must return an array with the spinor on the last axis.
    Returns raw (a0, a_plus, a_minus) without normalization.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if panels is None:
        panels = max(n_max, 16)
    x, w = gauss_legendre_panels(0.0, L0, panels, order)
    psi = np.asarray(psi_fn(x))
    w1 = w * psi[:, 0]
    w2 = w * psi[:, 1]
    narr = np.arange(1, n_max + 1)
    ph = np.pi * np.outer(narr, x / L0)
    # a_n = L0^{-1/2} int [ sin(n pi y) psi_1 + i cos(n pi y) psi_2 ] dx
    s_int = np.sum(np.sin(ph) * w1[None, :], axis=1)
    c_int = np.sum(np.cos(ph) * w2[None, :], axis=1)
    pref = 1.0 / math.sqrt(L0)
    a0 = pref * 1j * np.sum(w2)
    a_plus = pref * (s_int + 1j * c_int)
    a_minus = pref * (-s_int + 1j * c_int)
    return a0, a_plus, a_minus


def project_initial(p: SpinorPacket, w: WallMotion, n_max: int, *,
                    renormalize: bool = True, tail_threshold: float = 1e-8,
                    residual_limit: float = 1e-3, panels: int | None = None,
                    order: int = 16) -> ModeState:
    """Expand the packet at t = 0 over the truncated basis.

    The truncation residual r = 1 - sum |a_n|^2 is recorded on the returned
    state; above `residual_limit` the projection is rejected as
    under-resolved.  With `renormalize` (default) the coefficients are
    rescaled so the stored norm is exactly 1.
    """
    L0 = float(w.length(0.0))
    if not (0.0 < p.x0 < L0):
        raise ValueError(f"packet center x0 = {p.x0!r} outside the box (0, {L0!r})")
    tail = p.tail_mass(L0)
    if tail > tail_threshold:
        warnings.warn(
            f"packet tail mass outside the box is {tail:.3e} "
            f"(threshold {tail_threshold:.1e}); move x0 or shrink d",
            stacklevel=2,
        )
    if panels is None:
        panels = default_panels(n_max, L0, p.d)
    a0, ap, am = project_function(
        lambda x: packet_value(p, L0, x), L0, n_max, panels=panels, order=order
    )
    captured = abs(a0) ** 2 + float(np.sum(np.abs(ap) ** 2 + np.abs(am) ** 2))
    residual = 1.0 - captured
    if residual > residual_limit:
        raise ResolutionError(
            f"projection captures only {captured:.6f} of the norm "
            f"(residual {residual:.3e} > limit {residual_limit:.1e}); "
            "raise n_max or shrink the packet width"
        )
    if renormalize:
        scale = 1.0 / math.sqrt(captured)
        a0, ap, am = a0 * scale, ap * scale, am * scale
    return ModeState(a0, ap, am, tau=0.0, residual=residual)
