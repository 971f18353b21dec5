"""Wall trajectories L(t) and the time maps shared by both solvers.

Every wall law carries a declared simulation window [0, t_final] and is
validated against it at construction: L must stay strictly positive there.
Two reparametrizations are exposed,

    tau(t)  = integral_0^t ds / L(s)        (relativistic solver)
    tau2(t) = integral_0^t ds / L(s)^2      (nonrelativistic reference)

with closed forms for the linear law and adaptive Gauss-Kronrod quadrature
(rel. tol 1e-12) otherwise.  Wall speeds |dL/dt| >= 1 (units hbar = c = 1)
are permitted but flagged with a warning.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .errors import WindowError

_QUAD_KW = dict(epsabs=1e-14, epsrel=1e-12, limit=800)


def _rk4_time_step(length_fn, t, h):
    # dt/dtau = L(t); autonomous RK4 step of size h in tau
    k1 = length_fn(t)
    k2 = length_fn(t + 0.5 * h * k1)
    k3 = length_fn(t + 0.5 * h * k2)
    k4 = length_fn(t + h * k3)
    return t + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


class WallMotion:
    """Base class; concrete laws implement length/length_rate and may
    override the time maps with closed forms."""

    t_final: float

    # -- window handling --------------------------------------------------

    def _window_slack(self) -> float:
        return 1e-9 * max(1.0, self.t_final)

    def _check(self, t):
        arr = np.asarray(t, dtype=float)
        slack = self._window_slack()
        if np.any(arr < -slack) or np.any(arr > self.t_final + slack):
            raise WindowError(
                f"time {t!r} outside declared window [0, {self.t_final!r}]"
            )
        return arr

    @staticmethod
    def _ret(arr):
        return arr if arr.ndim else float(arr)

    def _validate_positive_on_window(self, samples: int = 2049):
        ts = np.linspace(0.0, self.t_final, samples)
        ls = np.asarray(self._length_raw(ts))
        if np.any(ls <= 0.0):
            bad = float(ts[int(np.argmin(ls))])
            raise WindowError(
                f"wall length is nonpositive near t = {bad:.6g}; "
                f"window [0, {self.t_final!r}] is invalid for this law"
            )

    def _warn_if_superluminal(self):
        if self.max_rate() >= 1.0:
            warnings.warn(
                "wall speed reaches |dL/dt| >= 1 (the light speed in these "
                "units) inside the window; the evolution stays unitary but "
                "the regime is physically questionable",
                stacklevel=3,
            )

    # -- law surface -------------------------------------------------------

    def _length_raw(self, t):
        raise NotImplementedError

    def _length_scalar(self, t: float) -> float:
        # fast scalar path for the time-grid integrator
        return float(self._length_raw(t))

    def length(self, t):
        """L(t); accepts scalars or arrays inside the declared window."""
        arr = self._check(t)
        out = np.asarray(self._length_raw(arr), dtype=float)
        if np.any(out <= 0.0):
            raise WindowError(f"configuration error: L(t) <= 0 at t = {t!r}")
        return self._ret(out)

    def length_rate(self, t):
        """dL/dt at t (exact for the analytic laws, spline derivative for
        tabulated ones)."""
        raise NotImplementedError

    # -- time maps ---------------------------------------------------------

    def tau_of_t(self, t):
        """tau(t) = integral of 1/L from 0 to t (strictly increasing)."""
        arr = self._check(t)

        def one(tv: float) -> float:
            if tv == 0.0:
                return 0.0
            val, _ = quad(lambda s: 1.0 / self._length_scalar(s), 0.0, tv, **_QUAD_KW)
            return val

        if arr.ndim:
            return np.array([one(float(v)) for v in arr.ravel()]).reshape(arr.shape)
        return one(float(arr))

    def tau2_of_t(self, t):
        """tau2(t) = integral of 1/L^2 from 0 to t."""
        arr = self._check(t)

        def one(tv: float) -> float:
            if tv == 0.0:
                return 0.0
            val, _ = quad(
                lambda s: 1.0 / self._length_scalar(s) ** 2, 0.0, tv, **_QUAD_KW
            )
            return val

        if arr.ndim:
            return np.array([one(float(v)) for v in arr.ravel()]).reshape(arr.shape)
        return one(float(arr))

    def t_of_tau(self, tau):
        """Inverse of tau_of_t on the declared window (root find)."""
        tau = float(tau)
        tau_max = float(self.tau_of_t(self.t_final))
        slack = 1e-9 * max(1.0, tau_max)
        if tau < -slack or tau > tau_max + slack:
            raise WindowError(
                f"tau = {tau!r} outside achievable range [0, {tau_max!r}]"
            )
        tau = min(max(tau, 0.0), tau_max)
        if tau == 0.0:
            return 0.0
        if tau == tau_max:
            return float(self.t_final)
        return float(
            brentq(
                lambda t: self.tau_of_t(t) - tau,
                0.0,
                self.t_final,
                xtol=1e-14,
                rtol=8.9e-16,
                maxiter=200,
            )
        )

    def t_on_tau_grid(self, tau_grid):
        """March dt/dtau = L(t) over a tau grid.

        Returns (t at grid points, t at interval midpoints).  RK4 with two
        half-steps per interval; global error is O(dtau^4) which keeps the
        grid consistent with tau_of_t far below 1e-9 at desk-scale steps.
        """
        tg = np.asarray(tau_grid, dtype=float)
        n = len(tg) - 1
        t = np.empty(n + 1)
        tm = np.empty(n)
        t[0] = 0.0
        cur = 0.0
        lfn = self._length_scalar
        for i in range(n):
            h = 0.5 * (tg[i + 1] - tg[i])
            mid = _rk4_time_step(lfn, cur, h)
            tm[i] = mid
            cur = _rk4_time_step(lfn, mid, h)
            t[i + 1] = cur
        return t, tm

    # -- window extrema (bounds, not necessarily attained) ------------------

    def min_length(self) -> float:
        ts = np.linspace(0.0, self.t_final, 4097)
        return float(np.min(self._length_raw(ts)))

    def max_length(self) -> float:
        ts = np.linspace(0.0, self.t_final, 4097)
        return float(np.max(self._length_raw(ts)))

    def max_rate(self) -> float:
        ts = np.linspace(0.0, self.t_final, 4097)
        return float(np.max(np.abs(np.asarray(self.length_rate(ts)))))


@dataclass
class LinearWall(WallMotion):
    """L(t) = A + B t."""

    A: float
    B: float = 0.0
    t_final: float = field(kw_only=True, default=math.inf)

    def __post_init__(self):
        if not (self.A > 0.0):
            raise WindowError(f"initial length A must be positive, got {self.A!r}")
        if not (math.isfinite(self.t_final) and self.t_final > 0.0):
            raise WindowError(
                f"a finite positive window t_final is required, got {self.t_final!r}"
            )
        if self.B < 0.0 and self.A + self.B * self.t_final <= 0.0:
            raise WindowError(
                f"contracting wall reaches zero at t = {self.A / -self.B:.6g}, "
                f"inside the window [0, {self.t_final!r}]"
            )
        self._warn_if_superluminal()

    def _length_raw(self, t):
        return self.A + self.B * np.asarray(t, dtype=float)

    def _length_scalar(self, t):
        return self.A + self.B * t

    def length_rate(self, t):
        arr = self._check(t)
        return self._ret(np.full(arr.shape, float(self.B)))

    def tau_of_t(self, t):
        arr = self._check(t)
        if self.B == 0.0:
            return self._ret(arr / self.A)
        return self._ret(np.log1p(self.B * arr / self.A) / self.B)

    def tau2_of_t(self, t):
        arr = self._check(t)
        if self.B == 0.0:
            return self._ret(arr / self.A**2)
        return self._ret((1.0 / self.A - 1.0 / (self.A + self.B * arr)) / self.B)

    def t_of_tau(self, tau):
        tau_max = float(self.tau_of_t(self.t_final))
        slack = 1e-9 * max(1.0, tau_max)
        tau = float(tau)
        if tau < -slack or tau > tau_max + slack:
            raise WindowError(
                f"tau = {tau!r} outside achievable range [0, {tau_max!r}]"
            )
        if self.B == 0.0:
            return self.A * tau
        return self.A * math.expm1(self.B * tau) / self.B

    def t_on_tau_grid(self, tau_grid):
        tg = np.asarray(tau_grid, dtype=float)
        mids = 0.5 * (tg[1:] + tg[:-1])
        if self.B == 0.0:
            return self.A * tg, self.A * mids
        return (
            self.A * np.expm1(self.B * tg) / self.B,
            self.A * np.expm1(self.B * mids) / self.B,
        )

    def min_length(self):
        return float(min(self.A, self.A + self.B * self.t_final))

    def max_length(self):
        return float(max(self.A, self.A + self.B * self.t_final))

    def max_rate(self):
        return abs(float(self.B))


@dataclass
class OscillatingWall(WallMotion):
    """L(t) = A + B sin(omega t), |B| < A."""

    A: float
    B: float
    omega: float
    t_final: float = field(kw_only=True, default=math.inf)

    def __post_init__(self):
        if not (self.A > 0.0):
            raise WindowError(f"mean length A must be positive, got {self.A!r}")
        if not (abs(self.B) < self.A):
            raise WindowError(
                f"oscillating wall requires |B| < A, got B={self.B!r}, A={self.A!r}"
            )
        if not (self.omega > 0.0):
            raise WindowError(f"angular frequency must be positive, got {self.omega!r}")
        if not (math.isfinite(self.t_final) and self.t_final > 0.0):
            raise WindowError(
                f"a finite positive window t_final is required, got {self.t_final!r}"
            )
        self._warn_if_superluminal()

    def _length_raw(self, t):
        return self.A + self.B * np.sin(self.omega * np.asarray(t, dtype=float))

    def _length_scalar(self, t):
        return self.A + self.B * math.sin(self.omega * t)

    def length_rate(self, t):
        arr = self._check(t)
        return self._ret(self.B * self.omega * np.cos(self.omega * arr))

    # |B| < A makes these bounds valid on any window
    def min_length(self):
        return self.A - abs(self.B)

    def max_length(self):
        return self.A + abs(self.B)

    def max_rate(self):
        return abs(self.B) * self.omega


@dataclass
class TabulatedWall(WallMotion):
    """Wall sampled at strictly increasing times, interpolated with a cubic
    spline (twice differentiable so dL/dt is smooth in the force identity)."""

    times: tuple
    lengths: tuple
    t_final: float = field(kw_only=True, default=math.nan)

    def __post_init__(self):
        self.times = tuple(float(v) for v in self.times)
        self.lengths = tuple(float(v) for v in self.lengths)
        if len(self.times) != len(self.lengths) or len(self.times) < 4:
            raise WindowError("tabulated wall needs >= 4 (time, length) samples")
        ts = np.asarray(self.times)
        if np.any(np.diff(ts) <= 0.0):
            raise WindowError("tabulated sample times must be strictly increasing")
        if math.isnan(self.t_final):
            self.t_final = self.times[-1]
        if not (self.t_final > 0.0):
            raise WindowError(f"window t_final must be positive, got {self.t_final!r}")
        if self.times[0] > 0.0 or self.times[-1] < self.t_final:
            raise WindowError(
                f"samples must cover the window [0, {self.t_final!r}]; "
                f"got [{self.times[0]!r}, {self.times[-1]!r}]"
            )
        if min(self.lengths) <= 0.0:
            raise WindowError("tabulated lengths must all be positive")
        self._spline = CubicSpline(self.times, self.lengths, bc_type="natural")
        self._dspline = self._spline.derivative()
        # the cubic interpolant can undershoot between positive samples
        self._validate_positive_on_window()
        self._warn_if_superluminal()

    def __eq__(self, other):
        if not isinstance(other, TabulatedWall):
            return NotImplemented
        return (
            self.times == other.times
            and self.lengths == other.lengths
            and self.t_final == other.t_final
        )

    def _length_raw(self, t):
        return self._spline(np.asarray(t, dtype=float))

    def _length_scalar(self, t):
        return float(self._spline(t))

    def length_rate(self, t):
        arr = self._check(t)
        return self._ret(np.asarray(self._dspline(arr), dtype=float))

    def max_rate(self):
        ts = np.linspace(0.0, self.t_final, 4097)
        return float(np.max(np.abs(self._dspline(ts))))
