"""Unitary evolution of the mode amplitudes in the wall-fixed frame.

The transformed problem lives on the unit interval with a time-dependent
mass coupling M(tau) = m L(t(tau)).  Each pair (a_n, a_-n) rotates under the
2x2 Hermitian matrix H_n = [[n pi, -M], [-M, -n pi]]; one step applies the
exact exponential of H_n frozen at the interval midpoint (second-order
Magnus), which is a closed-form rotation

    exp(-i H dtau) = cos(w dtau) I - i sin(w dtau) H / w,  w = |(n pi, M)|

and therefore exactly unitary.  The lab time t is carried along as the
integral of dt/dtau = L(t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .basis import position_matrix
from .observables import (
    energy_from_coefficients,
    force_from_coefficients,
    force_from_energy_series,
    mean_y_from_vector,
)
from .packet import ModeState
from .wall import WallMotion

# per-step change of any pair norm beyond this signals a broken stepper
PAIR_NORM_STEP_LIMIT = 1e-12
TOTAL_NORM_LIMIT = 1e-10


@dataclass(eq=False)
class Trajectory:
    """Record-grid history of one run plus integrator diagnostics."""

    tau: np.ndarray
    t: np.ndarray
    length: np.ndarray
    norm: np.ndarray
    energy: np.ndarray
    mean_y: np.ndarray
    mean_x: np.ndarray
    force: np.ndarray
    force_fd: np.ndarray
    dtau: float
    n_steps: int
    max_pair_norm_dev: float
    max_total_norm_dev: float
    final_state: ModeState | None = None
    states: list | None = field(default=None, repr=False)


def resolve_dtau(cfg) -> float:
    """Explicit dtau, or the auto rule: fastest pair frequency
    sqrt((n_max pi)^2 + (m max L)^2) times dtau <= 0.1."""
    if cfg.dtau is not None:
        return float(cfg.dtau)
    omega_max = math.hypot(cfg.n_max * math.pi, cfg.mass * cfg.wall.max_length())
    return 0.1 / omega_max


def _rotate(a_plus, a_minus, n_pi, mL: float, dtau: float):
    omega = np.hypot(n_pi, mL)
    theta = omega * dtau
    c = np.cos(theta)
    s = np.sin(theta) / omega
    new_plus = c * a_plus - 1j * s * (n_pi * a_plus - mL * a_minus)
    new_minus = c * a_minus - 1j * s * (-mL * a_plus - n_pi * a_minus)
    return new_plus, new_minus


def apply_pair_rotations(a_plus, a_minus, n_pi, mL_sequence, dtau: float):
    """Apply the midpoint rotations for a given mass-coupling sequence
    (low-level; used for reversibility checks)."""
    ap = np.array(a_plus, dtype=complex)
    am = np.array(a_minus, dtype=complex)
    for mL in mL_sequence:
        ap, am = _rotate(ap, am, n_pi, float(mL), dtau)
    return ap, am


def step_pair(n: int, pair, tau: float, dtau: float, m: float,
              w: WallMotion):
    """One exact-exponential step of the pair (a_n, a_-n); the coupling is
    evaluated at the tau midpoint."""
    if n < 1:
        raise ValueError("pair index n must be >= 1")
    if not dtau > 0.0:
        raise ValueError("dtau must be positive")
    pair = np.asarray(pair, dtype=complex)
    mL = m * float(w.length(w.t_of_tau(tau + 0.5 * dtau)))
    ap, am = _rotate(pair[0], pair[1], n * np.pi, mL, dtau)
    return np.array([ap, am])


def evolve_a0(a0_init: complex, m: float, t: float) -> complex:
    """Exact zero-mode solution a0(t) = a0(0) exp(i m t)."""
    return a0_init * complex(math.cos(m * t), math.sin(m * t))


def massless_solution(state0: ModeState, tau: float) -> ModeState:
    """Closed form at m = 0: a_{+-n}(tau) = a_{+-n}(0) e^{-+ i pi n tau}."""
    n = np.arange(1, state0.n_max + 1)
    phase = np.exp(-1j * np.pi * n * tau)
    return ModeState(
        state0.a0,
        state0.a_plus * phase,
        state0.a_minus * np.conj(phase),
        tau=tau,
        residual=state0.residual,
    )


def evolve(state0: ModeState, cfg, *, store_states: bool = False) -> Trajectory:
    """March all pairs and the zero mode over a uniform tau grid up to
    t_final, recording observables every cfg.record_every steps."""
    w = cfg.wall
    m = cfg.mass
    want_pos = "position" in cfg.outputs
    want_force = "force" in cfg.outputs
    nmax = state0.n_max

    dtau_target = resolve_dtau(cfg)
    tau_final = float(w.tau_of_t(cfg.t_final))
    n_steps = max(1, int(math.ceil(tau_final / dtau_target - 1e-9)))
    dtau = tau_final / n_steps
    tau_grid = dtau * np.arange(n_steps + 1)
    t_grid, t_mid = w.t_on_tau_grid(tau_grid)
    L_grid = np.asarray(w.length(t_grid), dtype=float)
    mL_mid = m * np.asarray(w.length(t_mid), dtype=float)

    rec_steps = list(range(0, n_steps + 1, cfg.record_every))
    if rec_steps[-1] != n_steps:
        rec_steps.append(n_steps)
    n_rec = len(rec_steps)
    rec_row = {step: row for row, step in enumerate(rec_steps)}

    n_pi = np.pi * np.arange(1, nmax + 1, dtype=float)
    ap = np.array(state0.a_plus, dtype=complex)
    am = np.array(state0.a_minus, dtype=complex)
    a0_abs2 = abs(state0.a0) ** 2
    # |a0| is conserved exactly; its phase accumulates m * integral(L dtau),
    # evaluated with the same midpoint rule as the pair stepper
    a0_phase = np.concatenate(([0.0], dtau * np.cumsum(mL_mid)))

    pair_ref = np.abs(ap) ** 2 + np.abs(am) ** 2
    pair_prev = pair_ref
    max_pair_dev = 0.0
    max_total_dev = abs(a0_abs2 + float(np.sum(pair_ref)) - 1.0)

    v_matrix = position_matrix(nmax) if want_pos else None
    norm_c = np.empty(n_rec)
    energy_c = np.empty(n_rec)
    mean_y_c = np.full(n_rec, np.nan)
    mean_x_c = np.full(n_rec, np.nan)
    force_c = np.full(n_rec, np.nan)
    states = [] if store_states else None

    def fill(row: int, step: int):
        a0_k = state0.a0 * np.exp(1j * a0_phase[step])
        L = L_grid[step]
        norm_c[row] = a0_abs2 + float(np.sum(np.abs(ap) ** 2 + np.abs(am) ** 2))
        energy_c[row] = energy_from_coefficients(a0_k, ap, am, L, m)
        if want_pos:
            c = np.concatenate((am[::-1], np.array([a0_k]), ap))
            mean_y_c[row] = mean_y_from_vector(c, v_matrix)
            mean_x_c[row] = L * mean_y_c[row]
        if want_force:
            force_c[row] = force_from_coefficients(ap, am, L, cfg.force_convention)
        if store_states:
            states.append(
                ModeState(a0_k, ap.copy(), am.copy(), tau=float(tau_grid[step]),
                          residual=state0.residual)
            )

    fill(0, 0)
    for k in range(n_steps):
        ap, am = _rotate(ap, am, n_pi, mL_mid[k], dtau)
        pair_now = np.abs(ap) ** 2 + np.abs(am) ** 2
        step_drift = float(np.max(np.abs(pair_now - pair_prev)))
        if step_drift > PAIR_NORM_STEP_LIMIT:
            raise RuntimeError(
                f"pair norm drifted by {step_drift:.3e} in one step at "
                f"tau = {tau_grid[k + 1]:.6g}; the stepper should be exactly "
                "unitary, this is a bug"
            )
        max_pair_dev = max(max_pair_dev, float(np.max(np.abs(pair_now - pair_ref))))
        total = a0_abs2 + float(np.sum(pair_now))
        max_total_dev = max(max_total_dev, abs(total - 1.0))
        pair_prev = pair_now
        row = rec_row.get(k + 1)
        if row is not None:
            fill(row, k + 1)

    tau_rec = tau_grid[rec_steps]
    t_rec = t_grid[rec_steps]
    L_rec = L_grid[rec_steps]
    rate_rec = np.asarray(w.length_rate(t_rec), dtype=float)
    if want_force:
        force_fd = force_from_energy_series(tau_rec, energy_c, L_rec, rate_rec)
    else:
        force_fd = np.full(n_rec, np.nan)

    final_state = ModeState(
        state0.a0 * np.exp(1j * a0_phase[-1]),
        ap.copy(),
        am.copy(),
        tau=float(tau_grid[-1]),
        residual=state0.residual,
    )
    return Trajectory(
        tau=tau_rec,
        t=t_rec,
        length=L_rec,
        norm=norm_c,
        energy=energy_c,
        mean_y=mean_y_c,
        mean_x=mean_x_c,
        force=force_c,
        force_fd=force_fd,
        dtau=dtau,
        n_steps=n_steps,
        max_pair_norm_dev=max_pair_dev,
        max_total_norm_dev=max_total_dev,
        final_state=final_state,
        states=states,
    )


def time_map_deviation(traj: Trajectory, w: WallMotion, samples: int = 9) -> float:
    """Spot-check the record grid against the quadrature time map:
    max |tau_of_t(t_i) - tau_i| over ~`samples` records."""
    idx = np.unique(np.linspace(0, len(traj.tau) - 1, samples).astype(int))
    return max(abs(float(w.tau_of_t(traj.t[i])) - float(traj.tau[i])) for i in idx)


def reconstruct_wavefunction(s: ModeState, w: WallMotion, t: float, x):
    """Physical-frame spinor  Psi(x, t) = L^{-1/2} sum_n a_n psi_n(x / L);
    x may be an array (last axis = spinor)."""
    L = float(w.length(t))
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > L * (1.0 + 1e-12)):
        raise ValueError(f"x = {x!r} outside the box [0, {L!r}]")
    y = np.clip(arr / L, 0.0, 1.0)
    n = np.arange(1, s.n_max + 1)
    ph = np.pi * np.multiply.outer(y, n)
    sin_m = np.sin(ph)
    cos_m = np.cos(ph)
    comp1 = np.sum(sin_m * (s.a_plus - s.a_minus), axis=-1)
    comp2 = -1j * (s.a0 + np.sum(cos_m * (s.a_plus + s.a_minus), axis=-1))
    return np.stack([comp1, comp2], axis=-1) / math.sqrt(L)
