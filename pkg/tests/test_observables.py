import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import energy_quadrature
from diracbox import (
    LinearWall,
    OscillatingWall,
    SpinorPacket,
    berry_phase,
    evolve,
    kinetic_energy,
    massless_solution,
    mean_position,
    project_initial,
    quantum_force,
)
from diracbox.basis import position_matrix_element
from diracbox.config import SimConfig
from diracbox.observables import (
    force_from_coefficients,
    force_from_energy_series,
    record,
)
from diracbox.packet import ModeState


def normalized_random_state(n_max, seed):
    rng = np.random.default_rng(seed)
    a0 = rng.normal() + 1j * rng.normal()
    ap = rng.normal(size=n_max) + 1j * rng.normal(size=n_max)
    am = rng.normal(size=n_max) + 1j * rng.normal(size=n_max)
    s = ModeState(a0, ap, am)
    scale = math.sqrt(s.total_norm())
    return ModeState(a0 / scale, ap / scale, am / scale)


WALL2 = LinearWall(A=2.0, t_final=1.0)


class TestKineticEnergy:
    def test_massless_single_mode(self):
        s = ModeState(0.0, np.array([1.0 + 0j]), np.array([0j]))
        assert kinetic_energy(s, 0.0, WALL2, 0.0) == pytest.approx(
            math.pi / 2.0, rel=1e-15
        )

    def test_zero_mode_rest_energy(self):
        s = ModeState(1.0, np.array([0j]), np.array([0j]))
        assert kinetic_energy(s, 1.0, WALL2, 0.0) == -1.0

    def test_series_vs_quadrature_oracle_randomized(self):
        w = OscillatingWall(A=4.0, B=0.5, omega=1.5, t_final=10.0)
        for seed in range(10):
            s = normalized_random_state(12, seed)
            t = 0.9 * seed
            e_series = kinetic_energy(s, 1.3, w, t)
            e_quad = energy_quadrature(s, 1.3, w, t)
            assert abs(e_series - e_quad) <= 1e-6 * max(abs(e_series), 1e-6)


class TestMeanPosition:
    def test_single_mode(self):
        s = ModeState(0.0, np.array([1.0 + 0j]), np.array([0j]))
        mean_y, mean_x = mean_position(s, WALL2, 0.0)
        assert mean_y == pytest.approx(0.5, abs=1e-15)
        assert mean_x == pytest.approx(1.0, abs=1e-15)

    def test_two_mode_superposition(self):
        s = ModeState(0.0, np.array([1.0, 1.0]) / math.sqrt(2.0),
                      np.array([0j, 0j]))
        mean_y, _ = mean_position(s, WALL2, 0.0)
        assert mean_y == pytest.approx(0.5 - 2.0 / math.pi**2, rel=1e-14)

    def test_massless_linear_wall_matches_double_sum_oracle(self):
        w = LinearWall(A=10.0, B=0.1, t_final=100.0)
        packet = SpinorPacket(d=0.3, x0=4.0, v0=1.0, s1=1.0, s2=0.4j)
        s0 = project_initial(packet, w, 24)
        idx = np.arange(-24, 25)
        c0 = s0.index_vector()
        for tau in (0.3, 1.7, 4.1):
            s = massless_solution(s0, tau)
            got, _ = mean_position(s, w, w.t_of_tau(tau))
            # independent double sum over the initial data with explicit phases
            ref = 0.0
            for i, n in enumerate(idx):
                for j, k in enumerate(idx):
                    ref += (
                        np.conj(c0[i]) * c0[j]
                        * np.exp(1j * np.pi * (n - k) * tau)
                        * position_matrix_element(int(n), int(k))
                    ).real
            assert got == pytest.approx(ref, abs=1e-8)

    def test_mean_y_stays_in_unit_interval(self):
        for seed in range(5):
            s = normalized_random_state(10, seed)
            mean_y, _ = mean_position(s, WALL2, 0.0)
            assert 0.0 <= mean_y <= 1.0


class TestQuantumForce:
    def test_massless_single_mode_corrected(self):
        s = ModeState(0.0, np.array([1.0 + 0j]), np.array([0j]))
        # -d(pi/L)/dL at L = 2
        assert quantum_force(s, WALL2, 0.0) == pytest.approx(
            math.pi / 4.0, rel=1e-15
        )

    def test_paper_literal_variant_drops_mode_weight(self):
        s = ModeState(0.0, np.array([0.6, 0.8]), np.array([0j, 0j]))
        lit = quantum_force(s, WALL2, 0.0, convention="paper-literal")
        assert lit == pytest.approx((0.36 + 0.64) / 4.0, rel=1e-14)
        cor = quantum_force(s, WALL2, 0.0)
        assert cor == pytest.approx(
            (0.36 * math.pi + 0.64 * 2 * math.pi) / 4.0, rel=1e-14
        )

    @given(st.integers(0, 2**32 - 1))
    def test_balanced_pairs_give_zero_force(self, seed):
        rng = np.random.default_rng(seed)
        mags = rng.uniform(0.1, 1.0, size=6)
        ap = mags * np.exp(1j * rng.uniform(0, 2 * np.pi, size=6))
        am = mags * np.exp(1j * rng.uniform(0, 2 * np.pi, size=6))
        assert abs(force_from_coefficients(ap, am, 2.0)) < 1e-13

    def test_unknown_convention_rejected(self):
        s = ModeState(0.0, np.array([1.0 + 0j]), np.array([0j]))
        with pytest.raises(ValueError):
            quantum_force(s, WALL2, 0.0, convention="bogus")

    def test_identity_against_finite_difference(self):
        # corrected series vs -(1/Ldot) dE/dt on an oscillating-wall run
        w = OscillatingWall(A=5.0, B=0.1, omega=2.0, t_final=20.0)
        packet = SpinorPacket(d=0.1, x0=2.5)
        s0 = project_initial(packet, w, 32)
        cfg = SimConfig(mass=1.0, t_final=20.0, wall=w, packet=packet,
                        n_max=32, dtau=2.5e-4, record_every=1)
        traj = evolve(s0, cfg)
        rate = np.asarray(w.length_rate(traj.t))
        mask = np.abs(rate) > 0.05
        mask[0] = mask[-1] = False
        err = np.max(np.abs(traj.force - traj.force_fd)[mask])
        assert err / np.max(np.abs(traj.force)) < 1e-4

    def test_fd_column_nan_for_static_wall(self):
        w = LinearWall(A=5.0, t_final=5.0)
        tau = np.linspace(0.0, 1.0, 11)
        fd = force_from_energy_series(tau, np.ones(11), np.full(11, 5.0),
                                      np.zeros(11))
        assert np.all(np.isnan(fd))


class TestMasslessConservation:
    def test_energy_times_length_constant_per_mode(self):
        # m = 0: each E_n(t) L(t) depends only on the initial data
        for w in (
            OscillatingWall(A=5.0, B=0.4, omega=2.0, t_final=15.0),
            LinearWall(A=5.0, B=0.2, t_final=15.0),
        ):
            packet = SpinorPacket(d=0.15, x0=2.5)
            s0 = project_initial(packet, w, 24)
            cfg = SimConfig(mass=0.0, t_final=15.0, wall=w, packet=packet,
                            n_max=24, record_every=100, outputs=("norm",))
            traj = evolve(s0, cfg, store_states=True)
            n_pi = np.pi * np.arange(1, 25)
            ref = n_pi * (np.abs(s0.a_plus) ** 2 - np.abs(s0.a_minus) ** 2)
            for s in traj.states:
                el = n_pi * (np.abs(s.a_plus) ** 2 - np.abs(s.a_minus) ** 2)
                assert np.max(np.abs(el - ref)) < 1e-10


class TestZitterbewegung:
    def test_two_mode_peak_to_peak_amplitude(self):
        a1 = math.sqrt(0.6)
        a2 = math.sqrt(0.4) * np.exp(0.3j)
        s0 = ModeState(0.0, np.array([a1, a2]), np.array([0j, 0j]))
        phi = float(np.angle(np.conj(a1) * a2))
        extremes = []
        for tau in (phi / np.pi, (phi + np.pi) / np.pi):
            s = massless_solution(s0, tau)
            extremes.append(mean_position(s, WALL2, 0.0)[0])
        peak_to_peak = abs(extremes[1] - extremes[0])
        assert peak_to_peak == pytest.approx(
            8.0 * abs(a1) * abs(a2) / math.pi**2, abs=1e-6
        )


class TestRecord:
    def test_fields(self):
        w = OscillatingWall(A=5.0, B=0.1, omega=2.0, t_final=50.0)
        packet = SpinorPacket(d=0.1, x0=2.5)
        s = project_initial(packet, w, 16)
        r = record(s, 1.0, w, 0.0)
        assert r.norm == pytest.approx(1.0, abs=1e-12)
        assert r.L == 5.0
        assert r.mean_x == pytest.approx(r.L * r.mean_y, rel=1e-14)
        assert math.isnan(r.force_fd)


class TestBerryPhase:
    def test_constant_cycle(self):
        assert berry_phase(1, [1.5] * 5) == pytest.approx(0.0, abs=1e-15)

    def test_sweep_cycle_vanishes(self):
        up = np.linspace(1.0, 2.0, 101)
        cycle = np.concatenate([up, up[::-1][1:]])
        for n in range(1, 5):
            for band in ("upper", "lower"):
                assert abs(berry_phase(n, cycle, band=band)) <= 1e-8

    def test_refinement_stability(self):
        def loop(points):
            up = np.linspace(0.5, 3.0, points)
            return np.concatenate([up, up[::-1][1:]])

        a = berry_phase(2, loop(100))
        b = berry_phase(2, loop(200))
        assert abs(a - b) < 1e-10

    def test_open_cycle_rejected(self):
        with pytest.raises(ValueError, match="closed"):
            berry_phase(1, np.linspace(1.0, 2.0, 50))

    def test_invalid_mode_rejected(self):
        with pytest.raises(ValueError):
            berry_phase(0, [1.0, 2.0, 1.0])
