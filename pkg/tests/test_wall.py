import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import trapezoid_integral
from diracbox import LinearWall, OscillatingWall, TabulatedWall, WindowError


class TestLength:
    def test_linear_at_zero(self):
        w = LinearWall(A=10.0, B=0.1, t_final=100.0)
        assert w.length(0.0) == 10.0

    def test_oscillating_at_zero_fig2(self):
        w = OscillatingWall(A=5.0, B=0.1, omega=2.0, t_final=50.0)
        assert w.length(0.0) == 5.0

    def test_linear_contracting(self):
        w = LinearWall(A=10.0, B=-0.1, t_final=60.0)
        assert w.length(50.0) == pytest.approx(5.0, abs=1e-14)

    def test_out_of_window_rejected(self):
        w = LinearWall(A=10.0, B=0.1, t_final=10.0)
        with pytest.raises(WindowError):
            w.length(10.5)
        with pytest.raises(WindowError):
            w.length(-1.0)


class TestLengthRate:
    def test_linear_constant(self):
        w = LinearWall(A=10.0, B=0.1, t_final=100.0)
        for t in (0.0, 17.3, 99.0):
            assert w.length_rate(t) == 0.1

    def test_oscillating(self):
        w = OscillatingWall(A=5.0, B=0.1, omega=2.0, t_final=50.0)
        assert w.length_rate(0.0) == pytest.approx(0.2, abs=1e-15)
        assert w.length_rate(math.pi / 2) == pytest.approx(-0.2, abs=1e-14)


class TestTau:
    def test_static_identity(self):
        w = LinearWall(A=1.0, B=0.0, t_final=10.0)
        assert w.tau_of_t(7.0) == pytest.approx(7.0, abs=1e-14)

    def test_linear_closed_form(self):
        w = LinearWall(A=10.0, B=0.1, t_final=100.0)
        assert w.tau_of_t(10.0) == pytest.approx(10.0 * math.log(1.1), rel=1e-13)

    def test_oscillating_vs_trapezoid_oracle(self):
        w = OscillatingWall(A=5.0, B=0.1, omega=2.0, t_final=50.0)
        ref = trapezoid_integral(lambda s: 1.0 / (5.0 + 0.1 * np.sin(2.0 * s)),
                                 0.0, 1.0)
        assert abs(w.tau_of_t(1.0) - ref) < 1e-10

    def test_linear_quadrature_agrees_with_log_formula(self):
        w = LinearWall(A=10.0, B=0.1, t_final=100.0)
        # route the generic quadrature path past the closed form
        generic = super(LinearWall, w).tau_of_t.__get__(w)(10.0)
        assert abs(generic - 10.0 * math.log(1.1)) < 1e-10


class TestTau2:
    def test_static_identity(self):
        w = LinearWall(A=1.0, B=0.0, t_final=10.0)
        assert w.tau2_of_t(4.0) == pytest.approx(4.0, abs=1e-14)

    def test_linear_closed_form(self):
        w = LinearWall(A=10.0, B=0.1, t_final=100.0)
        expected = (1.0 / 0.1) * (1.0 / 10.0 - 1.0 / 11.0)
        assert w.tau2_of_t(10.0) == pytest.approx(expected, rel=1e-13)
        assert expected == pytest.approx(0.0909091, abs=5e-8)

    def test_oscillating_vs_trapezoid_oracle(self):
        w = OscillatingWall(A=5.0, B=0.1, omega=2.0, t_final=50.0)
        ref = trapezoid_integral(
            lambda s: 1.0 / (5.0 + 0.1 * np.sin(2.0 * s)) ** 2, 0.0, 1.0
        )
        assert abs(w.tau2_of_t(1.0) - ref) < 1e-10


class TestTOfTau:
    def test_static(self):
        w = LinearWall(A=1.0, B=0.0, t_final=10.0)
        assert w.t_of_tau(3.0) == pytest.approx(3.0, abs=1e-12)

    def test_linear_inverse(self):
        w = LinearWall(A=10.0, B=0.1, t_final=100.0)
        assert w.t_of_tau(10.0 * math.log(1.1)) == pytest.approx(10.0, rel=1e-12)

    @given(st.floats(min_value=0.0, max_value=50.0))
    def test_round_trip_oscillating(self, t):
        w = OscillatingWall(A=5.0, B=0.1, omega=2.0, t_final=50.0)
        assert w.t_of_tau(w.tau_of_t(t)) == pytest.approx(t, abs=1e-9)

    def test_out_of_range(self):
        w = LinearWall(A=10.0, B=0.1, t_final=10.0)
        with pytest.raises(WindowError):
            w.t_of_tau(w.tau_of_t(10.0) + 1.0)


class TestProperties:
    @given(
        st.floats(min_value=0.01, max_value=40.0),
        st.floats(min_value=0.01, max_value=40.0),
    )
    def test_tau_monotone_oscillating(self, t1, t2):
        w = OscillatingWall(A=5.0, B=0.5, omega=1.3, t_final=40.0)
        lo, hi = sorted((t1, t2))
        if hi - lo > 1e-9:
            assert w.tau_of_t(hi) > w.tau_of_t(lo)
            assert w.tau2_of_t(hi) > w.tau2_of_t(lo)

    @given(st.floats(min_value=0.5, max_value=49.0))
    def test_tau_derivative_is_inverse_length(self, t):
        w = OscillatingWall(A=5.0, B=0.1, omega=2.0, t_final=50.0)
        h = 1e-4
        deriv = (w.tau_of_t(t + h) - w.tau_of_t(t - h)) / (2.0 * h)
        assert deriv == pytest.approx(1.0 / w.length(t), abs=1e-8)

    def test_time_grid_matches_tau_map(self):
        w = OscillatingWall(A=5.0, B=0.1, omega=2.0, t_final=50.0)
        tau_grid = np.linspace(0.0, float(w.tau_of_t(50.0)), 2001)
        t_grid, t_mid = w.t_on_tau_grid(tau_grid)
        for i in (1, 500, 1000, 2000):
            assert abs(float(w.tau_of_t(t_grid[i])) - tau_grid[i]) < 1e-9

    def test_time_grid_linear_closed_form(self):
        w = LinearWall(A=10.0, B=0.1, t_final=100.0)
        tau_grid = np.linspace(0.0, float(w.tau_of_t(100.0)), 101)
        t_grid, _ = w.t_on_tau_grid(tau_grid)
        ref = 10.0 * np.expm1(0.1 * tau_grid) / 0.1
        assert np.max(np.abs(t_grid - ref)) < 1e-12


class TestConstructionGuards:
    def test_linear_reaching_zero_rejected(self):
        with pytest.raises(WindowError, match="reaches zero"):
            LinearWall(A=10.0, B=-0.5, t_final=25.0)

    def test_linear_negative_A(self):
        with pytest.raises(WindowError):
            LinearWall(A=-1.0, B=0.0, t_final=1.0)

    def test_oscillating_amplitude_bound(self):
        with pytest.raises(WindowError, match=r"\|B\| < A"):
            OscillatingWall(A=1.0, B=1.5, omega=1.0, t_final=1.0)

    def test_superluminal_warns_not_rejects(self):
        with pytest.warns(UserWarning, match="light"):
            w = LinearWall(A=10.0, B=1.5, t_final=10.0)
        assert w.length(1.0) == 11.5
        with pytest.warns(UserWarning, match="light"):
            OscillatingWall(A=5.0, B=0.6, omega=2.0, t_final=10.0)


class TestTabulated:
    def _from_oscillation(self, samples=401):
        ts = np.linspace(0.0, 20.0, samples)
        ls = 5.0 + 0.1 * np.sin(2.0 * ts)
        return TabulatedWall(times=tuple(ts), lengths=tuple(ls), t_final=20.0)

    def test_interpolates_law(self):
        w = self._from_oscillation()
        ref = OscillatingWall(A=5.0, B=0.1, omega=2.0, t_final=20.0)
        for t in (0.3, 7.77, 19.2):
            assert w.length(t) == pytest.approx(ref.length(t), abs=1e-6)
            assert w.length_rate(t) == pytest.approx(ref.length_rate(t), abs=1e-4)

    def test_tau_close_to_analytic_law(self):
        w = self._from_oscillation()
        ref = OscillatingWall(A=5.0, B=0.1, omega=2.0, t_final=20.0)
        assert w.tau_of_t(13.0) == pytest.approx(ref.tau_of_t(13.0), abs=1e-7)

    def test_non_increasing_times_rejected(self):
        with pytest.raises(WindowError, match="strictly increasing"):
            TabulatedWall(times=(0.0, 1.0, 1.0, 2.0),
                          lengths=(1.0, 1.0, 1.0, 1.0), t_final=2.0)

    def test_window_not_covered_rejected(self):
        with pytest.raises(WindowError, match="cover"):
            TabulatedWall(times=(0.0, 1.0, 2.0, 3.0),
                          lengths=(1.0, 1.0, 1.0, 1.0), t_final=5.0)

    def test_nonpositive_rejected(self):
        with pytest.raises(WindowError):
            TabulatedWall(times=(0.0, 1.0, 2.0, 3.0),
                          lengths=(1.0, -0.5, 1.0, 1.0), t_final=3.0)
