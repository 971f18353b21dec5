import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from diracbox import LinearWall, OscillatingWall, SpinorPacket
from diracbox.config import SimConfig
from diracbox.evolve import apply_pair_rotations
from diracbox.quadrature import gauss_legendre_panels

settings.register_profile(
    "ci",
    deadline=None,
    max_examples=50,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")


# --- independent oracles used across test modules -----------------------------

def trapezoid_integral(fn, a, b, n=2**21):
    """Fine composite trapezoid; independent of the scipy quadrature path."""
    x = np.linspace(a, b, n + 1)
    y = fn(x)
    return float(np.trapezoid(y, x))


def energy_quadrature(state, m, wall, t):
    """Energy by direct quadrature of the Hamiltonian form of the
    reconstructed wavefunction (pointwise products; no orthonormality
    algebra, no beta-element closed forms)."""
    L = float(wall.length(t))
    x, wq = gauss_legendre_panels(0.0, L, max(2 * state.n_max, 64), 16)
    y = x / L
    n = np.arange(1, state.n_max + 1)
    ph = np.pi * np.outer(y, n)
    sin_m, cos_m = np.sin(ph), np.cos(ph)
    dsum = state.a_plus - state.a_minus
    ssum = state.a_plus + state.a_minus
    c1 = sin_m @ dsum
    c2 = -1j * (state.a0 + cos_m @ ssum)
    d1 = (cos_m * (np.pi * n / L)) @ dsum
    d2 = -1j * (-sin_m * (np.pi * n / L)) @ ssum
    h1 = -1j * d2 + m * c1
    h2 = -1j * d1 - m * c2
    integrand = (np.conj(c1) * h1 + np.conj(c2) * h2) / L
    return float(np.sum(wq * integrand).real)


def extract_pair_frequency(n, mass, length, tau_total, dtau, n_records=40):
    """Precession frequency of pair n over a frozen wall, from the numeric
    evolution: accumulate per-record rotation angles of U(tau_{k+1}) U(tau_k)^+
    (each interval advances < pi, so there is no branch ambiguity)."""
    steps = max(1, int(round(tau_total / (dtau * n_records))))
    npi = np.array([n * np.pi])
    mL = mass * length
    e1 = (np.array([1 + 0j]), np.array([0j]))
    e2 = (np.array([0j]), np.array([1 + 0j]))
    us = [np.eye(2, dtype=complex)]
    for _ in range(n_records):
        e1 = apply_pair_rotations(e1[0], e1[1], npi, [mL] * steps, dtau)
        e2 = apply_pair_rotations(e2[0], e2[1], npi, [mL] * steps, dtau)
        us.append(np.array([[e1[0][0], e2[0][0]], [e1[1][0], e2[1][0]]]))
    total = 0.0
    for k in range(n_records):
        g = us[k + 1] @ us[k].conj().T
        total += abs(float(np.angle(np.linalg.eigvals(g)[0])))
    return total / (n_records * steps * dtau)


# --- canonical figure-parameter configs ---------------------------------------

@pytest.fixture(scope="session")
def fig2_wall():
    return OscillatingWall(A=5.0, B=0.1, omega=2.0, t_final=50.0)


@pytest.fixture(scope="session")
def fig2_packet():
    return SpinorPacket(d=0.1, x0=2.5, v0=0.0, s1=1.0, s2=0.0)


@pytest.fixture(scope="session")
def fig2_config(fig2_wall, fig2_packet):
    return SimConfig(
        mass=1.0, t_final=50.0, wall=fig2_wall, packet=fig2_packet,
        n_max=64, record_every=25,
    )


@pytest.fixture(scope="session")
def fig1_packet():
    return SpinorPacket(d=0.1, x0=5.0, v0=0.0, s1=1.0, s2=0.0)


def make_fig1_config(B, t_final, **kw):
    wall = LinearWall(A=10.0, B=B, t_final=t_final)
    packet = SpinorPacket(d=0.1, x0=5.0, v0=0.0, s1=1.0, s2=0.0)
    args = dict(mass=1.0, t_final=t_final, wall=wall, packet=packet, n_max=64)
    args.update(kw)
    return SimConfig(**args)
