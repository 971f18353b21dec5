"""Spectral simulator for a relativistic particle in a 1D box whose wall
moves: the time-dependent boundary is mapped onto a fixed interval with a
time-dependent mass coupling, mode pairs are evolved by exact 2x2 unitary
rotations, and the standard observables (kinetic energy, mean position,
boundary force, geometric phase) come with built-in analytic oracles."""

__version__ = "0.1.0"

from .basis import (
    beta_matrix_element,
    eigenfunction,
    mode_indices,
    position_matrix,
    position_matrix_element,
)
from .cn_oracle import compare_energy_with_oracle, pde_oracle
from .config import SimConfig, format_config, load_config, parse_config
from .errors import ConfigError, DiracBoxError, ResolutionError, WindowError
from .evolve import (
    Trajectory,
    evolve,
    evolve_a0,
    massless_solution,
    reconstruct_wavefunction,
    step_pair,
)
from .observables import (
    ObservableRecord,
    berry_phase,
    kinetic_energy,
    mean_position,
    quantum_force,
)
from .packet import ModeState, SpinorPacket, packet_value, project_initial
from .runner import run, sweep, validate
from .schrodinger import (
    SchrodingerModeState,
    schrodinger_evolve,
    schrodinger_observables,
    schrodinger_project,
)
from .wall import LinearWall, OscillatingWall, TabulatedWall, WallMotion

__all__ = [
    "__version__",
    "beta_matrix_element", "eigenfunction", "mode_indices",
    "position_matrix", "position_matrix_element",
    "compare_energy_with_oracle", "pde_oracle",
    "SimConfig", "format_config", "load_config", "parse_config",
    "ConfigError", "DiracBoxError", "ResolutionError", "WindowError",
    "Trajectory", "evolve", "evolve_a0", "massless_solution",
    "reconstruct_wavefunction", "step_pair",
    "ObservableRecord", "berry_phase", "kinetic_energy", "mean_position",
    "quantum_force",
    "ModeState", "SpinorPacket", "packet_value", "project_initial",
    "run", "sweep", "validate",
    "SchrodingerModeState", "schrodinger_evolve", "schrodinger_observables",
    "schrodinger_project",
    "LinearWall", "OscillatingWall", "TabulatedWall", "WallMotion",
]
