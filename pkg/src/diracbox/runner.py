"""Run orchestration: single runs, parameter sweeps, and the validation
suite.  Output tables are byte-stable: fixed header, 12 significant digits,
deterministic reductions everywhere on the production path."""

from __future__ import annotations

import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .cn_oracle import compare_energy_with_oracle
from .config import SimConfig, config_as_dict, format_config, replace_parameter
from .errors import ConfigError
from .evolve import (
    PAIR_NORM_STEP_LIMIT,
    TOTAL_NORM_LIMIT,
    Trajectory,
    evolve,
    massless_solution,
    reconstruct_wavefunction,
    time_map_deviation,
)
from .observables import MEAN_IMAG_LIMIT
from .packet import ModeState, project_initial

TABLE_HEADER = "t,tau,L,norm,energy,mean_y,mean_x,force,force_fd"
SNAPSHOT_HEADER = "x,re1,im1,re2,im2"
SNAPSHOT_POINTS = 513


def _fmt(v: float) -> str:
    return f"{v:.11e}"  # 12 significant digits


@dataclass
class RunResult:
    out_dir: Path
    table_path: Path
    manifest_path: Path
    snapshot_paths: list
    trajectory: Trajectory
    state0: ModeState


def write_observable_table(path: Path, traj: Trajectory,
                           position_convention: str = "corrected") -> None:
    mean_x_col = traj.mean_x if position_convention == "corrected" else traj.mean_y
    lines = [TABLE_HEADER]
    for i in range(len(traj.tau)):
        lines.append(
            ",".join(
                _fmt(v)
                for v in (
                    traj.t[i], traj.tau[i], traj.length[i], traj.norm[i],
                    traj.energy[i], traj.mean_y[i], mean_x_col[i],
                    traj.force[i], traj.force_fd[i],
                )
            )
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_snapshot(path: Path, state: ModeState, wall, t: float,
                   points: int = SNAPSHOT_POINTS) -> None:
    L = float(wall.length(t))
    x = np.linspace(0.0, L, points)
    psi = reconstruct_wavefunction(state, wall, t, x)
    lines = [SNAPSHOT_HEADER]
    for i in range(points):
        lines.append(
            ",".join(
                _fmt(v)
                for v in (
                    x[i], psi[i, 0].real, psi[i, 0].imag,
                    psi[i, 1].real, psi[i, 1].imag,
                )
            )
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _manifest(cfg: SimConfig, traj: Trajectory, state0: ModeState) -> dict:
    return {
        "config": config_as_dict(cfg),
        "derived": {
            "dtau_resolved": traj.dtau,
            "n_steps": traj.n_steps,
            "tau_final": float(traj.tau[-1]),
            "records": len(traj.tau),
            "projection_residual": state0.residual,
            "packet_tail_mass": cfg.packet.tail_mass(float(cfg.wall.length(0.0))),
            "max_pair_norm_dev": traj.max_pair_norm_dev,
            "max_total_norm_dev": traj.max_total_norm_dev,
        },
        "tolerances": {
            "pair_norm_per_step": PAIR_NORM_STEP_LIMIT,
            "total_norm": TOTAL_NORM_LIMIT,
            "mean_imag_residue": MEAN_IMAG_LIMIT,
        },
        "versions": {
            "diracbox": __version__,
            "numpy": np.__version__,
            "python": ".".join(str(v) for v in sys.version_info[:3]),
        },
    }


def run(cfg: SimConfig, out_dir) -> RunResult:
    """Project, evolve, and write the observable table, manifest, resolved
    config, and optional wavefunction snapshots."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    state0 = project_initial(
        cfg.packet, cfg.wall, cfg.n_max, renormalize=cfg.renormalize_initial
    )
    traj = evolve(state0, cfg)

    table_path = out_dir / "observables.csv"
    write_observable_table(table_path, traj, cfg.position_convention)
    (out_dir / "config.resolved.cfg").write_text(format_config(cfg),
                                                 encoding="utf-8")
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(
        json.dumps(_manifest(cfg, traj, state0), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    snapshot_paths = []
    if "wavefunction-snapshots" in cfg.outputs:
        p0 = out_dir / "snapshot_initial.csv"
        write_snapshot(p0, state0, cfg.wall, 0.0)
        p1 = out_dir / "snapshot_final.csv"
        write_snapshot(p1, traj.final_state, cfg.wall, float(traj.t[-1]))
        snapshot_paths = [p0, p1]
    return RunResult(out_dir, table_path, manifest_path, snapshot_paths,
                     traj, state0)


SWEEPABLE = ("B", "omega", "m", "n_max", "dtau")


def _sweep_entry(args):
    cfg, out_dir = args
    result = run(cfg, out_dir)
    return {
        "dir": str(result.out_dir),
        "t": result.trajectory.t,
        "energy": result.trajectory.energy,
    }


def sweep(base: SimConfig, parameter: str, values, out_root, jobs: int = 1) -> dict:
    """One run per value plus a combined index manifest; numeric sweeps also
    get a self-convergence report (max |Delta E| between consecutive runs)."""
    values = list(values)
    if not values:
        raise ConfigError("sweep needs a non-empty list of values")
    out_root = Path(out_root)
    out_root.mkdir(parents=True, exist_ok=True)
    tasks = []
    for v in values:
        cfg_v = replace_parameter(base, parameter, v)
        tasks.append((cfg_v, out_root / f"{parameter}={v!r}"))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            entries = list(pool.map(_sweep_entry, tasks))
    else:
        entries = [_sweep_entry(t) for t in tasks]

    convergence = []
    for i in range(1, len(entries)):
        a, b = entries[i - 1], entries[i]
        # compare on the first run's time grid (clipped to the common range)
        t_ref = a["t"]
        mask = (t_ref >= max(a["t"][0], b["t"][0])) & (
            t_ref <= min(a["t"][-1], b["t"][-1])
        )
        eb = np.interp(t_ref[mask], b["t"], b["energy"])
        convergence.append(
            {
                "from": values[i - 1],
                "to": values[i],
                "max_abs_energy_diff": float(np.max(np.abs(a["energy"][mask] - eb))),
            }
        )
    index = {
        "parameter": parameter,
        "values": values,
        "runs": [
            {"value": v, "dir": e["dir"]} for v, e in zip(values, entries)
        ],
        "convergence": convergence,
    }
    (out_root / "sweep_index.json").write_text(
        json.dumps(index, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return index


def validate(cfg: SimConfig, *, oracle_grid: int = 1024) -> tuple[bool, list]:
    """Run the invariant/oracle suite on a config without producing tables.

    Returns (all_passed, report_lines); one line per check."""
    lines = []
    ok = True

    def check(name: str, passed: bool, detail: str):
        nonlocal ok
        ok = ok and passed
        lines.append(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")

    check(
        "window",
        True,
        f"wall positive on [0, {cfg.t_final!r}], min L = {cfg.wall.min_length():.6g}",
    )
    state0 = project_initial(
        cfg.packet, cfg.wall, cfg.n_max, renormalize=cfg.renormalize_initial
    )
    check(
        "projection",
        state0.residual <= 1e-3,
        f"truncation residual {state0.residual:.3e} (limit 1e-03)",
    )
    traj = evolve(state0, cfg)
    check(
        "pair-norms",
        traj.max_pair_norm_dev <= 1e-12,
        f"max pair-norm deviation {traj.max_pair_norm_dev:.3e} (limit 1e-12)",
    )
    check(
        "total-norm",
        traj.max_total_norm_dev <= TOTAL_NORM_LIMIT,
        f"max |norm - 1| = {traj.max_total_norm_dev:.3e} "
        f"(limit {TOTAL_NORM_LIMIT:.0e})",
    )
    bound = np.pi * cfg.n_max / cfg.wall.min_length() + abs(cfg.mass)
    emax = float(np.max(traj.energy))
    check(
        "energy-bound",
        emax <= bound,
        f"sup <E> = {emax:.6g} <= pi n_max / min L + m = {bound:.6g}",
    )
    tmap = time_map_deviation(traj, cfg.wall)
    check("time-map", tmap <= 1e-9, f"max |tau(t_i) - tau_i| = {tmap:.3e}")
    if cfg.mass == 0.0:
        ref = massless_solution(state0, float(traj.tau[-1]))
        dev = max(
            float(np.max(np.abs(ref.a_plus - traj.final_state.a_plus))),
            float(np.max(np.abs(ref.a_minus - traj.final_state.a_minus))),
        )
        check("massless-analytic", dev <= 1e-8,
              f"max |a_n - analytic| = {dev:.3e}")
    if cfg.oracle:
        cmp = compare_energy_with_oracle(cfg, grid_points=oracle_grid)
        rel = cmp["relative_energy_deviation"]
        check("pde-oracle", rel <= 1e-3,
              f"relative <E> deviation vs Crank-Nicolson {rel:.3e}")
    return ok, lines
