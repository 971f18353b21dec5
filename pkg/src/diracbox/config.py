"""Run configuration: a sectioned key = value text format and its dataclass.

Unknown keys are rejected with the offending line number; every default that
gets applied is visible again in the run manifest.  parse_config and
format_config round-trip exactly (floats are emitted with repr).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import ConfigError, WindowError
from .packet import SpinorPacket
from .wall import LinearWall, OscillatingWall, TabulatedWall, WallMotion

OUTPUT_CHOICES = ("norm", "energy", "position", "force", "wavefunction-snapshots")
CONVENTION_CHOICES = ("corrected", "paper-literal")
DEFAULT_OUTPUTS = ("norm", "energy", "position", "force")

_KNOWN_KEYS = {
    "simulation": (
        "mass", "t_final", "n_max", "dtau", "record_every", "outputs",
        "oracle", "force_convention", "position_convention",
        "renormalize_initial",
    ),
    "wall": ("kind", "a", "b", "omega", "times", "lengths"),
    "packet": ("d", "x0", "v0", "s1", "s2"),
}


@dataclass
class SimConfig:
    mass: float
    t_final: float
    wall: WallMotion
    packet: SpinorPacket
    n_max: int = 64
    dtau: float | None = None  # None = auto step selection
    record_every: int = 1
    outputs: tuple = DEFAULT_OUTPUTS
    oracle: bool = False
    force_convention: str = "corrected"
    position_convention: str = "corrected"
    renormalize_initial: bool = True

    def __post_init__(self):
        if self.mass < 0.0:
            raise ConfigError(f"mass must be >= 0, got {self.mass!r}")
        if not (self.t_final > 0.0):
            raise ConfigError(f"t_final must be positive, got {self.t_final!r}")
        if self.n_max < 1:
            raise ConfigError(f"n_max must be >= 1, got {self.n_max!r}")
        if self.dtau is not None and not (self.dtau > 0.0):
            raise ConfigError(f"dtau must be positive or auto, got {self.dtau!r}")
        if self.record_every < 1:
            raise ConfigError(f"record_every must be >= 1, got {self.record_every!r}")
        bad = [o for o in self.outputs if o not in OUTPUT_CHOICES]
        if bad:
            raise ConfigError(
                f"unknown outputs {bad}; choices are {', '.join(OUTPUT_CHOICES)}"
            )
        self.outputs = tuple(o for o in OUTPUT_CHOICES if o in self.outputs)
        for name in ("force_convention", "position_convention"):
            val = getattr(self, name)
            if val not in CONVENTION_CHOICES:
                raise ConfigError(
                    f"{name} must be one of {CONVENTION_CHOICES}, got {val!r}"
                )


# -- text parsing -------------------------------------------------------------

def _tokenize(text: str) -> dict:
    sections: dict[str, dict[str, tuple[str, int]]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip().lower()
            if current not in _KNOWN_KEYS:
                raise ConfigError(
                    f"line {lineno}: unknown section [{current}]; "
                    f"expected one of {sorted(_KNOWN_KEYS)}"
                )
            sections.setdefault(current, {})
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        if current is None:
            raise ConfigError(f"line {lineno}: key outside any [section]")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lower()
        if key not in _KNOWN_KEYS[current]:
            raise ConfigError(
                f"line {lineno}: unknown key {key!r} in section [{current}]"
            )
        if key in sections[current]:
            raise ConfigError(
                f"line {lineno}: duplicate key {key!r} in section [{current}]"
            )
        sections[current][key] = (value, lineno)
    return sections


class _Section:
    def __init__(self, name: str, entries: dict):
        self.name = name
        self.entries = dict(entries)

    def _pop(self, key: str):
        return self.entries.pop(key, None)

    def _convert(self, key: str, conv, kind: str, default):
        item = self._pop(key)
        if item is None:
            if default is _REQUIRED:
                raise ConfigError(
                    f"missing required key {key!r} in section [{self.name}]"
                )
            return default
        value, lineno = item
        try:
            return conv(value)
        except (ValueError, TypeError):
            raise ConfigError(
                f"line {lineno} ([{self.name}] {key}): expected {kind}, "
                f"got {value!r}"
            ) from None

    def real(self, key, default=None):
        return self._convert(key, float, "a real number", default)

    def integer(self, key, default=None):
        return self._convert(key, lambda v: int(v, 10), "an integer", default)

    def boolean(self, key, default=None):
        def conv(v):
            low = v.strip().lower()
            if low in ("true", "yes", "on", "1"):
                return True
            if low in ("false", "no", "off", "0"):
                return False
            raise ValueError(low)

        return self._convert(key, conv, "a boolean", default)

    def complex_value(self, key, default=None):
        return self._convert(
            key, lambda v: complex(v.replace(" ", "")), "a complex number", default
        )

    def word(self, key, default=None):
        return self._convert(key, lambda v: v.strip().lower(), "a word", default)

    def real_list(self, key, default=None):
        def conv(v):
            parts = [p for p in (s.strip() for s in v.split(",")) if p]
            if not parts:
                raise ValueError(v)
            return tuple(float(p) for p in parts)

        return self._convert(key, conv, "a comma-separated list of reals", default)


_REQUIRED = object()


def parse_config(text: str) -> SimConfig:
    """Build a fully validated SimConfig from the sectioned text document."""
    sections = _tokenize(text)

    sim = _Section("simulation", sections.get("simulation", {}))
    wall_sec = _Section("wall", sections.get("wall", {}))
    pkt = _Section("packet", sections.get("packet", {}))

    mass = sim.real("mass", _REQUIRED)
    t_final = sim.real("t_final", _REQUIRED)
    n_max = sim.integer("n_max", 64)
    dtau_item = sim.entries.pop("dtau", None)
    if dtau_item is None:
        dtau = None
    else:
        value, lineno = dtau_item
        if value.strip().lower() == "auto":
            dtau = None
        else:
            try:
                dtau = float(value)
            except ValueError:
                raise ConfigError(
                    f"line {lineno} ([simulation] dtau): expected a real "
                    f"number or 'auto', got {value!r}"
                ) from None
    record_every = sim.integer("record_every", 1)
    outputs_item = sim.entries.pop("outputs", None)
    if outputs_item is None:
        outputs = DEFAULT_OUTPUTS
    else:
        value, lineno = outputs_item
        outputs = tuple(p for p in (s.strip().lower() for s in value.split(",")) if p)
        bad = [o for o in outputs if o not in OUTPUT_CHOICES]
        if bad:
            raise ConfigError(
                f"line {lineno} ([simulation] outputs): unknown outputs {bad}; "
                f"choices are {', '.join(OUTPUT_CHOICES)}"
            )
    oracle = sim.boolean("oracle", False)
    force_convention = sim.word("force_convention", "corrected")
    position_convention = sim.word("position_convention", "corrected")
    renormalize_initial = sim.boolean("renormalize_initial", True)

    kind = wall_sec.word("kind", "linear")
    try:
        if kind == "linear":
            wall = LinearWall(
                A=wall_sec.real("a", _REQUIRED),
                B=wall_sec.real("b", 0.0),
                t_final=t_final,
            )
        elif kind == "oscillating":
            wall = OscillatingWall(
                A=wall_sec.real("a", _REQUIRED),
                B=wall_sec.real("b", _REQUIRED),
                omega=wall_sec.real("omega", _REQUIRED),
                t_final=t_final,
            )
        elif kind == "tabulated":
            wall = TabulatedWall(
                times=wall_sec.real_list("times", _REQUIRED),
                lengths=wall_sec.real_list("lengths", _REQUIRED),
                t_final=t_final,
            )
        else:
            raise ConfigError(
                f"[wall] kind must be linear, oscillating or tabulated, "
                f"got {kind!r}"
            )
    except WindowError as exc:
        raise ConfigError(f"[wall]: {exc}") from exc
    for key, (_, lineno) in wall_sec.entries.items():
        raise ConfigError(
            f"line {lineno}: key {key!r} does not apply to a {kind} wall"
        )

    L0 = float(wall.length(0.0))
    x0_item = pkt.entries.get("x0")
    if x0_item is not None and x0_item[0].strip().lower() == "auto":
        pkt.entries.pop("x0")
        x0 = 0.5 * L0
    else:
        x0 = pkt.real("x0", 0.5 * L0)
    try:
        packet = SpinorPacket(
            d=pkt.real("d", 0.1),
            x0=x0,
            v0=pkt.real("v0", 0.0),
            s1=pkt.complex_value("s1", 1.0 + 0.0j),
            s2=pkt.complex_value("s2", 0.0 + 0.0j),
        )
    except ValueError as exc:
        raise ConfigError(f"[packet]: {exc}") from exc
    if not (0.0 < packet.x0 < L0):
        raise ConfigError(
            f"[packet]: x0 = {packet.x0!r} must lie inside the box (0, {L0!r})"
        )

    return SimConfig(
        mass=mass,
        t_final=t_final,
        wall=wall,
        packet=packet,
        n_max=n_max,
        dtau=dtau,
        record_every=record_every,
        outputs=outputs,
        oracle=oracle,
        force_convention=force_convention,
        position_convention=position_convention,
        renormalize_initial=renormalize_initial,
    )


def load_config(path) -> SimConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def _wall_lines(wall: WallMotion) -> list[str]:
    if isinstance(wall, LinearWall):
        return ["kind = linear", f"A = {wall.A!r}", f"B = {wall.B!r}"]
    if isinstance(wall, OscillatingWall):
        return [
            "kind = oscillating",
            f"A = {wall.A!r}",
            f"B = {wall.B!r}",
            f"omega = {wall.omega!r}",
        ]
    if isinstance(wall, TabulatedWall):
        return [
            "kind = tabulated",
            "times = " + ", ".join(repr(v) for v in wall.times),
            "lengths = " + ", ".join(repr(v) for v in wall.lengths),
        ]
    raise ConfigError(f"cannot serialize wall type {type(wall).__name__}")


def format_config(cfg: SimConfig) -> str:
    """Canonical text form; parse_config(format_config(cfg)) == cfg."""
    lines = ["[simulation]"]
    lines.append(f"mass = {cfg.mass!r}")
    lines.append(f"t_final = {cfg.t_final!r}")
    lines.append(f"n_max = {cfg.n_max!r}")
    lines.append("dtau = auto" if cfg.dtau is None else f"dtau = {cfg.dtau!r}")
    lines.append(f"record_every = {cfg.record_every!r}")
    lines.append("outputs = " + ", ".join(cfg.outputs))
    lines.append(f"oracle = {'true' if cfg.oracle else 'false'}")
    lines.append(f"force_convention = {cfg.force_convention}")
    lines.append(f"position_convention = {cfg.position_convention}")
    lines.append(
        f"renormalize_initial = {'true' if cfg.renormalize_initial else 'false'}"
    )
    lines.append("")
    lines.append("[wall]")
    lines.extend(_wall_lines(cfg.wall))
    lines.append("")
    lines.append("[packet]")
    lines.append(f"d = {cfg.packet.d!r}")
    lines.append(f"x0 = {cfg.packet.x0!r}")
    lines.append(f"v0 = {cfg.packet.v0!r}")
    lines.append(f"s1 = {cfg.packet.s1!r}")
    lines.append(f"s2 = {cfg.packet.s2!r}")
    return "\n".join(lines) + "\n"


def config_as_dict(cfg: SimConfig) -> dict:
    """JSON-friendly resolved view of the configuration (all defaults
    applied); complex values as strings."""
    wall = cfg.wall
    if isinstance(wall, LinearWall):
        wall_d = {"kind": "linear", "A": wall.A, "B": wall.B}
    elif isinstance(wall, OscillatingWall):
        wall_d = {"kind": "oscillating", "A": wall.A, "B": wall.B,
                  "omega": wall.omega}
    else:
        wall_d = {"kind": "tabulated", "times": list(wall.times),
                  "lengths": list(wall.lengths)}
    return {
        "simulation": {
            "mass": cfg.mass,
            "t_final": cfg.t_final,
            "n_max": cfg.n_max,
            "dtau": "auto" if cfg.dtau is None else cfg.dtau,
            "record_every": cfg.record_every,
            "outputs": list(cfg.outputs),
            "oracle": cfg.oracle,
            "force_convention": cfg.force_convention,
            "position_convention": cfg.position_convention,
            "renormalize_initial": cfg.renormalize_initial,
        },
        "wall": wall_d,
        "packet": {
            "d": cfg.packet.d,
            "x0": cfg.packet.x0,
            "v0": cfg.packet.v0,
            "s1": repr(cfg.packet.s1),
            "s2": repr(cfg.packet.s2),
        },
    }


def replace_parameter(cfg: SimConfig, name: str, value) -> SimConfig:
    """Rebuild a config with one sweepable parameter changed
    (B, omega, m/mass, n_max/N_max, dtau)."""
    key = name.strip()
    lowered = key.lower()
    if lowered == "b":
        wall = cfg.wall
        if isinstance(wall, LinearWall):
            new_wall = LinearWall(A=wall.A, B=float(value), t_final=wall.t_final)
        elif isinstance(wall, OscillatingWall):
            new_wall = OscillatingWall(
                A=wall.A, B=float(value), omega=wall.omega, t_final=wall.t_final
            )
        else:
            raise ConfigError("parameter 'B' does not apply to a tabulated wall")
        return replace(cfg, wall=new_wall)
    if lowered == "omega":
        wall = cfg.wall
        if not isinstance(wall, OscillatingWall):
            raise ConfigError("parameter 'omega' requires an oscillating wall")
        new_wall = OscillatingWall(
            A=wall.A, B=wall.B, omega=float(value), t_final=wall.t_final
        )
        return replace(cfg, wall=new_wall)
    if lowered in ("m", "mass"):
        return replace(cfg, mass=float(value))
    if lowered in ("n_max", "nmax"):
        return replace(cfg, n_max=int(value))
    if lowered == "dtau":
        return replace(cfg, dtau=float(value))
    raise ConfigError(
        f"parameter {name!r} is not sweepable; choose from B, omega, m, "
        "n_max, dtau"
    )
