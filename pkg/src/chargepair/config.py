"""Strict TOML experiment configuration with unit-suffixed keys."""
from __future__ import annotations

import dataclasses
import sys
import types
import typing
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on 3.10 only
    import tomli as tomllib

from .errors import ConfigError

SCHEMA_VERSION = "chargepair-config/1"
EXPERIMENTS = ("prepare", "tomo", "decay", "chsh", "sweep", "validate")
BELL_LABELS = ("psi+", "psi-", "phi+", "phi-")


@dataclass(frozen=True)
class CircuitConfig:
    e12_ueV: float = 13.75
    ej_ueV: float = 55.0


@dataclass(frozen=True)
class BathConfig:
    eta: float = 1.8e-3
    omega_c_rad_per_s: float = 1e13
    temperature_K: float = 0.01
    gamma_phi_per_s: float = 1e7
    beta: float = 0.1
    gamma: float = 0.1
    calibration: str = "crosstalk_scaled"
    lamb_shift: bool = False


@dataclass(frozen=True)
class PhysicalConfig:
    eps_j1_ueV: float = 27.5
    eps_j2_ueV: float = 27.5
    c_sigma1_fF: float = 2.0
    c_sigma2_fF: float = 2.0
    c_m_fF: float = 0.1
    c_g1_fF: float = 1.0
    c_g2_fF: float = 1.0
    v1_uV: float = 0.0
    v2_uV: float = 0.0
    phi1_flux: float = 0.0
    phi2_flux: float = 0.0
    temperature_K: float = 0.01
    delta_gap_ueV: float = 2000.0


@dataclass(frozen=True)
class PrepareConfig:
    targets: tuple[str, ...] = BELL_LABELS


@dataclass(frozen=True)
class ScheduleEntry:
    preop: str
    measurement: str


@dataclass(frozen=True)
class TomoConfig:
    target: str = "psi+"
    augment: bool = True
    schedule: tuple[ScheduleEntry, ...] = ()  # empty: built-in table


@dataclass(frozen=True)
class DecayConfig:
    states: tuple[str, ...] = ("psi-", "phi-")
    tunneling: bool = False
    em_over_ej: tuple[float, ...] = ()  # empty: use circuit.e12_ueV as given
    t_max_us: float = 2.0
    n_points: int = 201
    probe_t_ns: float = 1.0


@dataclass(frozen=True)
class ChshConfig:
    em_over_ej: tuple[float, ...] = (1.0, 0.1, 0.01)
    phi1_pi: tuple[float, ...] = (-0.125, 0.375)
    phi2_pi: tuple[float, ...] = (-0.125, 0.375)
    state: str = "psi+"


@dataclass(frozen=True)
class SweepConfig:
    base: str = "decay"
    parameter: str = "circuit.e12_ueV"
    values: tuple = ()
    workers: int = 4


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str = ""  # empty: taken from the CLI subcommand
    seed: int = 0
    shots: int | None = None
    format: str = "csv"
    circuit: CircuitConfig = field(default_factory=CircuitConfig)
    bath: BathConfig = field(default_factory=BathConfig)
    physical: PhysicalConfig = field(default_factory=PhysicalConfig)
    prepare: PrepareConfig = field(default_factory=PrepareConfig)
    tomo: TomoConfig = field(default_factory=TomoConfig)
    decay: DecayConfig = field(default_factory=DecayConfig)
    chsh: ChshConfig = field(default_factory=ChshConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)

    def resolved(self) -> dict:
        d = dataclasses.asdict(self)
        d["schema"] = SCHEMA_VERSION
        return d

    def validate(self) -> "ExperimentConfig":
        _check(self.experiment in EXPERIMENTS + ("",), f"experiment must be one of {EXPERIMENTS}")
        _check(self.format in ("csv", "json"), "format must be 'csv' or 'json'")
        _check(self.seed >= 0, "seed must be non-negative")
        _check(self.shots is None or self.shots >= 1, "shots must be >= 1")
        _check(self.bath.calibration in ("crosstalk_scaled", "single_qubit"), "bath.calibration must be 'crosstalk_scaled' or 'single_qubit'")
        for label in self.prepare.targets + self.decay.states + (self.tomo.target, self.chsh.state):
            _check(label in BELL_LABELS, f"unknown Bell label {label!r}")
        _check(self.decay.n_points >= 2 and self.decay.t_max_us > 0, "decay grid needs n_points >= 2, t_max_us > 0")
        _check(len(self.chsh.phi1_pi) == 2 and len(self.chsh.phi2_pi) == 2, "each side needs exactly two angles")
        _check(all(r > 0 for r in self.chsh.em_over_ej + self.decay.em_over_ej), "em_over_ej must be positive")
        for e in self.tomo.schedule:
            _check(e.measurement in ("P1", "P2", "P12"), f"unknown measurement {e.measurement!r}")
        _check(self.sweep.base in EXPERIMENTS[:4], "sweep.base must be prepare, tomo, decay or chsh")
        _check(self.sweep.workers >= 1, "sweep.workers must be >= 1")
        if self.experiment == "sweep":
            section, _, key = self.sweep.parameter.partition(".")
            sub = getattr(self, section, None)
            _check(dataclasses.is_dataclass(sub) and key in {f.name for f in dataclasses.fields(sub)},
                   f"sweep.parameter {self.sweep.parameter!r} does not name a config key")
        return self

    def with_override(self, dotted: str, value) -> "ExperimentConfig":
        """Copy with one ``section.key`` (or top-level key) replaced and re-validated."""
        raw = self.resolved()
        raw.pop("schema")
        section, _, key = dotted.partition(".")
        if key:
            raw[section][key] = value
        else:
            raw[section] = value
        return from_dict(raw)


def _check(ok: bool, msg: str) -> None:
    if not ok:
        raise ConfigError(msg)


def _coerce(tp, value, where: str):
    origin = typing.get_origin(tp)
    args = typing.get_args(tp)
    if origin is typing.Union or origin is types.UnionType:
        if value is None and type(None) in args:
            return None
        inner = [a for a in args if a is not type(None)]
        return _coerce(inner[0], value, where)
    if origin is tuple or tp is tuple:
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{where} must be a list")
        if not args:
            return tuple(value)
        return tuple(_coerce(args[0], v, f"{where}[{i}]") for i, v in enumerate(value))
    if dataclasses.is_dataclass(tp):
        return _build(tp, value, where)
    if tp is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{where} must be a boolean")
        return value
    if tp is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where} must be an integer")
        return value
    if tp is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where} must be a number")
        return float(value)
    if tp is str:
        if not isinstance(value, str):
            raise ConfigError(f"{where} must be a string")
        return value
    return value


def _build(cls, data, where: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{where or 'config'} must be a table")
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - names - ({"schema"} if cls is ExperimentConfig else set()))
    if unknown:
        raise ConfigError(f"unknown key(s) in {where or 'top level'}: {', '.join(unknown)}")
    kwargs = {}
    for name in names:
        if name in data:
            kwargs[name] = _coerce(hints[name], data[name], f"{where}.{name}" if where else name)
    missing = sorted(f.name for f in dataclasses.fields(cls)
                     if f.name not in kwargs and f.default is dataclasses.MISSING
                     and f.default_factory is dataclasses.MISSING)
    if missing:
        raise ConfigError(f"missing key(s) in {where or 'top level'}: {', '.join(missing)}")
    return cls(**kwargs)


def from_dict(data: dict) -> ExperimentConfig:
    schema = data.get("schema", SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema {schema!r}; expected {SCHEMA_VERSION!r}")
    return _build(ExperimentConfig, data, "").validate()


def load(path: str | Path | None) -> ExperimentConfig:
    if path is None:
        return ExperimentConfig().validate()
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    return from_dict(data)
