"""Run configuration: a JSON document validated into typed sections.

Every section is optional; unknown keys anywhere are rejected before any
computation starts.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any

from .circuits import build_ansatz
from .engine import NoiseModel, confusion_matrix, preset
from .hamiltonian import PhononSystem
from .mitigation import MitigationPlan, ZneSpec
from .thermo import SOURCES, ThermalConfig
from .vqe import OptimizerSpec


class ConfigError(ValueError):
    pass


@dataclass
class SystemSection:
    frequencies: list[float] = field(default_factory=lambda: [1.0, 0.5, 0.5])
    # keys are comma-separated mode tuples, e.g. "0,1,2"
    phi3: dict[str, float] = field(default_factory=lambda: {"0,1,2": 1.0})
    phi4: dict[str, float] = field(default_factory=dict)
    G: float = 1.0
    levels_per_phonon: int = 2
    penalty_weight: float | None = None

    def build(self) -> PhononSystem:
        def parse(table: dict[str, float]) -> dict[tuple[int, ...], float]:
            out = {}
            for key, value in table.items():
                try:
                    modes = tuple(int(k) for k in key.split(","))
                except ValueError as exc:
                    raise ConfigError(f"bad coupling key {key!r}; use e.g. \"0,1,2\"") from exc
                out[modes] = float(value)
            return out

        return PhononSystem.from_force_constants(self.frequencies, parse(self.phi3), parse(self.phi4), self.G)


@dataclass
class AnsatzSection:
    name: str = "custom"
    reps: int = 2


@dataclass
class OptimizerSection:
    kind: str = "lbfgs-finite-difference"
    max_iterations: int = 2000
    ftol: float = 1e-12
    xtol: float = 1e-10
    fd_step: float = 1e-6
    compare_all: bool = False

    def build(self, seed: int) -> OptimizerSpec:
        return OptimizerSpec(self.kind, self.max_iterations, self.ftol, self.xtol, seed, self.fd_step)


@dataclass
class NoiseSection:
    preset: str = "ideal"
    depolarizing_p: float | None = None
    p0_given_1: float | None = None
    p1_given_0: float | None = None
    idle_t1: float | None = None
    idle_t2: float | None = None
    single_qubit_p: float | None = None

    def build(self) -> NoiseModel:
        overrides: dict[str, Any] = {}
        for name in ("depolarizing_p", "idle_t1", "idle_t2", "single_qubit_p"):
            value = getattr(self, name)
            if value is not None:
                overrides[name] = value
        if self.p0_given_1 is not None or self.p1_given_0 is not None:
            overrides["readout"] = (confusion_matrix(self.p0_given_1 or 0.0, self.p1_given_0 or 0.0),)
        return preset(self.preset, **overrides)


@dataclass
class MitigationSection:
    readout: bool = True
    zne: bool = True
    twirling: bool = True
    dynamical_decoupling: bool = True
    scale_factors: list[int] = field(default_factory=lambda: [1, 3, 5])
    extrapolator: str = "richardson"
    twirl_samples: int = 8
    dd_suppression: float = 1.0
    trials: int = 50
    shots: int = 32768

    def build(self) -> MitigationPlan:
        return MitigationPlan(
            self.readout, self.zne, self.twirling, self.dynamical_decoupling,
            ZneSpec(tuple(self.scale_factors), self.extrapolator), self.twirl_samples, self.dd_suppression,
        )

    def plan_options(self) -> dict[str, Any]:
        return {
            "zne_spec": ZneSpec(tuple(self.scale_factors), self.extrapolator),
            "twirl_samples": self.twirl_samples,
            "dd_suppression": self.dd_suppression,
        }


@dataclass
class NoiseSweepSection:
    fidelities: list[float] = field(default_factory=lambda: [1.0, 0.999, 0.99, 0.98])
    seeds: int = 20
    refine_iterations: int = 40
    ansatze: list[str] = field(default_factory=lambda: ["su2", "custom"])


@dataclass
class ThermalSection:
    temperatures: list[float] = field(default_factory=lambda: [100.0, 150.0, 200.0, 250.0, 300.0])
    group_velocity: float = 8500.0
    volume: float = 1.0
    frequency_scale: float | None = None
    anchor_T: float = 100.0
    anchor_kappa: float = 7200.133
    anchor_heat: float = 4.1396e-23
    sources: list[str] = field(default_factory=lambda: list(SOURCES))
    trials: int = 10
    shots: int = 32768
    noise_preset: str = "ibm_brisbane"

    def build(self) -> ThermalConfig:
        for s in self.sources:
            if s not in SOURCES:
                raise ConfigError(f"unknown thermal source {s!r}; expected one of {SOURCES}")
        return ThermalConfig(
            tuple(self.temperatures), self.group_velocity, self.volume, self.frequency_scale,
            self.anchor_T, self.anchor_kappa, self.anchor_heat,
        )


@dataclass
class RunConfig:
    system: SystemSection = field(default_factory=SystemSection)
    ansatz: AnsatzSection = field(default_factory=AnsatzSection)
    optimizer: OptimizerSection = field(default_factory=OptimizerSection)
    noise: NoiseSection = field(default_factory=NoiseSection)
    mitigation: MitigationSection = field(default_factory=MitigationSection)
    noise_sweep: NoiseSweepSection = field(default_factory=NoiseSweepSection)
    thermal: ThermalSection = field(default_factory=ThermalSection)
    shots: int | None = None
    seed: int = 0
    output_dir: str = "out"

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def digest(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()

    def validate(self) -> "RunConfig":
        """Build every section once so bad values fail before any work."""
        try:
            self.system.build()
            if self.system.levels_per_phonon < 2:
                raise ConfigError("levels_per_phonon must be >= 2")
            self.optimizer.build(self.seed)
            for name in [self.ansatz.name, *self.noise_sweep.ansatze]:
                build_ansatz(name, 2, max(self.ansatz.reps, 1))
            self.noise.build()
            self.mitigation.build()
            self.thermal.build()
            for f in self.noise_sweep.fidelities:
                if not 0.9 < f <= 1.0:
                    raise ConfigError(f"noise-sweep fidelity {f} outside (0.9, 1.0]")
            if self.noise_sweep.seeds < 1 or self.mitigation.trials < 2 or self.thermal.trials < 1:
                raise ConfigError("seed and trial counts must be positive (mitigation needs >= 2)")
            if self.shots is not None and self.shots < 1:
                raise ConfigError("shots must be >= 1")
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return self


_SECTIONS = {
    "system": SystemSection,
    "ansatz": AnsatzSection,
    "optimizer": OptimizerSection,
    "noise": NoiseSection,
    "mitigation": MitigationSection,
    "noise_sweep": NoiseSweepSection,
    "thermal": ThermalSection,
}


def _section(cls, data: Any, path: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must be an object")
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown key(s) in {path}: {', '.join(unknown)}")
    defaults = cls()
    for key, value in data.items():
        _check_type(getattr(defaults, key), value, f"{path}.{key}")
    return cls(**data)


def _check_type(default: Any, value: Any, path: str) -> None:
    if value is None or default is None:
        return
    if isinstance(default, bool):
        ok = isinstance(value, bool)
    elif isinstance(default, int):
        ok = isinstance(value, int) and not isinstance(value, bool)
    elif isinstance(default, float):
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
    else:
        ok = isinstance(value, type(default))
    if not ok:
        raise ConfigError(f"{path} has type {type(value).__name__}, expected {type(default).__name__}")


def from_dict(data: dict[str, Any]) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("configuration root must be an object")
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown top-level key(s): {', '.join(unknown)}")
    kwargs: dict[str, Any] = {}
    top = RunConfig()
    for key, value in data.items():
        if key in _SECTIONS:
            kwargs[key] = _section(_SECTIONS[key], value, key)
        else:
            _check_type(getattr(top, key), value, key)
            kwargs[key] = value
    try:
        config = RunConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return config.validate()


def load(path: str | Path) -> RunConfig:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return from_dict(data)
