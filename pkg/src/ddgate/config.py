"""Run configuration: TOML ingestion, validation, manifest emission.

Configs are a single TOML document with blocks [system], [gate], [noise],
[numerics], [output].  Frequencies in configs are ordinary frequencies in Hz
and are converted to angular ones internally; every emitted manifest states
the convention.  Unknown keys are rejected.
"""

from __future__ import annotations

import json
import math
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .dynamics import NoiseConfig
from .presets import NU_HZ, get_preset
from .runner import Numerics

__all__ = ["RunConfig", "load_config", "write_manifest"]


@dataclass(frozen=True)
class SystemBlock:
    nu_hz: float = NU_HZ
    eta: float = 0.005
    two_mode: bool = True
    delta_omega_qubits_hz: float = 0.0
    gamma_e_hz_per_t: float | None = None
    g_b_t_per_m: float | None = None
    ion_mass_amu: float | None = None


@dataclass(frozen=True)
class GateBlock:
    preset: str | None = "G1"
    k: int | None = None
    n_blocks: int | None = None
    d: float | None = None
    ramp_ns: float | None = None
    cardioid: bool = False


@dataclass(frozen=True)
class NoiseBlock:
    t2_star_s: float | None = None
    delta_omega_rad_s: float = 0.0
    angular_delta_omega: bool = False
    delta_rabi: float = 0.0
    delta_nu: float = 0.0
    heating_rate: float = 0.0
    crosstalk: bool = False


@dataclass(frozen=True)
class NumericsBlock:
    dt_divisor: int = 50
    n_a: int = 16
    n_b: int = 12
    nbar: float = 1.0
    integrator: str = "magnus4"


@dataclass(frozen=True)
class OutputBlock:
    out_dir: str = "."
    csv_float_format: str = ".10e"


_BLOCKS = {
    "system": SystemBlock,
    "gate": GateBlock,
    "noise": NoiseBlock,
    "numerics": NumericsBlock,
    "output": OutputBlock,
}


@dataclass(frozen=True)
class RunConfig:
    system: SystemBlock = field(default_factory=SystemBlock)
    gate: GateBlock = field(default_factory=GateBlock)
    noise: NoiseBlock = field(default_factory=NoiseBlock)
    numerics: NumericsBlock = field(default_factory=NumericsBlock)
    output: OutputBlock = field(default_factory=OutputBlock)

    def numerics_settings(self) -> Numerics:
        return Numerics(
            divisor=self.numerics.dt_divisor,
            n_a=self.numerics.n_a,
            n_b=self.numerics.n_b,
            nbar=self.numerics.nbar,
            method=self.numerics.integrator,
        )

    def noise_settings(self) -> NoiseConfig:
        return NoiseConfig(
            delta_omega=self.noise.delta_omega_rad_s,
            t2_star=self.noise.t2_star_s,
            angular_delta_omega=self.noise.angular_delta_omega,
            delta_rabi=self.noise.delta_rabi,
            delta_nu=self.noise.delta_nu,
            heating_rate=self.noise.heating_rate,
            crosstalk=self.noise.crosstalk,
        )

    def gate_name(self) -> str:
        if self.gate.preset is None:
            raise ValueError("only preset gates are runnable from configs")
        get_preset(self.gate.preset)  # validates
        return self.gate.preset.upper()


def _build_block(name: str, cls, data: dict):
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown keys in [{name}]: {sorted(unknown)}")
    return cls(**data)


def load_config(path: str | Path | None) -> RunConfig:
    """Parse and validate a TOML run configuration; defaults when path is None."""
    if path is None:
        return RunConfig()
    raw = tomllib.loads(Path(path).read_text())
    unknown = set(raw) - set(_BLOCKS)
    if unknown:
        raise ValueError(f"unknown config blocks: {sorted(unknown)}")
    blocks = {
        name: _build_block(name, cls, raw.get(name, {})) for name, cls in _BLOCKS.items()
    }
    return RunConfig(**blocks)


def write_manifest(path: Path, config: RunConfig, extra: dict | None = None) -> None:
    """Emit the complete parameter record for a run.

    Everything that affects a result is included: the parsed config, derived
    angular frequencies, and any runtime values the caller collected.
    """
    doc = {
        "config": asdict(config),
        "conventions": {
            "config_frequencies": "ordinary frequencies in Hz",
            "internal_frequencies": "angular (rad/s), omega = 2*pi*f",
            "nu_rad_s": 2.0 * math.pi * config.system.nu_hz,
        },
        "determinism": "no random number generator is used anywhere in the pipeline",
    }
    if extra:
        doc["run"] = extra
    path.write_text(json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n")
