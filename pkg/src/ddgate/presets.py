"""Built-in gate presets: the four benchmark gates plus a fast test-scale gate.

G1, G2, G4 are circular-trajectory gates fixed by (k, N); the envelope
amplitude d is solved from the detuning condition at import of the preset.
G3 is the cardioid gate: its per-block detunings and amplitude are frozen
from a converged `match_cardioid` run (regenerated by scripts/match_g3.py and
checked by the slow test suite).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .design import GateCandidate, SystemParams, solve_d_for_n
from .pulse import APPENDIX_A_TABLE, PulseParams
from .sequence import (
    SequencePlan,
    build_cardioid_sequence,
    build_tqxy16_sequence,
    build_xy8_sequence,
)

__all__ = ["GatePreset", "PRESETS", "get_preset", "preset_candidate", "preset_plan"]

NU_HZ = 220e3  # centre-of-mass mode, both regimes

# Converged cardioid detunings for G3 (ordinary frequency, Hz), emitted by
# scripts/match_g3.py; the matcher run is reproduced in the acceptance suite.
G3_XI_HZ: tuple[float, ...] = (
    1237.0559843651242,
    307.87594486268796,
    615.6523171593833,
    96.31417437437874,
    535.767431338554,
    53.28186241217989,
    532.9665903115252,
    60.54616808536958,
    568.5850104698202,
    127.25977602592,
    688.8601386743803,
    814.730640346957,
)
G3_D: float = 0.9311201933347494


@dataclass(frozen=True)
class GatePreset:
    name: str
    eta: float
    k: int
    n_blocks: int
    t_ramp: float
    heating_rate: float
    delta_omega_qubits: float
    cardioid: bool = False
    xi_hz: tuple[float, ...] = ()
    d_override: float | None = None
    # error-budget noise magnitudes
    t2_star: float = 500e-6
    delta_rabi: float = 5e-3
    delta_nu: float = 1e-5

    def system(self) -> SystemParams:
        return SystemParams(
            nu=2.0 * math.pi * NU_HZ,
            eta=self.eta,
            two_mode=True,
            delta_omega_qubits=self.delta_omega_qubits,
        )


PRESETS: dict[str, GatePreset] = {
    "G1": GatePreset("G1", 0.005, 9, 5, 149e-9, 35.0, 2 * math.pi * 2.54e6),
    "G2": GatePreset("G2", 0.005, 9, 10, 295e-9, 35.0, 2 * math.pi * 2.54e6),
    "G3": GatePreset(
        "G3", 0.005, 9, 12, 1260e-9, 35.0, 2 * math.pi * 2.54e6,
        cardioid=True, xi_hz=G3_XI_HZ, d_override=G3_D,
    ),
    "G4": GatePreset("G4", 0.04, 5, 2, 49e-9, 100.0, 2 * math.pi * 20.34e6),
    # test-scale gate: one TQXY16 block, seconds to simulate end to end
    "TOY": GatePreset("TOY", 0.03, 5, 1, 200e-9, 100.0, 2 * math.pi * 2.54e6),
}


def get_preset(name: str) -> GatePreset:
    try:
        return PRESETS[name.upper()]
    except KeyError:
        raise KeyError(f"unknown gate preset {name!r}; have {sorted(PRESETS)}") from None


@lru_cache(maxsize=None)
def preset_candidate(name: str) -> GateCandidate:
    """Solved circular-gate candidate for a non-cardioid preset."""
    p = get_preset(name)
    if p.cardioid:
        raise ValueError(f"{p.name} is a cardioid gate; use preset_plan")
    system = p.system()
    _, _, d_max = APPENDIX_A_TABLE[p.k]
    d = solve_d_for_n(p.k, p.n_blocks, system, (math.copysign(1e-3, d_max), d_max))
    if d is None:
        raise RuntimeError(f"preset {p.name}: no d solves N={p.n_blocks}")
    xi = system.nu / (8 * p.k * p.n_blocks + 1)
    t_g = 2.0 * math.pi / xi
    from .design import dispersive_gate_time
    from .pulse import peak_rabi

    b, c, _ = APPENDIX_A_TABLE[p.k]
    t_pi = math.pi * p.k / (system.nu - xi)
    pulse = PulseParams(k=p.k, b=b, c=c, d=d, t_pi=t_pi)
    return GateCandidate(
        k=p.k, N=p.n_blocks, d=d, xi_k=xi, t_g=t_g,
        omega_pp=peak_rabi(pulse),
        speed_ratio=t_g / dispersive_gate_time(system.eta, system.nu),
        j_k=0.0, j_k_uncorrected=0.0, two_mode=True,
    )


def preset_pulse(name: str, ramped: bool = False) -> PulseParams:
    p = get_preset(name)
    b, c, _ = APPENDIX_A_TABLE[p.k]
    if p.cardioid:
        d = p.d_override
        t_pi = math.pi * p.k / (p.system().nu - 2 * math.pi * p.xi_hz[0])
    else:
        cand = preset_candidate(name)
        d, t_pi = cand.d, cand.t_pi
    return PulseParams(
        k=p.k, b=b, c=c, d=d, t_pi=t_pi, t_ramp=p.t_ramp if ramped else 0.0
    )


def preset_plan(
    name: str, kind: str = "tqxy16", ramped: bool = False, t_ramp: float | None = None
) -> SequencePlan:
    """Schedule for a preset: 'tqxy16' (cardioid presets use their detuning
    list) or the 'xy8' baseline.  t_ramp overrides the preset ramp length."""
    p = get_preset(name)
    system = p.system()
    ramp = (t_ramp if t_ramp is not None else p.t_ramp) if (ramped or t_ramp) else 0.0
    if p.cardioid:
        if not p.xi_hz:
            raise RuntimeError(f"preset {p.name} has no frozen detuning vector yet")
        if kind == "xy8":
            raise ValueError("XY8 baseline is not defined for the cardioid preset")
        b, c, _ = APPENDIX_A_TABLE[p.k]
        base = PulseParams(k=p.k, b=b, c=c, d=p.d_override, t_pi=1.0, t_ramp=ramp)
        return build_cardioid_sequence(
            [2 * math.pi * f for f in p.xi_hz], base, system.nu, p.k
        )
    cand = preset_candidate(name)
    pulse = preset_pulse(name, ramped=False)
    if ramp:
        from dataclasses import replace

        pulse = replace(pulse, t_ramp=ramp)
    if kind == "tqxy16":
        return build_tqxy16_sequence(cand, pulse)
    if kind == "xy8":
        return build_xy8_sequence(cand, pulse)
    raise ValueError(f"unknown plan kind {kind!r}")
