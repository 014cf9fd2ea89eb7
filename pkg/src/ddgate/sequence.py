"""Gate schedules: TQXY16 / XY8 phase patterns and variable-block sequences.

A TQXY16 block is XY8 driven in phase on both qubits followed by XY8 with the
second qubit's drive phase inverted:

    axes   X Y X Y Y X Y X | X Y X Y Y X Y X
    sign   + + + + + + + + | - - - - - - - -

Pulses are contiguous (each spans tau_k/2) so the induced modulation function
is the block-periodic f_z of the pulse module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np

from .design import GateCandidate
from .pulse import PulseParams, fz, validate_pulse

__all__ = [
    "PulseSlot",
    "SequencePlan",
    "build_tqxy16_sequence",
    "build_xy8_sequence",
    "build_cardioid_sequence",
    "export_plan",
    "import_plan",
]

XY8_AXES = ("X", "Y", "X", "Y", "Y", "X", "Y", "X")


@dataclass(frozen=True)
class PulseSlot:
    """One scheduled pi pulse."""

    index: int
    axis: str
    qubit2_sign: int
    t_start: float
    pulse: PulseParams
    xi: float

    @property
    def t_end(self) -> float:
        return self.t_start + self.pulse.t_pi


@dataclass(frozen=True)
class SequencePlan:
    """Immutable timed schedule of pulses making up one gate."""

    slots: tuple[PulseSlot, ...]
    total_duration: float
    n_blocks: int
    kind: str  # "tqxy16" | "xy8" | "cardioid"

    def __post_init__(self):
        t = 0.0
        for s in self.slots:
            if abs(s.t_start - t) > 1e-12 * max(self.total_duration, 1.0):
                raise ValueError(f"pulse {s.index} not contiguous at t={s.t_start}")
            t = s.t_end
        if abs(t - self.total_duration) > 1e-12 * max(self.total_duration, 1.0):
            raise ValueError("slot times do not add up to total_duration")

    def __len__(self) -> int:
        return len(self.slots)

    @property
    def boundaries(self) -> np.ndarray:
        return np.array([s.t_start for s in self.slots] + [self.total_duration])

    def slot_at(self, t: float) -> PulseSlot:
        i = int(np.searchsorted(self.boundaries, t, side="right") - 1)
        return self.slots[min(max(i, 0), len(self.slots) - 1)]

    def fz(self, t):
        """Sequence-level modulation function (sign alternates every pulse)."""
        t = np.asarray(t, dtype=float)
        idx = np.clip(np.searchsorted(self.boundaries, t, side="right") - 1, 0, len(self.slots) - 1)
        out = np.empty_like(t)
        for i in np.unique(idx):
            s = self.slots[i]
            mask = idx == i
            sign = 1.0 if i % 2 == 0 else -1.0
            out[mask] = sign * np.asarray(fz(t[mask], s.pulse, s.t_start))
        return out if out.ndim else float(out)


def _assemble(
    block_params: Iterable[tuple[PulseParams, float]],
    signs_per_block: tuple[int, ...],
    kind: str,
) -> SequencePlan:
    slots = []
    t = 0.0
    i = 0
    n_blocks = 0
    for pulse, xi in block_params:
        n_blocks += 1
        for j in range(16):
            slots.append(
                PulseSlot(
                    index=i,
                    axis=XY8_AXES[j % 8],
                    qubit2_sign=signs_per_block[j],
                    t_start=t,
                    pulse=pulse,
                    xi=xi,
                )
            )
            t += pulse.t_pi
            i += 1
    return SequencePlan(tuple(slots), t, n_blocks, kind)


def _candidate_pulse(candidate: GateCandidate, pulse: PulseParams) -> PulseParams:
    if abs(pulse.t_pi - candidate.t_pi) > 1e-12 * candidate.t_pi:
        raise ValueError(
            f"pulse duration {pulse.t_pi} inconsistent with candidate t_pi {candidate.t_pi}"
        )
    return pulse


def build_tqxy16_sequence(candidate: GateCandidate, pulse: PulseParams) -> SequencePlan:
    """N TQXY16 blocks of 16 pulses; qubit-2 drive phase flips every second XY8."""
    if candidate.N < 1:
        raise ValueError("candidate must have at least one block")
    pulse = _candidate_pulse(candidate, pulse)
    signs = (1,) * 8 + (-1,) * 8
    plan = _assemble(
        ((pulse, candidate.xi_k) for _ in range(candidate.N)), signs, "tqxy16"
    )
    if abs(plan.total_duration - candidate.t_g) > 1e-9 * candidate.t_g:
        raise ValueError("assembled duration does not match the candidate gate time")
    return plan


def build_xy8_sequence(candidate: GateCandidate, pulse: PulseParams) -> SequencePlan:
    """Same pulse train as TQXY16 but driven in phase throughout (baseline)."""
    if candidate.N < 1:
        raise ValueError("candidate must have at least one block")
    pulse = _candidate_pulse(candidate, pulse)
    signs = (1,) * 16
    return _assemble(((pulse, candidate.xi_k) for _ in range(candidate.N)), signs, "xy8")


def build_cardioid_sequence(
    xi_list: Iterable[float],
    base_pulse: PulseParams,
    nu: float,
    k: int,
) -> SequencePlan:
    """Variable-block sequence: per-block t_pi^j = pi k / (nu - xi_j), shared (b, c, d)."""
    signs = (1,) * 8 + (-1,) * 8
    params = []
    for xi in xi_list:
        t_pi = math.pi * k / (nu - xi)
        pulse = PulseParams(
            k=k, b=base_pulse.b, c=base_pulse.c, d=base_pulse.d,
            t_pi=t_pi, t_ramp=base_pulse.t_ramp,
        )
        report = validate_pulse(pulse)
        if not report.passed:
            raise ValueError(f"unphysical per-block pulse (xi={xi}): {report.violations}")
        params.append((pulse, xi))
    return _assemble(params, signs, "cardioid")


def export_plan(plan: SequencePlan, stream: TextIO) -> None:
    """One record per pulse: index, axis, sign, t_start_s, t_pi_s, xi_rad_s."""
    stream.write("index,axis,sign,t_start_s,t_pi_s,xi_rad_s\n")
    for s in plan.slots:
        stream.write(
            f"{s.index},{s.axis},{s.qubit2_sign:+d},"
            f"{s.t_start:.15e},{s.pulse.t_pi:.15e},{s.xi:.15e}\n"
        )


def import_plan(stream: TextIO, base_pulse: PulseParams, kind: str = "tqxy16") -> SequencePlan:
    """Rebuild a plan from its exported record; pulse shape comes from base_pulse."""
    header = stream.readline().strip()
    if header != "index,axis,sign,t_start_s,t_pi_s,xi_rad_s":
        raise ValueError(f"unrecognised plan header: {header!r}")
    slots = []
    t_end = 0.0
    for line in stream:
        if not line.strip():
            continue
        idx, axis, sign, t_start, t_pi, xi = line.split(",")
        pulse = PulseParams(
            k=base_pulse.k, b=base_pulse.b, c=base_pulse.c, d=base_pulse.d,
            t_pi=float(t_pi), t_ramp=base_pulse.t_ramp,
        )
        slots.append(
            PulseSlot(int(idx), axis, int(sign), float(t_start), pulse, float(xi))
        )
        t_end = slots[-1].t_end
    n_blocks = len(slots) // 16
    return SequencePlan(tuple(slots), t_end, n_blocks, kind)
