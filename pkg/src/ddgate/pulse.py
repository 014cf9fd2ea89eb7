"""Shaped pi-pulse construction: modulation function, Rabi profile, ramps.

The design ansatz for one pulse spanning [t_i, t_i + t_pi] is

    f_z(t) = cos(pi (t - t_i) / t_pi) + beta(t) sin(k w_k (t - t_m)),

with the erf-windowed envelope

    beta(t) = d sin(pi k / 2) / (pi k b) * [erf((t - t_l)/(c t_pi)) - erf((t - t_r)/(c t_pi))],

t_m the pulse centre and t_{l,r} = t_m -/+ b t_pi.  The physical drive is
recovered by inverting f_z = cos(int Omega):

    Omega(t) = -f_z'(t) / sqrt(1 - f_z(t)^2).

Pulses are back-to-back (t_pi = tau_k / 2), so every pulse carries the same
Rabi waveform; only the drive axis and qubit-2 phase sign change.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, TextIO

import numpy as np
from scipy.integrate import quad
from scipy.special import erf

from .fourier import FourierSpectrum, modulated_spectrum, tophat_spectrum

__all__ = [
    "PulseParams",
    "TopHatPulse",
    "RampedPulse",
    "APPENDIX_A_TABLE",
    "fz",
    "fz_prime",
    "omega_of_t",
    "peak_rabi",
    "pulse_area",
    "apply_ramp",
    "validate_pulse",
    "PulseValidation",
    "export_waveform",
]

# Suitable envelope parameters (b, c) and physicality bound |d_max| per harmonic.
APPENDIX_A_TABLE: dict[int, tuple[float, float, float]] = {
    3: (0.33, 0.035, -2.3),
    5: (0.30, 0.04, -1.5),
    7: (0.29, 0.05, 2.4),
    9: (0.33, 0.042, 2.3),
    11: (0.34, 0.03, 1.9),
    13: (0.35, 0.035, 1.7),
    15: (0.30, 0.035, 2.3),
}

# Floor on 1 - f_z^2 when inverting for Omega.  The erf tails can push
# |f_z| within ~1e-9 of 1 (or 1e-13 past it for d < 0) right at the pulse
# edges where f_z' is also vanishing; flooring the root argument keeps the
# evaluation finite and continuous there without touching interior peaks.
_OMEGA_FLOOR = 1e-10


@dataclass(frozen=True)
class PulseParams:
    """Amplitude-modulated pi pulse descriptor.

    t_pi is the pulse duration and tau = 2 t_pi the block period (pulses are
    contiguous).  t_ramp > 0 enables sin^2 edge ramps; delta_omega_pi is the
    area-restoring amplitude factor found by `apply_ramp`.
    """

    k: int
    b: float
    c: float
    d: float
    t_pi: float
    t_ramp: float = 0.0
    delta_omega_pi: float = 0.0

    def __post_init__(self):
        if self.k < 1 or self.k % 2 == 0:
            raise ValueError(f"harmonic k must be odd positive, got {self.k}")
        if not 0.0 < self.b < 0.5:
            raise ValueError(f"need 0 < b < 0.5, got b={self.b}")
        if self.c <= 0.0:
            raise ValueError(f"need c > 0, got c={self.c}")
        if self.t_pi <= 0.0:
            raise ValueError(f"need t_pi > 0, got {self.t_pi}")
        if not 0.0 <= self.t_ramp < self.t_pi / 2:
            raise ValueError(f"need 0 <= t_ramp < t_pi/2, got {self.t_ramp}")

    @property
    def tau(self) -> float:
        return 2.0 * self.t_pi

    @property
    def omega_k(self) -> float:
        """Block angular frequency 2 pi / tau."""
        return math.pi / self.t_pi

    @classmethod
    def from_table(cls, k: int, d: float, t_pi: float, t_ramp: float = 0.0) -> "PulseParams":
        b, c, _ = APPENDIX_A_TABLE[k]
        return cls(k=k, b=b, c=c, d=d, t_pi=t_pi, t_ramp=t_ramp)


@dataclass(frozen=True)
class TopHatPulse:
    """Constant-amplitude pi pulse of width t_pi centred in a tau/2 slot."""

    k: int
    t_pi: float
    tau: float

    def __post_init__(self):
        if not 0.0 < self.t_pi <= self.tau / 2:
            raise ValueError("top-hat pulse must fit in half a period")

    @property
    def rabi(self) -> float:
        return math.pi / self.t_pi


def _beta(s: np.ndarray, p: PulseParams) -> np.ndarray:
    t_m = p.t_pi / 2
    t_l, t_r = t_m - p.b * p.t_pi, t_m + p.b * p.t_pi
    amp = p.d * math.sin(math.pi * p.k / 2) / (math.pi * p.k * p.b)
    return amp * (erf((s - t_l) / (p.c * p.t_pi)) - erf((s - t_r) / (p.c * p.t_pi)))


def _beta_prime(s: np.ndarray, p: PulseParams) -> np.ndarray:
    t_m = p.t_pi / 2
    t_l, t_r = t_m - p.b * p.t_pi, t_m + p.b * p.t_pi
    amp = p.d * math.sin(math.pi * p.k / 2) / (math.pi * p.k * p.b)
    g = 2.0 / (math.sqrt(math.pi) * p.c * p.t_pi)
    return amp * g * (
        np.exp(-(((s - t_l) / (p.c * p.t_pi)) ** 2))
        - np.exp(-(((s - t_r) / (p.c * p.t_pi)) ** 2))
    )


def fz(t, pulse: PulseParams, t_i: float = 0.0):
    """Modulation function of one pulse, evaluated at absolute time t.

    Valid on [t_i, t_i + t_pi]; the block-periodic f_z is assembled from
    sign-alternating copies by the sequence builder.
    """
    s = np.asarray(t, dtype=float) - t_i
    t_m = pulse.t_pi / 2
    val = np.cos(math.pi * s / pulse.t_pi) + _beta(s, pulse) * np.sin(
        pulse.k * pulse.omega_k * (s - t_m)
    )
    return val if val.ndim else float(val)


def fz_prime(t, pulse: PulseParams, t_i: float = 0.0):
    """Analytic time derivative of `fz` (finite differences would amplify the
    1/sqrt(1 - f_z^2) edge singularity)."""
    s = np.asarray(t, dtype=float) - t_i
    t_m = pulse.t_pi / 2
    kw = pulse.k * pulse.omega_k
    val = (
        -math.pi / pulse.t_pi * np.sin(math.pi * s / pulse.t_pi)
        + _beta_prime(s, pulse) * np.sin(kw * (s - t_m))
        + _beta(s, pulse) * kw * np.cos(kw * (s - t_m))
    )
    return val if val.ndim else float(val)


def omega_of_t(t, pulse: PulseParams):
    """Rabi frequency Omega(t) = -f_z' / sqrt(1 - f_z^2) on the pulse interval.

    The signed value is kept: for large |d| the modulation can fold back and
    the drive phase flips mid-pulse.
    """
    f = np.asarray(fz(t, pulse))
    df = np.asarray(fz_prime(t, pulse))
    root = np.sqrt(np.maximum(1.0 - f * f, _OMEGA_FLOOR))
    val = -df / root
    return val if val.ndim else float(val)


def block_fz(t, pulse: PulseParams, t_start: float = 0.0):
    """Block-periodic modulation function: sign-alternating contiguous pulses."""
    s = np.asarray(t, dtype=float) - t_start
    idx = np.floor(s / pulse.t_pi).astype(int)
    local = s - idx * pulse.t_pi
    sign = np.where(idx % 2 == 0, 1.0, -1.0)
    val = sign * fz(local, pulse)
    return val if val.ndim else float(val)


def peak_rabi(pulse: PulseParams, grid: int = 20001) -> float:
    """Maximum |Omega(t)| over the pulse, grid scan plus golden-section refine."""
    s = np.linspace(0.0, pulse.t_pi, grid)[1:-1]
    om = np.abs(omega_of_t(s, pulse))
    i = int(np.argmax(om))
    lo, hi = s[max(i - 1, 0)], s[min(i + 1, len(s) - 1)]
    # golden-section on -|Omega|
    invphi = (math.sqrt(5) - 1) / 2
    a, bnd = lo, hi
    x1 = bnd - invphi * (bnd - a)
    x2 = a + invphi * (bnd - a)
    f1 = abs(omega_of_t(x1, pulse))
    f2 = abs(omega_of_t(x2, pulse))
    for _ in range(60):
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (bnd - a)
            f2 = abs(omega_of_t(x2, pulse))
        else:
            bnd, x2, f2 = x2, x1, f1
            x1 = bnd - invphi * (bnd - a)
            f1 = abs(omega_of_t(x1, pulse))
    return max(float(np.max(om)), f1, f2)


def pulse_area(pulse: PulseParams) -> float:
    """Rotation angle int Omega dt delivered by one unramped pulse.

    Equals arccos(f_z(t_pi)) - arccos(f_z(0)) exactly; the residual deficit
    from pi is set by the erf tails at the pulse edges.
    """
    f0 = float(np.clip(fz(0.0, pulse), -1.0, 1.0))
    f1 = float(np.clip(fz(pulse.t_pi, pulse), -1.0, 1.0))
    return math.acos(f1) - math.acos(f0)


@dataclass(frozen=True)
class RampedPulse:
    """Pulse with sin^2 edge ramps and the area-restoring amplitude factor."""

    base: PulseParams
    t_ramp: float
    delta_omega_pi: float

    @property
    def t_pi(self) -> float:
        return self.base.t_pi

    def omega(self, t):
        """Ramped, renormalised Rabi profile on [0, t_pi]."""
        s = np.asarray(t, dtype=float)
        om = np.asarray(omega_of_t(s, self.base))
        tr = self.t_ramp
        if tr > 0.0:
            window = np.ones_like(om)
            rise = s <= tr
            fall = s >= self.base.t_pi - tr
            window = np.where(rise, np.sin(math.pi * s / (2 * tr)) ** 2, window)
            window = np.where(
                fall, np.sin(math.pi * (s - self.base.t_pi) / (2 * tr)) ** 2, window
            )
            om = om * window
        val = (1.0 + self.delta_omega_pi) * om
        return val if val.ndim else float(val)


def ramped_area(pulse: PulseParams, t_ramp: float) -> float:
    """Area of the ramped (un-renormalised) profile, adaptive quadrature."""
    if t_ramp == 0.0:
        return pulse_area(pulse)
    probe = RampedPulse(pulse, t_ramp, 0.0)
    pts = [t_ramp, pulse.t_pi / 2, pulse.t_pi - t_ramp]
    val, _ = quad(lambda s: float(probe.omega(s)), 0.0, pulse.t_pi,
                  points=pts, limit=400, epsabs=1e-12, epsrel=1e-11)
    return val


def apply_ramp(pulse: PulseParams) -> RampedPulse:
    """Attach sin^2 edge ramps and solve delta_omega_pi so the pulse area is pi.

    The area is exactly linear in the amplitude factor, so the root of
    (1 + delta) * area - pi is solved directly.
    """
    area = ramped_area(pulse, pulse.t_ramp)
    if pulse.t_ramp == 0.0:
        return RampedPulse(pulse, 0.0, 0.0)
    delta = math.pi / area - 1.0
    residual = abs((1.0 + delta) * area - math.pi)
    if residual > 1e-10:
        raise RuntimeError(f"area renormalisation failed, residual {residual}")
    return RampedPulse(pulse, pulse.t_ramp, delta)


@dataclass(frozen=True)
class PulseValidation:
    passed: bool
    violations: tuple[str, ...]
    max_abs_fz: float


def validate_pulse(pulse: PulseParams, grid: int = 10_000) -> PulseValidation:
    """Check physicality: Appendix-A amplitude bound, |f_z| <= 1 on a grid,
    and the sharp-window condition 1/2 - b >> c."""
    violations = []
    row = APPENDIX_A_TABLE.get(pulse.k)
    if row is not None and abs(pulse.d) > abs(row[2]) + 1e-12:
        violations.append(f"|d|={abs(pulse.d):.4g} exceeds d_max={abs(row[2])} for k={pulse.k}")
    edge_tail = math.erfc((0.5 - pulse.b) / pulse.c)
    if edge_tail > 1e-3:
        violations.append(
            f"envelope tail erfc((1/2-b)/c)={edge_tail:.2e} > 1e-3: 1/2 - b >> c violated"
        )
    s = np.linspace(0.0, pulse.t_pi, grid)
    max_abs = float(np.max(np.abs(fz(s, pulse))))
    if max_abs > 1.0 + 1e-9:
        violations.append(f"|f_z| reaches {max_abs:.6f} > 1: unphysical pulse")
    return PulseValidation(not violations, tuple(violations), max_abs)


def transverse_profile(pulse) -> tuple[Callable[[float], float], float]:
    """f_perp offset from the pulse centre, and the half-width of its support.

    f_perp = sin(int Omega) = sqrt(1 - f_z^2) during the pulse (the accumulated
    phase stays in [0, pi]) and vanishes between pulses.
    """
    if isinstance(pulse, TopHatPulse):
        rabi = pulse.rabi

        def f_perp(t: float) -> float:
            return math.sin(rabi * (t + pulse.t_pi / 2)) if t < pulse.t_pi / 2 else 0.0

        return f_perp, pulse.t_pi / 2

    def f_perp(t: float) -> float:
        f = float(fz(pulse.t_pi / 2 + t, pulse))
        return math.sqrt(max(1.0 - f * f, 0.0))

    return f_perp, pulse.t_pi / 2


def spectrum_of(pulse, n_max: int | None = None) -> FourierSpectrum:
    """Cosine spectrum of the block-periodic f_z for either pulse family."""
    if isinstance(pulse, TopHatPulse):
        return tophat_spectrum(pulse.k, pulse.t_pi, pulse.tau, n_max)
    return modulated_spectrum(pulse, n_max)


def with_ramp(pulse: PulseParams, t_ramp: float) -> PulseParams:
    return replace(pulse, t_ramp=t_ramp)


def export_waveform(
    pulse: PulseParams,
    stream: TextIO,
    samples: int = 2000,
    axis_pattern: tuple[str, ...] = ("X",),
) -> None:
    """Write a sampled (t, f_z, Omega_x, Omega_y) CSV for one pulse per axis entry."""
    ramped = apply_ramp(pulse) if pulse.t_ramp > 0 else RampedPulse(pulse, 0.0, 0.0)
    stream.write("t_s,fz,omega_x_rad_s,omega_y_rad_s\n")
    t_local = np.linspace(0.0, pulse.t_pi, samples, endpoint=False)
    for ip, axis in enumerate(axis_pattern):
        sign = 1.0 if ip % 2 == 0 else -1.0
        t_abs = ip * pulse.t_pi + t_local
        f = sign * np.asarray(fz(t_local, pulse))
        om = np.asarray(ramped.omega(t_local))
        ox = om if axis == "X" else np.zeros_like(om)
        oy = om if axis == "Y" else np.zeros_like(om)
        for row in zip(t_abs, f, ox, oy):
            stream.write(f"{row[0]:.12e},{row[1]:.12e},{row[2]:.12e},{row[3]:.12e}\n")
