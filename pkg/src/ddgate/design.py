"""Gate design: detuning equation, dispersive benchmark, candidate enumeration.

A gate built from N TQXY16 blocks closes its phase-space loop when the block
timing satisfies (nu - xi_k) / (8 k |xi_k|) = N with N a positive integer,
i.e. xi_k = nu / (8 k N + 1) and t_g = 2 pi / xi_k = 8 N tau_k.  The detuning
that delivers the target two-qubit phase pi/8 is

    xi_k = 2 eta nu [ sqrt(f_k^2 + 4 eta^2 J_k^2) + 2 eta J_k ],    J_k > 0,

so for each reachable N the envelope amplitude d is the root of
xi_k(d) = nu / (8 k N + 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.constants import hbar
from scipy.optimize import brentq

from . import fourier
from .pulse import APPENDIX_A_TABLE, PulseParams, peak_rabi

__all__ = [
    "SystemParams",
    "IonPhysicalParams",
    "GateCandidate",
    "detuning_xi",
    "dispersive_gate_time",
    "enumerate_gates",
    "solve_d_for_n",
]


@dataclass(frozen=True)
class IonPhysicalParams:
    """Trapped-ion hardware inputs behind the effective coupling.

    gamma_e in rad/s per Tesla, gradient g_B in T/m, ion mass M in kg.
    """

    gamma_e: float
    g_B: float
    M: float

    def eta(self, nu: float) -> float:
        """Effective Lamb-Dicke factor gamma_e g_B / (8 nu) * sqrt(hbar / M nu)."""
        return self.gamma_e * self.g_B / (8.0 * nu) * math.sqrt(hbar / (self.M * nu))

    def ion_distance(self, nu: float) -> float:
        """Equilibrium separation (e^2 / (2 pi eps0 M nu^2))^(1/3)."""
        from scipy.constants import e, epsilon_0

        return (e**2 / (2.0 * math.pi * epsilon_0 * self.M * nu**2)) ** (1.0 / 3.0)

    def qubit_splitting(self, nu: float) -> float:
        """Delta_omega = gamma_e g_B d from the gradient across the crystal."""
        return self.gamma_e * self.g_B * self.ion_distance(nu)


@dataclass(frozen=True)
class SystemParams:
    """Qubit-oscillator system constants.

    nu in rad/s; eta dimensionless (<< 1).  two_mode enables the breathing
    mode at sqrt(3) nu with coupling -3^(-1/4) eta nu on S_z^(-).
    delta_omega_qubits is the qubit frequency splitting driving crosstalk.
    """

    nu: float
    eta: float
    two_mode: bool = True
    delta_omega_qubits: float = 0.0
    physical: IonPhysicalParams | None = None

    def __post_init__(self):
        if self.nu <= 0.0:
            raise ValueError("nu must be positive")
        if not 0.0 < self.eta < 0.2:
            raise ValueError(f"eta={self.eta} outside the weak-coupling regime eta << 1")
        if self.physical is not None:
            derived = self.physical.eta(self.nu)
            if abs(derived - self.eta) > 5e-3 * self.eta:
                raise ValueError(
                    f"stored eta={self.eta} inconsistent with derived {derived:.6g}"
                )


@dataclass(frozen=True)
class GateCandidate:
    """A valid TQXY16 gate design within one harmonic."""

    k: int
    N: int
    d: float
    xi_k: float
    t_g: float
    omega_pp: float
    speed_ratio: float
    j_k: float
    j_k_uncorrected: float
    two_mode: bool

    @property
    def tau_k(self) -> float:
        return self.t_g / (8 * self.N)

    @property
    def t_pi(self) -> float:
        return self.tau_k / 2


def detuning_xi(eta: float, nu: float, f_k: float, j_k: float) -> float:
    """Detuning of the k-th harmonic delivering theta(t_g) = pi/8.

    Only the J_k > 0 branch is defined; the closed form follows from the
    phase budget 2 pi R_circ^2 + (1/2) nu eta^2 J_k t_g = pi/8.
    """
    if j_k <= 0.0:
        raise ValueError(f"detuning formula requires J_k > 0, got {j_k}")
    return 2.0 * eta * nu * (math.sqrt(f_k**2 + 4.0 * eta**2 * j_k**2) + 2.0 * eta * j_k)


def dispersive_gate_time(eta: float, nu: float) -> float:
    """Gate time pi / (8 eta^2 nu) of the undriven dispersive gate."""
    if eta <= 0.0 or nu <= 0.0:
        raise ValueError("eta and nu must be positive")
    return math.pi / (8.0 * eta**2 * nu)


def _design_couplings(
    k: int, d: float, system: SystemParams, n_max: int | None = None
) -> tuple[float, float, float]:
    """(f_k, J_k possibly two-mode corrected, J_k uncorrected) at amplitude d."""
    b, c, _ = APPENDIX_A_TABLE[k]
    pulse = PulseParams(k=k, b=b, c=c, d=d, t_pi=1.0)  # coefficients are t_pi-free
    spec = fourier.modulated_spectrum(pulse, n_max)
    j_un = fourier.dispersive_j(spec)
    j = fourier.two_mode_corrected_j(spec) if system.two_mode else j_un
    return spec.f_k, j, j_un


def xi_at_d(k: int, d: float, system: SystemParams) -> float:
    f_k, j, _ = _design_couplings(k, d, system)
    return detuning_xi(system.eta, system.nu, f_k, j)


def solve_d_for_n(
    k: int,
    N: int,
    system: SystemParams,
    d_range: tuple[float, float],
    xtol: float = 1e-12,
) -> float | None:
    """Envelope amplitude making (nu - xi_k)/(8 k xi_k) = N exactly, or None.

    The map d -> xi is smooth and monotone in |d| over the Appendix-A range,
    so a bracketed root solve on the signed interval suffices.
    """
    xi_target = system.nu / (8 * k * N + 1)
    lo, hi = sorted(d_range)

    def g(d: float) -> float:
        return xi_at_d(k, d, system) - xi_target

    g_lo, g_hi = g(lo), g(hi)
    if g_lo * g_hi > 0.0:
        return None
    return brentq(g, lo, hi, xtol=xtol)


def enumerate_gates(
    k: int,
    system: SystemParams,
    d_range: tuple[float, float] | None = None,
    n_values: list[int] | None = None,
) -> list[GateCandidate]:
    """All valid gates within harmonic k for amplitudes inside d_range.

    Candidates are ordered by N (larger |d| gives fewer blocks and a shorter
    gate).  Both corrected and uncorrected dispersive couplings are reported.
    """
    if k % 2 == 0:
        raise ValueError(f"even harmonic k={k} carries no resonance (f_k = 0)")
    if d_range is None:
        _, _, d_max = APPENDIX_A_TABLE[k]
        d_range = (math.copysign(1e-3, d_max), d_max)
    lo, hi = d_range
    if lo == hi:
        return []

    n_lo = (system.nu / xi_at_d(k, hi, system) - 1.0) / (8 * k)
    n_hi = (system.nu / xi_at_d(k, lo, system) - 1.0) / (8 * k)
    n_min, n_max_reach = (min(n_lo, n_hi), max(n_lo, n_hi))
    if n_values is None:
        n_values = list(range(max(1, math.ceil(n_min)), math.floor(n_max_reach) + 1))

    t_g_disp = dispersive_gate_time(system.eta, system.nu)
    out = []
    for N in n_values:
        d = solve_d_for_n(k, N, system, d_range)
        if d is None:
            continue
        xi = system.nu / (8 * k * N + 1)
        t_g = 2.0 * math.pi / xi
        t_pi = math.pi * k / (system.nu - xi)
        b, c, _ = APPENDIX_A_TABLE[k]
        pulse = PulseParams(k=k, b=b, c=c, d=d, t_pi=t_pi)
        _, j, j_un = _design_couplings(k, d, system)
        out.append(
            GateCandidate(
                k=k,
                N=N,
                d=d,
                xi_k=xi,
                t_g=t_g,
                omega_pp=peak_rabi(pulse),
                speed_ratio=t_g / t_g_disp,
                j_k=j,
                j_k_uncorrected=j_un,
                two_mode=system.two_mode,
            )
        )
    return out
