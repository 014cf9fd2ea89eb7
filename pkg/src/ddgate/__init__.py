"""Oscillator-mediated two-qubit phase gates driven by shaped TQXY16 sequences."""

from .design import (
    GateCandidate,
    IonPhysicalParams,
    SystemParams,
    detuning_xi,
    dispersive_gate_time,
    enumerate_gates,
)
from .dynamics import NoiseConfig, QuantumState, bell_fidelity, build_hamiltonian
from .fourier import (
    FourierSpectrum,
    SecondOrderCoeffs,
    dispersive_j,
    f_instantaneous,
    f_modulated,
    f_tophat,
    second_mode_j,
    second_order_coeffs,
)
from .pulse import APPENDIX_A_TABLE, PulseParams, apply_ramp, omega_of_t, validate_pulse
from .sequence import SequencePlan, build_tqxy16_sequence, build_xy8_sequence
from .trajectory import CardioidPlan, analytic_bell_fidelity, match_cardioid

__version__ = "0.1.0"
