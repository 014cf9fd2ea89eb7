"""Sequence assembly: TQXY16/XY8 patterns, cardioid schedules, export round-trip."""

import io
import math

import numpy as np
import pytest

from ddgate.presets import G3_D, G3_XI_HZ, preset_candidate, preset_plan, preset_pulse
from ddgate.pulse import PulseParams, pulse_area
from ddgate.sequence import (
    XY8_AXES,
    build_cardioid_sequence,
    build_tqxy16_sequence,
    build_xy8_sequence,
    export_plan,
    import_plan,
)
from ddgate.fourier import f_modulated

from oracles import fourier_coefficients_gl

NU = 2 * math.pi * 220e3


def toy_candidate_and_pulse():
    return preset_candidate("TOY"), preset_pulse("TOY")


def test_single_block_pattern_and_signs():
    cand, pulse = toy_candidate_and_pulse()
    plan = build_tqxy16_sequence(cand, pulse)
    axes = [s.axis for s in plan.slots]
    assert tuple(axes) == XY8_AXES + XY8_AXES
    signs = [s.qubit2_sign for s in plan.slots]
    assert signs == [1] * 8 + [-1] * 8
    assert sum(signs) == 0


def test_xy8_has_no_sign_flips():
    cand, pulse = toy_candidate_and_pulse()
    plan = build_xy8_sequence(cand, pulse)
    assert [s.axis for s in plan.slots] == [s.axis for s in build_tqxy16_sequence(cand, pulse).slots]
    assert all(s.qubit2_sign == 1 for s in plan.slots)


def test_g4_and_g1_block_counts():
    g4 = preset_plan("G4")
    assert g4.n_blocks == 2 and len(g4) == 32
    assert g4.total_duration == pytest.approx(368e-6, rel=1e-3)
    g1 = preset_plan("G1")
    assert g1.n_blocks == 5 and len(g1) == 80
    assert g1.slots[0].pulse.t_pi == pytest.approx(20.51e-6, rel=1e-3)


def test_contiguity_and_accumulated_rotation():
    plan = preset_plan("G4")
    for prev, nxt in zip(plan.slots, plan.slots[1:]):
        assert nxt.t_start == pytest.approx(prev.t_end, rel=1e-12)
    # every pulse delivers pi of rotation up to the erf edge tails
    total = sum(pulse_area(s.pulse) for s in plan.slots)
    assert total == pytest.approx(16 * plan.n_blocks * math.pi, rel=1e-5)


def test_degenerate_inputs_rejected():
    cand, pulse = toy_candidate_and_pulse()
    import dataclasses

    empty = dataclasses.replace(cand, N=0)
    with pytest.raises(ValueError):
        build_xy8_sequence(empty, pulse)
    with pytest.raises(ValueError):
        build_tqxy16_sequence(empty, pulse)
    mismatched = dataclasses.replace(pulse, t_pi=pulse.t_pi * 1.5)
    with pytest.raises(ValueError):
        build_tqxy16_sequence(cand, mismatched)


def test_sequence_fz_matches_spectrum():
    # Fourier-analysing one period of the scheduled modulation function
    # recovers the pulse-shape coefficients
    cand, pulse = toy_candidate_and_pulse()
    plan = build_tqxy16_sequence(cand, pulse)
    tau = pulse.tau

    def fz_period(x):
        return plan.fz(np.asarray(x) * tau)

    oracle = fourier_coefficients_gl(fz_period, 2 * pulse.k, panels=96,
                                     breakpoints=(0.5,))
    for n in range(1, 2 * pulse.k + 1):
        assert oracle[n - 1] == pytest.approx(f_modulated(n, pulse), abs=1e-6)


def test_cardioid_reduces_to_fixed_block():
    cand, pulse = toy_candidate_and_pulse()
    fixed = build_tqxy16_sequence(cand, pulse)
    base = PulseParams(k=pulse.k, b=pulse.b, c=pulse.c, d=pulse.d, t_pi=1.0)
    system_nu = NU
    card = build_cardioid_sequence([cand.xi_k] * cand.N, base, system_nu, cand.k)
    assert len(card) == len(fixed)
    assert card.total_duration == pytest.approx(fixed.total_duration, rel=1e-12)
    for a, b_ in zip(card.slots, fixed.slots):
        assert a.axis == b_.axis and a.qubit2_sign == b_.qubit2_sign
        assert a.pulse.t_pi == pytest.approx(b_.pulse.t_pi, rel=1e-12)


def test_g3_schedule_totals():
    plan = preset_plan("G3")
    assert plan.n_blocks == 12 and len(plan) == 192
    assert plan.total_duration == pytest.approx(3.936e-3, rel=2e-3)
    # per-block pulse lengths follow t_pi = pi k / (nu - xi_j)
    for j, xi_hz in enumerate(G3_XI_HZ):
        slot = plan.slots[16 * j]
        expected = math.pi * 9 / (NU - 2 * math.pi * xi_hz)
        assert slot.pulse.t_pi == pytest.approx(expected, rel=1e-12)
        assert slot.pulse.d == G3_D


def test_unphysical_block_rejected():
    base = PulseParams(k=9, b=0.33, c=0.042, d=2.5, t_pi=1.0)
    with pytest.raises(ValueError):
        build_cardioid_sequence([NU / 361], base, NU, 9)


def test_export_import_round_trip():
    plan = preset_plan("G4")
    buf = io.StringIO()
    export_plan(plan, buf)
    text = buf.getvalue()
    assert text.splitlines()[0] == "index,axis,sign,t_start_s,t_pi_s,xi_rad_s"
    assert len(text.splitlines()) == 1 + len(plan)
    restored = import_plan(io.StringIO(text), plan.slots[0].pulse)
    assert len(restored) == len(plan)
    assert restored.total_duration == pytest.approx(plan.total_duration, rel=1e-14)
    for a, b in zip(restored.slots, plan.slots):
        assert (a.axis, a.qubit2_sign) == (b.axis, b.qubit2_sign)
        assert a.t_start == pytest.approx(b.t_start, rel=1e-14)
    with pytest.raises(ValueError):
        import_plan(io.StringIO("bad,header\n"), plan.slots[0].pulse)
