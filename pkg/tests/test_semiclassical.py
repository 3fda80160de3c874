import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import trapezoid

import oracles
from comoving.constants import argon_state
from comoving.errors import NumericalFailure
from comoving.pulse import PulseSignal, PulseTrain, eval_s
from comoving.semiclassical import (ComovingParams, Evanescent, effective_index, group_velocity,
                                    local_wave_number, min_group_velocity, packet_center,
                                    packet_center_series, phase_series, phase_shift,
                                    phase_shift_asymptotic, resonance_frequency,
                                    reversal_time, spatial_shift, spatial_shift_asymptotic,
                                    spatial_shift_series, spectral_shift)

P = ComovingParams()
VX = 20 * math.sin(0.1)


def test_resonance_frequency():
    assert resonance_frequency(P, vx=VX) == pytest.approx(VX / 5e-3, rel=1e-14)
    k = P.k_from_velocity(VX)
    assert resonance_frequency(P, k) == pytest.approx(resonance_frequency(P, vx=VX), rel=1e-15)
    assert P.velocity_from_k(k) == pytest.approx(VX, rel=1e-15)


def test_k_or_vx_required_exactly_once():
    with pytest.raises(TypeError):
        phase_shift(P, 1e-3)
    with pytest.raises(TypeError):
        phase_shift(P, 1e-3, 1.0, vx=1.0)


@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
@pytest.mark.parametrize("t", [0.1e-3, 0.55e-3, 1.2e-3])
@pytest.mark.parametrize("vx", [0.0, 0.4, VX, 6.0])
def test_phase_and_shift_against_quadrature(backend, t, vx):
    assert phase_shift(P, t, vx=vx) == pytest.approx(oracles.phase(t, vx), rel=1e-12)
    ref = oracles.shift(t, vx)
    assert spatial_shift(P, t, vx=vx) == pytest.approx(ref, rel=1e-11, abs=1e-18)


def test_phase_at_rest():
    assert phase_shift_asymptotic(P, 0.0) == pytest.approx(-3.459e6, rel=1e-3)


def test_group_velocity_spot_value():
    assert group_velocity(P, 0.5e-3, vx=VX) == pytest.approx(oracles.group_velocity(0.5e-3, VX), rel=1e-13)
    assert group_velocity(P, 0.5e-3, vx=VX) == pytest.approx(-0.279, rel=1e-2)


def test_negative_velocity_occurs_but_k_unchanged():
    t_min, v_min = min_group_velocity(P, vx=VX)
    assert v_min < 0 < t_min < 1.2e-3
    t_r = reversal_time(P, vx=VX)
    assert 0 < t_r < t_min
    assert group_velocity(P, t_r, vx=VX) == pytest.approx(0.0, abs=1e-9)


def test_no_reversal_at_weak_field():
    weak = replace(P, signal=PulseSignal(B=50e-4))
    assert reversal_time(weak, vx=VX) is None
    assert min_group_velocity(weak, vx=VX)[1] > 0


def test_series_match_pointwise(backend):
    t = np.linspace(0, 1.5e-3, 16)
    ph = phase_series(P, t, vx=VX)
    sh = spatial_shift_series(P, t, vx=VX)
    xi = packet_center_series(P, t, vx=VX)
    for i, ti in enumerate(t):
        assert ph[i] == pytest.approx(phase_shift(P, ti, vx=VX), rel=1e-12, abs=1e-9)
        assert sh[i] == pytest.approx(spatial_shift(P, ti, vx=VX), rel=1e-12, abs=1e-18)
        assert xi[i] == pytest.approx(packet_center(P, ti, vx=VX), rel=1e-12, abs=1e-18)


@pytest.mark.parametrize("vx", [0.3, VX, 5.0])
def test_phase_frozen_after_pulse(vx):
    inf = phase_shift_asymptotic(P, vx=vx)
    for t in (1.2e-3, 1.7e-3, 10.0):
        assert phase_shift(P, t, vx=vx) == pytest.approx(inf, rel=1e-12)


@pytest.mark.parametrize("t", [0.4e-3, math.inf])
def test_shift_is_minus_phase_derivative(t):
    k = P.k_from_velocity(VX)
    h = 1e-5 * k
    fd = -(phase_shift(P, t, k + h) - phase_shift(P, t, k - h)) / (2 * h)
    assert fd == pytest.approx(spatial_shift(P, t, k), rel=1e-8)


def test_center_derivative_second_order():
    t = 0.5e-3
    v = group_velocity(P, t, vx=VX)
    errs = []
    for h in (2e-5, 1e-5, 5e-6):
        fd = (packet_center(P, t + h, vx=VX) - packet_center(P, t - h, vx=VX)) / (2 * h)
        errs.append(abs(fd - v))
    for a, b in zip(errs, errs[1:]):
        assert a / b == pytest.approx(4.0, rel=0.05)


@pytest.mark.parametrize("vx", [0.5, VX, 4.0])
def test_limit_shift_magnitude_matches_spectral_form(vx):
    a = spatial_shift_asymptotic(P, vx=vx)
    b = spectral_shift(P, vx=vx)
    assert abs(abs(a) - abs(b)) <= 1e-10
    assert a == pytest.approx(b, rel=1e-9)  # same sign under this Fourier convention


def test_after_pulse_velocity_is_free():
    t = np.linspace(1.21e-3, 3e-3, 20)
    assert np.all(group_velocity(P, t, vx=VX) == pytest.approx(VX, rel=1e-15))


@settings(max_examples=30, deadline=None)
@given(B=st.floats(1e-3, 0.08), vx=st.floats(0.05, 5))
def test_shift_linear_in_field(B, vx):
    a = replace(P, signal=PulseSignal(B=B))
    b = replace(P, signal=PulseSignal(B=2 * B))
    sa, sb = spatial_shift(a, math.inf, vx=vx), spatial_shift(b, math.inf, vx=vx)
    assert sb == pytest.approx(2 * sa, rel=1e-12, abs=1e-20)


@settings(max_examples=30, deadline=None)
@given(vx=st.floats(0.05, 5), t=st.floats(0, 1.2e-3))
def test_opposite_m_mirrors_shift(vx, t):
    neg = replace(P, signal=PulseSignal(state=argon_state(-2)))
    assert spatial_shift(neg, t, vx=vx) == pytest.approx(-spatial_shift(P, t, vx=vx), rel=1e-13, abs=1e-20)


def test_phase_offset_rotates_quadratures():
    k = P.k_from_velocity(VX)
    q = replace(P, phase_offset=math.pi)
    assert phase_shift(q, 0.8e-3, k) == pytest.approx(-phase_shift(P, 0.8e-3, k), rel=1e-12)
    assert group_velocity(q, 0.5e-3, k) - VX == pytest.approx(-(group_velocity(P, 0.5e-3, k) - VX), rel=1e-12)


def test_lead_equivalent_to_later_entrance():
    lead = 0.2e-3
    led = replace(P, lead=lead)
    vx = 1.1
    # entrance-referenced carrier: phase with lead equals phase of the advanced signal
    t = 0.6e-3
    grid = np.linspace(0, t, 20001)
    nu = resonance_frequency(P, vx=vx)
    integrand = eval_s(P.signal, grid + lead) * np.cos(2 * math.pi * nu * grid)
    ref = -trapezoid(integrand, grid) / P.hbar
    assert phase_shift(led, t, vx=vx) == pytest.approx(ref, rel=1e-6)
    assert led.support_end == pytest.approx(1.2e-3 - lead)


def test_per_pulse_train_terms_add_coherently():
    pp = replace(P, signal=PulseSignal(train=PulseTrain.parse("1@0,1@1")), phase_reference="per_pulse")
    assert phase_shift_asymptotic(pp, vx=VX) == pytest.approx(2 * phase_shift_asymptotic(P, vx=VX), rel=1e-12)
    assert spatial_shift_asymptotic(pp, vx=VX) != 0.0


def test_plain_check_raises_on_mismatch(monkeypatch):
    import comoving.semiclassical as sc
    monkeypatch.setattr(sc, "spectral_shift", lambda *a, **k: 1.0)
    with pytest.raises(NumericalFailure):
        sc.spatial_shift_asymptotic(P, vx=VX)


def test_negative_time_rejected():
    with pytest.raises(ValueError):
        phase_shift(P, -1e-3, vx=VX)


def test_effective_index():
    assert effective_index(0.0, 1.0) == 1.0
    assert effective_index(0.75, 1.0) == pytest.approx(0.5)
    assert effective_index(-3.0, 1.0) == pytest.approx(2.0)
    ev = effective_index(2.0, 1.0)
    assert isinstance(ev, Evanescent) and ev.imag == pytest.approx(1.0)
    assert local_wave_number(4.0, 0.75, 1.0) == pytest.approx(2.0)
    assert local_wave_number(4.0, 5.0, 1.0).imag == pytest.approx(8.0)
    with pytest.raises(ValueError):
        effective_index(0.0, 0.0)
