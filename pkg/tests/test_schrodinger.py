import math

import numpy as np
import pytest

from comoving.errors import ConfigError, NumericalFailure
from comoving.pulse import PulseTrain
from comoving.schrodinger import (EvolutionConfig, GridSpec, current_density, evolve,
                                  gamma_phase, init_gaussian, scaled_params, v_from_current)
from comoving.semiclassical import phase_shift, phase_shift_asymptotic

FREE = scaled_params(0.0, 1.0, 1.0, 1.0)


def test_grid_validation():
    with pytest.raises(ConfigError):
        GridSpec.centered(100.0, 1000)
    with pytest.raises(ConfigError):
        GridSpec.centered(100.0, 128)
    with pytest.raises(ConfigError):
        GridSpec(1.0, 1.0, 256)
    g = GridSpec.centered(64.0, 256)
    assert g.dx == 0.25 and g.x[0] == -32.0 and g.k.size == 256


def test_packet_validation():
    g = GridSpec.centered(64.0, 256)
    with pytest.raises(ConfigError):
        init_gaussian(g, 0.0, 0.5, 1.0)  # sigma < 4 dx
    with pytest.raises(ConfigError):
        init_gaussian(g, 25.0, 2.0, 1.0)  # too close to the edge


def test_initial_moments():
    g = GridSpec.centered(256.0, 2048)
    p = init_gaussian(g, 3.0, 6.0, 1.5)
    assert p.norm() == pytest.approx(1.0, abs=1e-13)
    assert p.mean_x() == pytest.approx(3.0, abs=1e-12)
    assert p.var_x() == pytest.approx(36.0, rel=1e-12)
    assert p.mean_k() == pytest.approx(1.5, abs=1e-12)
    assert p.var_k() == pytest.approx(1 / (4 * 36.0), rel=1e-10)


def test_free_gaussian_matches_analytic():
    g = GridSpec.centered(400.0, 4096)
    sigma, k0 = 5.0, 2.0
    p = init_gaussian(g, -60.0, sigma, k0)
    res = evolve(p, FREE, EvolutionConfig(dt=0.01, t_end=40.0, record_every=100))
    t = res.t
    assert np.max(np.abs(res.norm - 1)) <= 1e-10
    assert np.allclose(res.mean_x, -60.0 + k0 * t, rtol=1e-8, atol=1e-8)
    var = sigma ** 2 * (1 + (t / (2 * sigma ** 2)) ** 2)
    assert np.allclose(res.var_x, var, rtol=1e-8)
    assert np.allclose(res.vg_current, k0, rtol=1e-8)
    assert np.allclose(res.mean_v, k0, rtol=1e-10)


def test_plane_wave_current():
    g = GridSpec.centered(2 * math.pi * 8, 256)
    k = g.k[3]
    psi = np.exp(1j * k * g.x)
    J = current_density(psi, g, hbar=2.0, mass=4.0)
    assert np.allclose(J, 2.0 / 4.0 * k, rtol=1e-12)


def test_config_check_rejects_coarse_step():
    params = scaled_params(600.0, 1.85, 0.0925, 0.3)
    with pytest.raises(ConfigError):
        EvolutionConfig(dt=1e-3, t_end=0.1).check(params)
    with pytest.raises(ConfigError):
        EvolutionConfig(dt=0.0, t_end=0.1).check(params)
    EvolutionConfig(dt=1e-4, t_end=0.1).check(params)


def test_norm_drift_detected():
    g = GridSpec.centered(256.0, 1024)
    p = init_gaussian(g, 0.0, 10.0, 1.0)
    p.amplitudes = p.amplitudes * 1.001
    with pytest.raises(NumericalFailure):
        evolve(p, FREE, EvolutionConfig(dt=0.01, t_end=0.1))


def test_density_underflow():
    g = GridSpec.centered(256.0, 1024)
    p = init_gaussian(g, 0.0, 10.0, 1.0)
    psi = p.amplitudes.copy()
    p.amplitudes = np.where(np.abs(g.x) < 20, 0.0, psi)  # hollow packet
    with pytest.raises(NumericalFailure):
        v_from_current(p)


def _narrow(A, k0=50.0):
    # short pulse compared to the transit of one period; narrow packet
    tau1 = 0.48 * 2 * math.pi / k0
    params = scaled_params(A, 7.4 / 1.2 * tau1, 0.37 / 1.2 * tau1, tau1)
    grid = GridSpec.centered(20 * math.pi, 4096)
    packet = init_gaussian(grid, 0.0, 0.1, k0)
    dt = min(0.1 / A, params.signal.shape.tau / 200)
    conf = EvolutionConfig(dt=dt, t_end=tau1 * 1.05, record_every=50, track_k=(k0,))
    return params, packet, conf


def test_gamma_phase_matches_semiclassical_phase():
    params, packet, conf = _narrow(50.0)
    res = evolve(packet, params, conf)
    t, ph, kk = gamma_phase(res, 50.0)
    assert kk == pytest.approx(50.0, abs=1e-9)
    expect = phase_shift_asymptotic(params, kk)
    assert ph[-1] == pytest.approx(expect, rel=0.01)
    mid = np.searchsorted(t, params.signal.shape.tau1 / 2)
    assert ph[mid] == pytest.approx(phase_shift(params, t[mid], kk), rel=0.02)


def test_gamma_phase_underflow():
    params, packet, conf = _narrow(20.0)
    conf = EvolutionConfig(conf.dt, conf.dt * 10, track_k=(400.0,))
    res = evolve(packet, params, conf)
    with pytest.raises(NumericalFailure):
        gamma_phase(res, 400.0)


def test_train_in_scaled_units():
    p = scaled_params(1.0, 1.0, 0.1, 0.3, train=PulseTrain.parse("1@0,1@1000"))
    assert p.signal.support == pytest.approx((0.0, 1.3))
