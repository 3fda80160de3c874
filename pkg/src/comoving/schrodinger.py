"""Split-step spectral solver for a packet in ``V(t, x) = s(t) cos(kappa x)``.

Works in any consistent unit system; the validation scenarios use
``hbar = m = 1`` and ``Lambda = 2 pi``.
"""
import math
from dataclasses import dataclass

import numpy as np

from .constants import AtomSpecies, PhysicalConstants, ZeemanState
from .errors import ConfigError, NumericalFailure
from .pulse import PulseShape, PulseSignal, PulseTrain, eval_s
from .semiclassical import ComovingParams

DIMENSIONLESS = PhysicalConstants(hbar=1.0, bohr_magneton=1.0, atomic_mass_unit=1.0)
_UNIT_ATOM = AtomSpecies(name="scaled", mass=1.0, lande_g=1.0)


def scaled_params(A, eps, tau, tau1, train=None, lambda_period=2 * math.pi, **kw):
    """Comoving parameters in units ``hbar = m = 1`` with pulse amplitude ``A``."""
    signal = PulseSignal(state=ZeemanState(_UNIT_ATOM, 1), B=A,
                         shape=PulseShape(eps, tau, tau1),
                         train=train or PulseTrain(), constants=DIMENSIONLESS)
    return ComovingParams(lambda_period=lambda_period, signal=signal, mass=1.0, **kw)


# Pulse timing scaled so that nu0 * tau1 matches the argon case at theta = 0.1.
SCALED_DEFAULT = dict(n=8192, length=512.0, x0=0.0, sigma=20.0, k0=10.0,
                      A=600.0, eps=1.85, tau=0.0925, tau1=0.3, dt=1e-4, t_end=0.45)


@dataclass(frozen=True)
class GridSpec:
    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        n = self.n_points
        if n < 256 or n & (n - 1):
            raise ConfigError("grid size must be a power of two >= 256")
        if not self.x_max > self.x_min:
            raise ConfigError("empty grid domain")

    @classmethod
    def centered(cls, length, n_points):
        return cls(-length / 2, length / 2, n_points)

    @property
    def dx(self):
        return (self.x_max - self.x_min) / self.n_points

    @property
    def x(self):
        return self.x_min + self.dx * np.arange(self.n_points)

    @property
    def k(self):
        return 2 * np.pi * np.fft.fftfreq(self.n_points, self.dx)


@dataclass
class WavePacket:
    grid: GridSpec
    amplitudes: np.ndarray
    sigma0: float
    x0: float
    k0: float

    def norm(self):
        return float(np.sum(np.abs(self.amplitudes) ** 2) * self.grid.dx)

    def mean_x(self):
        rho = np.abs(self.amplitudes) ** 2
        return float(np.sum(self.grid.x * rho) / np.sum(rho))

    def var_x(self):
        rho = np.abs(self.amplitudes) ** 2
        m = np.sum(self.grid.x * rho) / np.sum(rho)
        return float(np.sum((self.grid.x - m) ** 2 * rho) / np.sum(rho))

    def mean_k(self):
        p = np.abs(np.fft.fft(self.amplitudes)) ** 2
        return float(np.sum(self.grid.k * p) / np.sum(p))

    def var_k(self):
        p = np.abs(np.fft.fft(self.amplitudes)) ** 2
        k = self.grid.k
        m = np.sum(k * p) / np.sum(p)
        return float(np.sum((k - m) ** 2 * p) / np.sum(p))


def init_gaussian(grid, x0, sigma0, k0):
    if sigma0 < 4 * grid.dx:
        raise ConfigError(f"packet width {sigma0:g} under-resolved (dx = {grid.dx:g})")
    if x0 - 5 * sigma0 < grid.x_min or x0 + 5 * sigma0 > grid.x_max:
        raise ConfigError("packet does not fit inside the domain with a 5-sigma margin")
    x = grid.x
    psi = np.exp(-((x - x0) ** 2) / (4 * sigma0 ** 2) + 1j * k0 * x)
    psi /= math.sqrt(np.sum(np.abs(psi) ** 2) * grid.dx)
    return WavePacket(grid, psi, sigma0, x0, k0)


@dataclass(frozen=True)
class EvolutionConfig:
    dt: float
    t_end: float
    record_every: int = 1
    norm_tol: float = 1e-9
    track_k: tuple = ()

    def check(self, params, hbar=1.0):
        """Raise :class:`ConfigError` if the step does not resolve the pulse."""
        if not (self.dt > 0 and self.t_end > 0 and self.record_every >= 1):
            raise ConfigError("dt, t_end and record_every must be positive")
        sig = params.signal
        if not sig.is_zero:
            t = np.linspace(*sig.support, 2001)
            smax = float(np.max(np.abs(eval_s(sig, t))))
            if smax * self.dt / hbar > 0.1:
                raise ConfigError(f"dt too large for pulse amplitude (max|s| dt/hbar = "
                                  f"{smax * self.dt / hbar:.3g} > 0.1)")
            if self.dt > sig.shape.tau / 100:
                raise ConfigError("dt must resolve the pulse envelope (dt <= tau/100)")


@dataclass
class EvolutionResult:
    t: np.ndarray
    norm: np.ndarray
    mean_x: np.ndarray
    var_x: np.ndarray
    mean_v: np.ndarray
    vg_current: np.ndarray
    final: WavePacket
    track_t: np.ndarray = None
    track_k: np.ndarray = None  # grid wave numbers actually tracked
    track_c: np.ndarray = None  # C(t, k), shape (len(track_t), len(track_k))
    hbar: float = 1.0
    mass: float = 1.0

    def columns(self):
        return np.column_stack([self.t, self.norm, self.mean_x, self.var_x,
                                self.mean_v, self.vg_current])


def current_density(psi, grid, hbar=1.0, mass=1.0):
    """``J = (hbar/m) Im(psi* d_x psi)`` with a spectral derivative."""
    dpsi = np.fft.ifft(1j * grid.k * np.fft.fft(psi))
    return hbar / mass * np.imag(np.conj(psi) * dpsi)


def v_from_current(packet, hbar=1.0, mass=1.0):
    """Local velocity ``J / |psi|^2`` at the packet center.

    Both ``J`` and ``|psi|^2`` are averaged with a Gaussian window of width
    ``sigma/2`` centered on ``<x>``; a smooth window keeps the average free of
    grid-alignment bias.
    """
    psi = packet.amplitudes
    grid = packet.grid
    rho = np.abs(psi) ** 2
    xc = packet.mean_x()
    sig = math.sqrt(packet.var_x())
    ic = int(np.argmin(np.abs(grid.x - xc)))
    if rho[ic] < 1e-12 * rho.max() or rho.max() == 0.0:
        raise NumericalFailure("density underflow at packet center")
    w = np.exp(-0.5 * ((grid.x - xc) / (sig / 2)) ** 2)
    J = current_density(psi, grid, hbar, mass)
    return float(np.sum(J * w) / np.sum(rho * w))


def evolve(packet, params, config, hbar=None, mass=None):
    """Strang-split propagation of ``packet`` through ``params.signal``.

    Half kinetic step in k-space, full potential phase with the signal taken
    at the step midpoint, half kinetic step.  Observables are recorded at
    ``t = 0`` and every ``record_every`` steps.
    """
    hbar = params.hbar if hbar is None else hbar
    mass = params.mass if mass is None else mass
    config.check(params, hbar)
    grid = packet.grid
    x, k = grid.x, grid.k
    dt = config.dt
    nsteps = int(round(config.t_end / dt))
    half = np.exp(-1j * hbar * k ** 2 * dt / (4 * mass))
    spatial = np.cos(params.kappa * x + params.phase_offset)
    sig = params.signal
    zero_field = sig.is_zero

    track_idx = np.array([int(np.argmin(np.abs(k - kk))) for kk in config.track_k], dtype=int)
    track_c = np.empty((nsteps + 1, track_idx.size), dtype=complex)

    records = []
    psi = packet.amplitudes.astype(complex)
    psi_k = np.fft.fft(psi)
    track_c[0] = psi_k[track_idx]

    def record(t, psi):
        pk = WavePacket(grid, psi, packet.sigma0, packet.x0, packet.k0)
        n = pk.norm()
        if abs(n - 1.0) > config.norm_tol:
            raise NumericalFailure(f"norm drift {n - 1.0:.3e} at t = {t:.6g}")
        records.append((t, n, pk.mean_x(), pk.var_x(), hbar * pk.mean_k() / mass,
                        v_from_current(pk, hbar, mass)))

    record(0.0, psi)
    for step in range(1, nsteps + 1):
        psi_k *= half
        psi = np.fft.ifft(psi_k)
        if not zero_field:
            s_mid = eval_s(sig, (step - 0.5) * dt + params.lead)
            if s_mid != 0.0:
                psi *= np.exp(-1j * (s_mid * dt / hbar) * spatial)
        psi_k = np.fft.fft(psi)
        psi_k *= half
        track_c[step] = psi_k[track_idx]
        if step % config.record_every == 0 or step == nsteps:
            psi = np.fft.ifft(psi_k)
            record(step * dt, psi)
    psi = np.fft.ifft(psi_k)
    arr = np.array(records)
    return EvolutionResult(
        t=arr[:, 0], norm=arr[:, 1], mean_x=arr[:, 2], var_x=arr[:, 3],
        mean_v=arr[:, 4], vg_current=arr[:, 5],
        final=WavePacket(grid, psi, packet.sigma0, packet.x0, packet.k0),
        track_t=dt * np.arange(nsteps + 1), track_k=k[track_idx], track_c=track_c,
        hbar=hbar, mass=mass)


def gamma_phase(result, k, floor=1e-8):
    """Unwrapped ``arg Gamma(t, k) / Gamma(0, k)`` with ``Gamma = C exp(i hbar k^2 t / 2m)``.

    ``k`` must be one of the wave numbers tracked during :func:`evolve`
    (nearest grid value is used).  Returns ``(times, phase, k_grid)``.
    """
    j = int(np.argmin(np.abs(result.track_k - k)))
    kk = result.track_k[j]
    c = result.track_c[:, j]
    scale = np.max(np.abs(np.fft.fft(result.final.amplitudes)))
    if abs(c[0]) < floor * scale:
        raise NumericalFailure(f"amplitude underflow at k = {kk:g}")
    t = result.track_t
    gamma = c * np.exp(1j * result.hbar * kk ** 2 * t / (2 * result.mass))
    raw = np.angle(gamma / gamma[0])
    phase = np.unwrap(raw)
    if np.any(np.abs(np.diff(phase)) >= math.pi):
        raise NumericalFailure("phase sampling too sparse to unwrap")
    return t, phase, kk
