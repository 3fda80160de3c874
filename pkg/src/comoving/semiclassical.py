"""Phase shift, spatial shift and group velocity of a packet in a comoving pulse.

A packet with central wave number ``k`` resonates with the spectral component
``nu = hbar k / (m Lambda)`` of the pulse.  Phase, shift and center follow
from the stationary-phase condition applied to the accumulated phase::

    phi(t, k)  = -(1/hbar) int_0^t s(t') cos(2 pi nu t') dt'
    dxi(t)     = -(2 pi / (m Lambda)) int_0^t t' s(t') sin(2 pi nu t') dt'
    v_g(t)     = hbar k / m - (2 pi / (m Lambda)) t s(t) sin(2 pi nu t)

All functions take the wave number either as ``k`` (1/m) or, by keyword, as
the transverse velocity ``vx`` (m/s).
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import NumericalFailure
from .pulse import (PulseSignal, cumulative_moments, eval_f, moments, spectrum,
                    spectrum_derivative)

PHASE_REFERENCES = ("entrance", "per_pulse")


@dataclass(frozen=True)
class ComovingParams:
    """Comoving device: spatial period, pulse signal and atomic mass.

    ``lead`` advances the pulse relative to the packet's entrance (used for a
    global trigger); ``phase_reference="per_pulse"`` synchronizes each train
    term with the packet separately; ``phase_offset`` (rad) shifts the
    entrance position within the spatial period.
    """

    lambda_period: float = 5e-3
    signal: PulseSignal = PulseSignal()
    mass: float | None = None
    phase_reference: str = "entrance"
    phase_offset: float = 0.0
    lead: float = 0.0

    def __post_init__(self):
        if not self.lambda_period > 0:
            raise ValueError("spatial period must be positive")
        if self.mass is None:
            object.__setattr__(self, "mass", self.signal.state.species.mass)
        if self.phase_reference not in PHASE_REFERENCES:
            raise ValueError(f"phase_reference must be one of {PHASE_REFERENCES}")

    @property
    def kappa(self):
        return 2.0 * math.pi / self.lambda_period

    @property
    def hbar(self):
        return self.signal.constants.hbar

    @property
    def per_pulse(self):
        return self.phase_reference == "per_pulse"

    @property
    def support_end(self):
        """Time after entrance at which the pulse seen by the packet is over."""
        return max(0.0, self.signal.support[1] - self.lead)

    def k_from_velocity(self, vx):
        return self.mass * vx / self.hbar

    def velocity_from_k(self, k):
        return self.hbar * k / self.mass


def _k(params, k, vx):
    if (k is None) == (vx is None):
        raise TypeError("give exactly one of k (1/m) or vx (m/s)")
    return params.k_from_velocity(vx) if k is None else k


def resonance_frequency(params, k=None, *, vx=None):
    k = _k(params, k, vx)
    return params.hbar * k / (params.mass * params.lambda_period)


def _rotate(c, s, alpha):
    """Moments of cos(a + alpha) and sin(a + alpha) from those of cos a, sin a."""
    if alpha == 0.0:
        return c, s
    ca, sa = math.cos(alpha), math.sin(alpha)
    return c * ca - s * sa, s * ca + c * sa


def _moments(params, nu, power, hi):
    return moments(params.signal, nu, power, lo=0.0, hi=hi, lead=params.lead,
                   per_pulse=params.per_pulse)


def phase_shift(params, t, k=None, *, vx=None):
    """Accumulated phase ``phi(t, k)`` in radians."""
    if t < 0:
        raise ValueError("t must be non-negative")
    nu = resonance_frequency(params, _k(params, k, vx))
    c, s = _rotate(*_moments(params, nu, 0, t), params.phase_offset)
    return -c / params.hbar


def phase_series(params, times, k=None, *, vx=None):
    times = np.asarray(times, dtype=float)
    nu = resonance_frequency(params, _k(params, k, vx))
    c, s = cumulative_moments(params.signal, nu, 0, times, lo=0.0,
                              lead=params.lead, per_pulse=params.per_pulse)
    c, s = _rotate(c, s, params.phase_offset)
    return -c / params.hbar


def _is_plain(params):
    return not params.per_pulse and params.lead == 0.0 and params.phase_offset == 0.0


def phase_shift_asymptotic(params, k=None, *, vx=None):
    """``phi_inf(k) = -Re H(nu) / hbar`` for a synchronized packet."""
    k = _k(params, k, vx)
    if not _is_plain(params):
        return phase_shift(params, math.inf, k)
    nu = resonance_frequency(params, k)
    return -spectrum(params.signal, [nu]).values[0].real / params.hbar


def spatial_shift(params, t, k0=None, *, vx=None):
    """Shift ``dxi(t) = -d phi / dk`` of the packet center, in meters."""
    if t < 0:
        raise ValueError("t must be non-negative")
    nu = resonance_frequency(params, _k(params, k0, vx))
    c, s = _rotate(*_moments(params, nu, 1, t), params.phase_offset)
    return -2.0 * math.pi / (params.mass * params.lambda_period) * s


def spatial_shift_series(params, times, k0=None, *, vx=None):
    times = np.asarray(times, dtype=float)
    nu = resonance_frequency(params, _k(params, k0, vx))
    c, s = cumulative_moments(params.signal, nu, 1, times, lo=0.0,
                              lead=params.lead, per_pulse=params.per_pulse)
    c, s = _rotate(c, s, params.phase_offset)
    return -2.0 * math.pi / (params.mass * params.lambda_period) * s


def spectral_shift(params, k0=None, *, vx=None):
    """``Re H'(nu0) / (m Lambda)``, the derivative-of-spectrum form of the limit shift.

    With the ``exp(-2 pi i nu t)`` convention this equals
    :func:`spatial_shift_asymptotic` in sign as well as magnitude; only the
    magnitudes are cross-checked there, the time-domain integral being the
    reference for the sign.
    """
    nu = resonance_frequency(params, _k(params, k0, vx))
    return spectrum_derivative(params.signal, nu).real / (params.mass * params.lambda_period)


def spatial_shift_asymptotic(params, k0=None, *, vx=None, check_tol=1e-10):
    """Limit of :func:`spatial_shift` once the pulse is over."""
    k0 = _k(params, k0, vx)
    value = spatial_shift(params, math.inf, k0)
    if _is_plain(params):
        other = spectral_shift(params, k0)
        if abs(abs(value) - abs(other)) > check_tol + 1e-9 * abs(value):
            raise NumericalFailure(
                f"shift mismatch: time domain {value:.6e} m, spectral {other:.6e} m")
    return value


def packet_center(params, t, k0=None, x0=0.0, *, vx=None):
    k0 = _k(params, k0, vx)
    return x0 + params.velocity_from_k(k0) * t + spatial_shift(params, t, k0)


def packet_center_series(params, times, k0=None, x0=0.0, *, vx=None):
    k0 = _k(params, k0, vx)
    times = np.asarray(times, dtype=float)
    return x0 + params.velocity_from_k(k0) * times + spatial_shift_series(params, times, k0)


def group_velocity(params, t, k0=None, *, vx=None):
    """Closed-form group velocity along the comoving axis (m/s); vectorized in ``t``."""
    k0 = _k(params, k0, vx)
    t = np.asarray(t, dtype=float)
    sig = params.signal
    v = params.velocity_from_k(k0)
    nu = resonance_frequency(params, k0)
    extra = np.zeros_like(t)
    if not sig.is_zero:
        active = t >= 0.0
        for w, d in sig.train.terms:
            d = d - params.lead
            r = d if params.per_pulse else 0.0
            f = eval_f(sig.shape, t - d) * active
            extra = extra + w * (t - r) * f * np.sin(
                2.0 * math.pi * nu * (t - r) + params.phase_offset)
        extra = extra * sig.amplitude * 2.0 * math.pi / (params.mass * params.lambda_period)
    out = v - extra
    return out if out.ndim else float(out)


def min_group_velocity(params, k0=None, *, vx=None, samples=2001):
    """``(t_min, v_min)``: dense scan over the pulse then bounded refinement."""
    k0 = _k(params, k0, vx)
    end = params.support_end
    if end <= 0.0:
        return 0.0, params.velocity_from_k(k0)
    t = np.linspace(0.0, end, samples)
    v = group_velocity(params, t, k0)
    i = int(np.argmin(v))
    lo, hi = t[max(i - 1, 0)], t[min(i + 1, samples - 1)]
    res = minimize_scalar(lambda x: group_velocity(params, x, k0), bounds=(lo, hi),
                          method="bounded", options={"xatol": 1e-12 * max(end, 1.0)})
    if res.fun < v[i]:
        return float(res.x), float(res.fun)
    return float(t[i]), float(v[i])


def reversal_time(params, k0=None, *, vx=None, samples=20001):
    """First instant the group velocity turns negative, or ``None``."""
    k0 = _k(params, k0, vx)
    end = params.support_end
    t = np.linspace(0.0, end, samples)
    v = group_velocity(params, t, k0)
    neg = np.nonzero(v < 0)[0]
    if neg.size == 0:
        return None
    j = neg[0]
    if j == 0:
        return 0.0
    return brentq(lambda x: group_velocity(params, x, k0), t[j - 1], t[j], xtol=1e-15)


@dataclass(frozen=True)
class Evanescent:
    """Classically forbidden point: ``n = i * imag``."""

    imag: float


def effective_index(V, E0):
    """Static-potential index ``sqrt(1 - V/E0)``; :class:`Evanescent` where ``V > E0``."""
    if not E0 > 0:
        raise ValueError("kinetic energy E0 must be positive")
    ratio = V / E0
    if ratio <= 1.0:
        return math.sqrt(1.0 - ratio)
    return Evanescent(math.sqrt(ratio - 1.0))


def local_wave_number(k, V, E0):
    n = effective_index(V, E0)
    if isinstance(n, Evanescent):
        return Evanescent(k * n.imag)
    return k * n
