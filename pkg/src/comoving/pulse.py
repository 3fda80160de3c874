"""Time-domain pulse signal and its frequency spectrum.

Fourier convention: ``H(nu) = int s(t) exp(-2 pi i nu t) dt``, so that
``Re H(nu) = int s(t) cos(2 pi nu t) dt``.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .constants import SI, GAUSS, PhysicalConstants, ZeemanState, argon_state, zeeman_amplitude
from .errors import ConfigError
from . import kernels


@dataclass(frozen=True)
class PulseShape:
    """Reduced pulse ``f(t) = eps^2 (t + eps)^-2 exp(-t/tau)`` on ``[0, tau1]``."""

    epsilon: float
    tau: float
    tau1: float

    def __post_init__(self):
        if not (self.epsilon > 0 and self.tau > 0 and self.tau1 > 0):
            raise ValueError("pulse parameters must be positive")


ARGON_SHAPE = PulseShape(epsilon=7.4e-3, tau=0.37e-3, tau1=1.2e-3)


@dataclass(frozen=True)
class PulseTrain:
    """Weighted, delayed copies of the base shape, delays sorted ascending."""

    terms: tuple = ((1.0, 0.0),)

    def __post_init__(self):
        terms = tuple((float(w), float(d)) for w, d in self.terms)
        if not terms:
            raise ValueError("pulse train needs at least one term")
        if any(d < 0 for _, d in terms):
            raise ValueError("pulse delays must be non-negative")
        object.__setattr__(self, "terms", tuple(sorted(terms, key=lambda x: x[1])))

    @property
    def weights(self):
        return np.array([w for w, _ in self.terms])

    @property
    def delays(self):
        return np.array([d for _, d in self.terms])

    @classmethod
    def parse(cls, text):
        """Parse ``"w@d_ms,w@d_ms,..."`` (delays in milliseconds)."""
        terms = []
        for item in text.split(","):
            item = item.strip()
            if not item:
                continue
            try:
                w, d = item.split("@")
                terms.append((float(w), float(d) * 1e-3))
            except ValueError:
                raise ConfigError(f"bad pulse train term {item!r}; expected w@d_ms") from None
        if not terms:
            raise ConfigError("empty pulse train")
        return cls(tuple(terms))

    def format(self):
        return ",".join(f"{w:g}@{d * 1e3:g}" for w, d in self.terms)


SINGLE = PulseTrain()


@dataclass(frozen=True)
class PulseSignal:
    """``s(t) = g mu_B M B * sum_i w_i f(t - d_i)`` in joules."""

    state: ZeemanState = field(default_factory=argon_state)
    B: float = 400 * GAUSS
    shape: PulseShape = ARGON_SHAPE
    train: PulseTrain = SINGLE
    constants: PhysicalConstants = SI

    @property
    def amplitude(self):
        return zeeman_amplitude(self.state, self.B, self.constants)

    @property
    def support(self):
        d = self.train.delays
        return float(d.min()), float(d.max() + self.shape.tau1)

    @property
    def is_zero(self):
        return self.amplitude == 0.0 or not np.any(self.train.weights)


def eval_f(shape, t):
    t = np.asarray(t, dtype=float)
    inside = (t >= 0.0) & (t <= shape.tau1)
    tc = np.where(inside, t, 0.0)
    val = shape.epsilon ** 2 / (tc + shape.epsilon) ** 2 * np.exp(-tc / shape.tau)
    out = np.where(inside, val, 0.0)
    return out if out.ndim else float(out)


def eval_s(signal, t):
    t = np.asarray(t, dtype=float)
    acc = np.zeros_like(t)
    for w, d in signal.train.terms:
        acc = acc + w * eval_f(signal.shape, t - d)
    out = signal.amplitude * acc
    return out if np.ndim(out) else float(out)


def moments(signal, nu, power=0, lo=-math.inf, hi=math.inf, *, lead=0.0,
            per_pulse=False, rtol=1e-13):
    """Cosine and sine moments ``int (t - r_i)^p s_i(t) {cos, sin}(2 pi nu (t - r_i)) dt``.

    ``lead`` advances the signal (the integrand sees ``s(t + lead)``);
    ``per_pulse`` references each term's trigonometric phase to its own
    onset instead of ``t = 0``.  Returns ``(C, S)`` in J s^(p+1).
    """
    if signal.is_zero:
        return 0.0, 0.0
    delays = signal.train.delays - lead
    refs = delays if per_pulse else np.zeros_like(delays)
    sh = signal.shape
    c, s = kernels.train_moments(signal.train.weights, delays, refs, sh.epsilon,
                                 sh.tau, sh.tau1, float(nu), int(power),
                                 float(lo), float(hi), rtol)
    a = signal.amplitude
    return a * c, a * s


def cumulative_moments(signal, nu, power, times, lo=0.0, *, lead=0.0,
                       per_pulse=False, rtol=1e-13):
    """Running :func:`moments` from ``lo`` to each of the sorted ``times``."""
    times = np.asarray(times, dtype=float)
    if signal.is_zero:
        return np.zeros_like(times), np.zeros_like(times)
    delays = signal.train.delays - lead
    refs = delays if per_pulse else np.zeros_like(delays)
    sh = signal.shape
    c, s = kernels.train_moments_cumulative(
        signal.train.weights, delays, refs, sh.epsilon, sh.tau, sh.tau1,
        float(nu), int(power), float(lo), times, rtol)
    a = signal.amplitude
    return a * c, a * s


@dataclass(frozen=True)
class Spectrum:
    nu: np.ndarray
    values: np.ndarray

    def hermitian_error(self):
        """``max |H(nu) - conj H(-nu)|`` over grid points whose mirror is present."""
        index = {float(v): i for i, v in enumerate(self.nu)}
        worst = 0.0
        for i, v in enumerate(self.nu):
            j = index.get(-float(v))
            if j is not None:
                worst = max(worst, abs(self.values[i] - np.conj(self.values[j])))
        return worst


def spectrum(signal, nu_grid, rtol=1e-13):
    """``H(nu)`` on ``nu_grid`` by adaptive quadrature over the signal support."""
    nu_grid = np.atleast_1d(np.asarray(nu_grid, dtype=float))
    if not np.all(np.isfinite(nu_grid)):
        raise ValueError("frequency grid must be finite")
    values = np.empty(nu_grid.shape, dtype=complex)
    for i, nu in enumerate(nu_grid):
        c, s = moments(signal, nu, 0, rtol=rtol)
        values[i] = complex(c, -s)
    return Spectrum(nu_grid, values)


def spectrum_derivative(signal, nu, rtol=1e-13):
    """``H'(nu) = int s(t) (-2 pi i t) exp(-2 pi i nu t) dt``."""
    c, s = moments(signal, nu, 1, rtol=rtol)
    return complex(-2.0 * math.pi * s, -2.0 * math.pi * c)
