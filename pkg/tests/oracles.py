"""Independent reference implementations built directly on scipy.

Nothing here imports the package under test.
"""
import math

import numpy as np
from scipy import constants as sc
from scipy.integrate import quad

HBAR = sc.hbar
MU_B = sc.physical_constants["Bohr magneton"][0]
AMU = sc.physical_constants["atomic mass constant"][0]

MASS = 39.948 * AMU
G_LANDE = 1.5
M_Q = 2
B_FIELD = 400e-4
LAMBDA = 5e-3
EPS, TAU, TAU1 = 7.4e-3, 0.37e-3, 1.2e-3
AMPLITUDE = G_LANDE * MU_B * M_Q * B_FIELD


def f(t):
    if t < 0 or t > TAU1:
        return 0.0
    return EPS ** 2 / (t + EPS) ** 2 * math.exp(-t / TAU)


def s(t):
    return AMPLITUDE * f(t)


def nu_of(vx):
    return vx / LAMBDA  # hbar k / (m Lambda) with k = m vx / hbar


def _quad(fun, a, b):
    # integrate piecewise to keep quad away from the support endpoint
    b = min(b, TAU1)
    if b <= a:
        return 0.0
    edges = np.linspace(a, b, 65)
    return sum(quad(fun, lo, hi, epsabs=0, epsrel=2e-14, limit=200)[0]
               for lo, hi in zip(edges[:-1], edges[1:]))


def phase(t, vx):
    nu = nu_of(vx)
    return -_quad(lambda u: s(u) * math.cos(2 * math.pi * nu * u), 0.0, t) / HBAR


def shift(t, vx):
    nu = nu_of(vx)
    return -2 * math.pi / (MASS * LAMBDA) * _quad(
        lambda u: u * s(u) * math.sin(2 * math.pi * nu * u), 0.0, t)


def group_velocity(t, vx):
    nu = nu_of(vx)
    return vx - 2 * math.pi / (MASS * LAMBDA) * t * s(t) * math.sin(2 * math.pi * nu * t)


def spectrum(nu):
    re = _quad(lambda u: s(u) * math.cos(2 * math.pi * nu * u), 0.0, TAU1)
    im = -_quad(lambda u: s(u) * math.sin(2 * math.pi * nu * u), 0.0, TAU1)
    return complex(re, im)
