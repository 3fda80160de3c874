"""Pure-Python quadrature kernel for pulse-weighted trigonometric moments.

Computes, for a train of pulses ``sum_i w_i f(t - d_i)``::

    C = sum_i w_i * int (t - r_i)**p f(t - d_i) cos(2 pi nu (t - r_i)) dt
    S = sum_i w_i * int (t - r_i)**p f(t - d_i) sin(2 pi nu (t - r_i)) dt

over ``[lo, hi]`` intersected with each pulse support ``[d_i, d_i + tau1]``,
where ``f(t) = eps**2 (t + eps)**-2 exp(-t / tau)``.

Each support is cut into panels no longer than ``min(tau / 50, 1 / (20 |nu|))``
and every panel is integrated with adaptive Gauss-Kronrod (7/15).  The
compiled twin in ``_quad.pyx`` implements the same algorithm.
"""
import math

import numpy as np

from .errors import NumericalFailure

_XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
)
_WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
_WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)

MAX_DEPTH = 40


class QuadratureError(NumericalFailure):
    """Adaptive refinement failed to reach the requested tolerance."""


def _integrand(t, d, r, eps, tau, p, two_pi_nu):
    u = t - d
    fval = eps * eps / ((u + eps) * (u + eps)) * math.exp(-u / tau)
    dt = t - r
    if p == 1:
        fval *= dt
    elif p == 2:
        fval *= dt * dt
    elif p:
        fval *= dt ** p
    arg = two_pi_nu * dt
    return fval * math.cos(arg), fval * math.sin(arg), abs(fval)


def _gk15(a, b, d, r, eps, tau, p, two_pi_nu):
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    kc, ks, ka = 0.0, 0.0, 0.0
    gc, gs = 0.0, 0.0
    fc, fs, fa = _integrand(c, d, r, eps, tau, p, two_pi_nu)
    kc += _WGK[7] * fc
    ks += _WGK[7] * fs
    ka += _WGK[7] * fa
    gc += _WG[3] * fc
    gs += _WG[3] * fs
    for j in range(7):
        x = h * _XGK[j]
        c1, s1, a1 = _integrand(c - x, d, r, eps, tau, p, two_pi_nu)
        c2, s2, a2 = _integrand(c + x, d, r, eps, tau, p, two_pi_nu)
        w = _WGK[j]
        kc += w * (c1 + c2)
        ks += w * (s1 + s2)
        ka += w * (a1 + a2)
        if j % 2 == 1:
            wg = _WG[j // 2]
            gc += wg * (c1 + c2)
            gs += wg * (s1 + s2)
    err = max(abs(kc - gc), abs(ks - gs)) * h
    return kc * h, ks * h, ka * h, err


def _adapt(a, b, d, r, eps, tau, p, two_pi_nu, rtol, atol, depth):
    kc, ks, ka, err = _gk15(a, b, d, r, eps, tau, p, two_pi_nu)
    if err <= max(atol, rtol * ka) or err <= 1e-15 * ka:
        return kc, ks
    if depth >= MAX_DEPTH:
        raise QuadratureError(
            "no convergence on [%.6e, %.6e] (err %.3e)" % (a, b, err))
    m = 0.5 * (a + b)
    c1, s1 = _adapt(a, m, d, r, eps, tau, p, two_pi_nu, rtol, atol, depth + 1)
    c2, s2 = _adapt(m, b, d, r, eps, tau, p, two_pi_nu, rtol, atol, depth + 1)
    return c1 + c2, s1 + s2


def _panel_width(tau, nu):
    hmax = tau / 50.0
    if nu != 0.0:
        hmax = min(hmax, 1.0 / (20.0 * abs(nu)))
    return hmax


def _segment(a, b, d, r, eps, tau, p, nu, rtol, atol):
    if b <= a:
        return 0.0, 0.0
    hmax = _panel_width(tau, nu)
    n = max(1, int(math.ceil((b - a) / hmax - 1e-9)))
    step = (b - a) / n
    two_pi_nu = 2.0 * math.pi * nu
    sc, ss = 0.0, 0.0
    for i in range(n):
        x0 = a + i * step
        x1 = b if i == n - 1 else a + (i + 1) * step
        c, s = _adapt(x0, x1, d, r, eps, tau, p, two_pi_nu, rtol, atol, 0)
        sc += c
        ss += s
    return sc, ss


def train_moments(weights, delays, refs, eps, tau, tau1, nu, power,
                  lo, hi, rtol=1e-13, atol=0.0):
    """Return ``(C, S)`` for the train over ``[lo, hi]``."""
    tc, ts = 0.0, 0.0
    for w, d, r in zip(weights, delays, refs):
        if w == 0.0:
            continue
        a = max(lo, d)
        b = min(hi, d + tau1)
        c, s = _segment(a, b, d, r, eps, tau, power, nu, rtol, atol)
        tc += w * c
        ts += w * s
    return tc, ts


def train_moments_cumulative(weights, delays, refs, eps, tau, tau1, nu,
                             power, lo, times, rtol=1e-13, atol=0.0):
    """Running ``(C, S)`` from ``lo`` up to each entry of sorted ``times``."""
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) < 0):
        raise ValueError("times must be sorted ascending")
    out_c = np.zeros(times.shape[0])
    out_s = np.zeros(times.shape[0])
    for w, d, r in zip(weights, delays, refs):
        if w == 0.0:
            continue
        start = max(lo, d)
        end = d + tau1
        acc_c, acc_s = 0.0, 0.0
        prev = start
        for j in range(times.shape[0]):
            t = times[j]
            upper = min(t, end)
            if upper > prev:
                c, s = _segment(prev, upper, d, r, eps, tau, power, nu,
                                rtol, atol)
                acc_c += c
                acc_s += s
                prev = upper
            out_c[j] += w * acc_c
            out_s[j] += w * acc_s
    return out_c, out_s
