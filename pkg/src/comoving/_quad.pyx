# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled pulse-moment quadrature; mirrors ``_quad_py`` exactly."""
from libc.math cimport exp, cos, sin, fabs, ceil, pow, M_PI

import numpy as np

cdef double[8] XGK = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
]
cdef double[8] WGK = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
]
cdef double[4] WG = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
]

cdef int MAX_DEPTH = 40

from ._quad_py import QuadratureError


cdef struct Params:
    double d
    double r
    double eps
    double tau
    int p
    double two_pi_nu
    double rtol
    double atol


cdef inline void _integrand(double t, Params* P, double* fc, double* fs,
                            double* fa) noexcept nogil:
    cdef double u = t - P.d
    cdef double fval = P.eps * P.eps / ((u + P.eps) * (u + P.eps)) * exp(-u / P.tau)
    cdef double dt = t - P.r
    if P.p == 1:
        fval *= dt
    elif P.p == 2:
        fval *= dt * dt
    elif P.p != 0:
        fval *= pow(dt, P.p)
    cdef double arg = P.two_pi_nu * dt
    fc[0] = fval * cos(arg)
    fs[0] = fval * sin(arg)
    fa[0] = fabs(fval)


cdef void _gk15(double a, double b, Params* P, double* out) noexcept nogil:
    cdef double c = 0.5 * (a + b)
    cdef double h = 0.5 * (b - a)
    cdef double kc, ks, ka, gc, gs, fc, fs, fa
    cdef double c1, s1, a1, c2, s2, a2, x, w, wg
    cdef int j
    _integrand(c, P, &fc, &fs, &fa)
    kc = WGK[7] * fc
    ks = WGK[7] * fs
    ka = WGK[7] * fa
    gc = WG[3] * fc
    gs = WG[3] * fs
    for j in range(7):
        x = h * XGK[j]
        _integrand(c - x, P, &c1, &s1, &a1)
        _integrand(c + x, P, &c2, &s2, &a2)
        w = WGK[j]
        kc += w * (c1 + c2)
        ks += w * (s1 + s2)
        ka += w * (a1 + a2)
        if j % 2 == 1:
            wg = WG[j // 2]
            gc += wg * (c1 + c2)
            gs += wg * (s1 + s2)
    out[0] = kc * h
    out[1] = ks * h
    out[2] = ka * h
    out[3] = max(fabs(kc - gc), fabs(ks - gs)) * h


cdef int _adapt(double a, double b, Params* P, int depth,
                double* rc, double* rs) noexcept nogil:
    cdef double[4] res
    cdef double m, c1, s1, c2, s2
    _gk15(a, b, P, res)
    if res[3] <= max(P.atol, P.rtol * res[2]) or res[3] <= 1e-15 * res[2]:
        rc[0] = res[0]
        rs[0] = res[1]
        return 0
    if depth >= MAX_DEPTH:
        return -1
    m = 0.5 * (a + b)
    if _adapt(a, m, P, depth + 1, &c1, &s1) != 0:
        return -1
    if _adapt(m, b, P, depth + 1, &c2, &s2) != 0:
        return -1
    rc[0] = c1 + c2
    rs[0] = s1 + s2
    return 0


cdef int _segment(double a, double b, Params* P, double nu,
                  double* rc, double* rs) noexcept nogil:
    cdef double hmax, step, x0, x1, c, s, sc = 0.0, ss = 0.0
    cdef long n, i
    rc[0] = 0.0
    rs[0] = 0.0
    if b <= a:
        return 0
    hmax = P.tau / 50.0
    if nu != 0.0:
        hmax = min(hmax, 1.0 / (20.0 * fabs(nu)))
    n = <long>ceil((b - a) / hmax - 1e-9)
    if n < 1:
        n = 1
    step = (b - a) / n
    for i in range(n):
        x0 = a + i * step
        x1 = b if i == n - 1 else a + (i + 1) * step
        if _adapt(x0, x1, P, 0, &c, &s) != 0:
            return -1
        sc += c
        ss += s
    rc[0] = sc
    rs[0] = ss
    return 0


def train_moments(weights, delays, refs, double eps, double tau, double tau1,
                  double nu, int power, double lo, double hi,
                  double rtol=1e-13, double atol=0.0):
    """Return ``(C, S)`` for the train over ``[lo, hi]``."""
    cdef double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef double[::1] dd = np.ascontiguousarray(delays, dtype=np.float64)
    cdef double[::1] rr = np.ascontiguousarray(refs, dtype=np.float64)
    cdef Params P
    cdef double tc = 0.0, ts = 0.0, c, s, a, b
    cdef Py_ssize_t i
    cdef int status = 0
    P.eps = eps
    P.tau = tau
    P.p = power
    P.two_pi_nu = 2.0 * M_PI * nu
    P.rtol = rtol
    P.atol = atol
    with nogil:
        for i in range(w.shape[0]):
            if w[i] == 0.0:
                continue
            P.d = dd[i]
            P.r = rr[i]
            a = max(lo, dd[i])
            b = min(hi, dd[i] + tau1)
            status = _segment(a, b, &P, nu, &c, &s)
            if status != 0:
                break
            tc += w[i] * c
            ts += w[i] * s
    if status != 0:
        raise QuadratureError("no convergence (nu=%.6e Hz)" % nu)
    return tc, ts


def train_moments_cumulative(weights, delays, refs, double eps, double tau,
                             double tau1, double nu, int power, double lo,
                             times, double rtol=1e-13, double atol=0.0):
    """Running ``(C, S)`` from ``lo`` up to each entry of sorted ``times``."""
    cdef double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef double[::1] dd = np.ascontiguousarray(delays, dtype=np.float64)
    cdef double[::1] rr = np.ascontiguousarray(refs, dtype=np.float64)
    cdef double[::1] tt = np.ascontiguousarray(times, dtype=np.float64)
    if np.any(np.diff(tt) < 0):
        raise ValueError("times must be sorted ascending")
    out_c_arr = np.zeros(tt.shape[0])
    out_s_arr = np.zeros(tt.shape[0])
    cdef double[::1] out_c = out_c_arr
    cdef double[::1] out_s = out_s_arr
    cdef Params P
    cdef double acc_c, acc_s, prev, upper, end, c, s
    cdef Py_ssize_t i, j
    cdef int status = 0
    P.eps = eps
    P.tau = tau
    P.p = power
    P.two_pi_nu = 2.0 * M_PI * nu
    P.rtol = rtol
    P.atol = atol
    with nogil:
        for i in range(w.shape[0]):
            if w[i] == 0.0:
                continue
            P.d = dd[i]
            P.r = rr[i]
            end = dd[i] + tau1
            prev = max(lo, dd[i])
            acc_c = 0.0
            acc_s = 0.0
            for j in range(tt.shape[0]):
                upper = min(tt[j], end)
                if upper > prev:
                    status = _segment(prev, upper, &P, nu, &c, &s)
                    if status != 0:
                        break
                    acc_c += c
                    acc_s += s
                    prev = upper
                out_c[j] += w[i] * acc_c
                out_s[j] += w[i] * acc_s
            if status != 0:
                break
    if status != 0:
        raise QuadratureError("no convergence (nu=%.6e Hz)" % nu)
    return out_c_arr, out_s_arr
