"""Inverse design of a sampled pulse realizing a target asymptotic phase.

The forward map is the full-support phase integral discretized with the
trapezoid rule on a uniform time grid::

    phi(k_i) = -(1/hbar) sum_j w_j cos(2 pi nu_i t_j) s_j,   nu_i = hbar k_i / (m Lambda)

Design solves this linear system in the (ridge-regularized) least-squares
sense; only ``Re H`` is constrained, the imaginary part is left free.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import lsq_linear

from .semiclassical import resonance_frequency


class IllPosedDesign(ValueError):
    pass


@dataclass(frozen=True)
class TargetPhase:
    k_grid: np.ndarray
    phi_target: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.k_grid, dtype=float)
        phi = np.asarray(self.phi_target, dtype=float)
        if k.shape != phi.shape or k.ndim != 1 or k.size == 0:
            raise ValueError("k grid and target phase must be matching 1-D arrays")
        if not (np.all(np.isfinite(k)) and np.all(np.isfinite(phi))):
            raise ValueError("target must be finite")
        if np.any(k < 0):
            raise ValueError("negative wave numbers are redundant; use k >= 0")
        object.__setattr__(self, "k_grid", k)
        object.__setattr__(self, "phi_target", phi)


@dataclass(frozen=True)
class DesignProblem:
    t_grid: np.ndarray
    ridge_lambda: float = 1e-10
    amplitude_bound: float | None = None

    def __post_init__(self):
        t = np.asarray(self.t_grid, dtype=float)
        if t.ndim != 1 or t.size < 2 or t[0] != 0.0 or not t[-1] > 0:
            raise ValueError("time grid must start at 0 and end at T > 0")
        if not np.allclose(np.diff(t), t[1] - t[0], rtol=1e-9, atol=0):
            raise ValueError("time grid must be uniform")
        if self.ridge_lambda < 0:
            raise ValueError("ridge parameter must be non-negative")
        object.__setattr__(self, "t_grid", t)

    @classmethod
    def for_band(cls, T, nu_max, **kw):
        """Uniform grid on ``[0, T]`` with ``dt <= 1 / (20 nu_max)``."""
        n = max(1, int(math.ceil(T * 20 * nu_max - 1e-9)))
        return cls(np.linspace(0.0, T, n + 1), **kw)

    def check_resolution(self, nu_max):
        dt = self.t_grid[1] - self.t_grid[0]
        if nu_max > 0 and dt > 1.0 / (10 * nu_max) * (1 + 1e-12):
            raise ValueError(f"time step {dt:g} s does not resolve {nu_max:g} Hz")


@dataclass
class DesignResult:
    t_grid: np.ndarray
    s_samples: np.ndarray
    residual_max: float
    residual_rms: float
    rank: int


def trapezoid_weights(t):
    dt = t[1] - t[0]
    w = np.full(t.size, dt)
    w[0] = w[-1] = dt / 2
    return w


def design_matrix(nu, t):
    """Dimensionless map from ``s_j / hbar`` to phase: ``-w_j cos(2 pi nu_i t_j)``."""
    return -np.cos(2 * np.pi * np.outer(nu, t)) * trapezoid_weights(t)


def _frequencies(params, target):
    return np.array([resonance_frequency(params, k) for k in target.k_grid])


def forward_phase(params, k_grid, t_grid, s_samples):
    """Asymptotic phase of a sampled pulse by trapezoid quadrature."""
    nu = np.array([resonance_frequency(params, k) for k in np.asarray(k_grid, dtype=float)])
    return design_matrix(nu, np.asarray(t_grid, dtype=float)) @ (np.asarray(s_samples) / params.hbar)


def design_lsq(target, problem, params):
    """Least-squares pulse for ``target``; ``params`` supplies hbar, m and Lambda."""
    nu = _frequencies(params, target)
    problem.check_resolution(float(nu.max()))
    t = problem.t_grid
    M = design_matrix(nu, t)
    phi = target.phi_target
    n = t.size
    rank = int(np.linalg.matrix_rank(M))
    lam = problem.ridge_lambda * np.linalg.norm(M, 2)
    if lam == 0 and rank < min(M.shape):
        raise IllPosedDesign(
            f"design matrix is rank deficient ({rank} < {min(M.shape)}); use ridge_lambda > 0")
    if lam > 0:
        A = np.vstack([M, lam * np.eye(n)])
        b = np.concatenate([phi, np.zeros(n)])
    else:
        A, b = M, phi
    if problem.amplitude_bound is not None:
        bound = problem.amplitude_bound / params.hbar
        y = lsq_linear(A, b, bounds=(-bound, bound), method="bvls", tol=1e-14).x
    else:
        y = np.linalg.lstsq(A, b, rcond=None)[0]
    s = params.hbar * y
    if problem.amplitude_bound is not None:
        s = np.clip(s, -problem.amplitude_bound, problem.amplitude_bound)
        y = s / params.hbar
    if not np.all(np.isreal(s)):
        raise ArithmeticError("synthesized signal is not real")
    resid = M @ y - phi
    return DesignResult(t, s, float(np.max(np.abs(resid))),
                        float(np.sqrt(np.mean(resid ** 2))), rank)


def verify_design(result, target, params):
    """Max deviation (rad) of the sampled pulse's phase from the target."""
    if not np.all(np.isreal(result.s_samples)):
        raise ArithmeticError("synthesized signal is not real")
    phi = forward_phase(params, target.k_grid, result.t_grid, result.s_samples)
    return float(np.max(np.abs(phi - target.phi_target)))
