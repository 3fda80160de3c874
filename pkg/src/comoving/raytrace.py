"""Rays of packet centers through the comoving-field region and lens metrics.

The entrance plane is ``z = 0``; a point source sits on axis at
``z = -source_distance``.  Inside the region the longitudinal motion is free
and each transverse coordinate follows the semiclassical packet center.
"""
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import bisect

from .constants import GAUSS
from .semiclassical import (ComovingParams, group_velocity, min_group_velocity,
                            spatial_shift_series)

MAX_DT = 10e-6
PARALLEL_TOL = 1e-9


class EmergenceIncompleteWarning(UserWarning):
    pass


class NoImageError(ValueError):
    pass


class ConsistencyError(RuntimeError):
    pass


class NoBracketError(ValueError):
    pass


class FocusError(ValueError):
    pass


@dataclass(frozen=True)
class Scene:
    source_distance: float = 0.02
    device: ComovingParams = field(default_factory=ComovingParams)
    dim: int = 1
    sync_mode: str = "per_ray"
    region_length: float = 0.03

    def __post_init__(self):
        if not self.source_distance > 0:
            raise ValueError("source distance must be positive")
        if self.dim not in (1, 2):
            raise ValueError("dim must be 1 or 2")
        if self.sync_mode not in ("per_ray", "global"):
            raise ValueError("sync_mode must be 'per_ray' or 'global'")
        if not self.region_length > 0:
            raise ValueError("region length must be positive")


@dataclass(frozen=True)
class Ray:
    theta: float
    azimuth: float = 0.0
    v0: float = 20.0

    def __post_init__(self):
        if not self.v0 > 0:
            raise ValueError("v0 must be positive")
        if not 0.0 <= self.theta < math.pi / 2:
            raise ValueError("theta must lie in [0, pi/2)")


@dataclass
class Trajectory:
    ray: Ray
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    vx: np.ndarray
    vy: np.ndarray
    vz: np.ndarray
    entrance_time: float
    pulse_trigger_time: float
    pulse_end_time: float

    def emergent(self):
        """Indices of samples taken after the pulse is over (straight flight)."""
        return np.nonzero(self.t >= self.pulse_end_time)[0]

    def rows(self):
        return np.column_stack([self.t, self.x, self.y, self.z, self.vx, self.vy, self.vz])


@dataclass
class LensScan:
    entries: list  # (theta, v0, delta_z)

    def curve(self, v0):
        pts = [(th, dz) for th, v, dz in self.entries if v == v0]
        return np.array([p[0] for p in pts]), np.array([p[1] for p in pts])


def ray_params(scene, ray):
    """Device parameters as seen by ``ray`` plus its entrance and trigger times."""
    vz = ray.v0 * math.cos(ray.theta)
    t_entrance = scene.source_distance / vz
    if scene.sync_mode == "per_ray":
        t_trigger = t_entrance
    else:
        t_trigger = scene.source_distance / ray.v0
    lead = t_entrance - t_trigger
    params = scene.device if lead == 0.0 else replace(scene.device, lead=scene.device.lead + lead)
    return params, t_entrance, t_trigger


def _transverse(params, tau, v_in):
    """Position offset and velocity after entrance for signed velocity ``v_in``.

    The field component acting on a negative velocity is the mirror image of
    the one acting on a positive velocity, so the shift is evaluated at
    ``|v_in|`` and sign-mirrored.
    """
    if v_in == 0.0:
        return np.zeros_like(tau), np.zeros_like(tau)
    sign = 1.0 if v_in > 0 else -1.0
    speed = abs(v_in)
    pos = speed * tau + spatial_shift_series(params, tau, vx=speed)
    vel = group_velocity(params, tau, vx=speed)
    return sign * pos, sign * np.asarray(vel, dtype=float)


def trace(scene, ray, dt=1e-6):
    if not 0 < dt <= MAX_DT:
        raise ValueError(f"dt must be in (0, {MAX_DT}] s")
    params, t_e, t_trig = ray_params(scene, ray)
    vz = ray.v0 * math.cos(ray.theta)
    vperp = ray.v0 * math.sin(ray.theta)
    vx0 = vperp * math.cos(ray.azimuth)
    vy0 = vperp * math.sin(ray.azimuth)
    t_exit = t_e + scene.region_length / vz
    pulse_end = t_e + params.support_end
    if pulse_end > t_exit:
        warnings.warn(
            f"region ({scene.region_length * 1e3:.3g} mm) shorter than the pulse extent "
            f"({vz * params.support_end * 1e3:.3g} mm); emergence incomplete",
            EmergenceIncompleteWarning, stacklevel=2)

    t = np.arange(0.0, t_exit, dt)
    t = t[np.abs(t - t_e) > 1e-6 * dt]
    t = np.union1d(t, [t_e, t_exit])

    x = vx0 * t
    y = vy0 * t
    z = -scene.source_distance + vz * t
    vx = np.full_like(t, vx0)
    vy = np.full_like(t, vy0)
    inside = t >= t_e
    tau = t[inside] - t_e
    x_e, y_e = vx0 * t_e, vy0 * t_e
    dx, vxi = _transverse(params, tau, vx0)
    x[inside] = x_e + dx
    if vx0 != 0.0:
        vx[inside] = vxi
    if scene.dim == 2:
        dy, vyi = _transverse(params, tau, vy0)
        y[inside] = y_e + dy
        if vy0 != 0.0:
            vy[inside] = vyi
    return Trajectory(ray, t, x, y, z, vx, vz=np.full_like(t, vz), vy=vy,
                      entrance_time=t_e, pulse_trigger_time=t_trig,
                      pulse_end_time=pulse_end)


def emergent_line(traj):
    """``(x_at_source_plane, slope dx/dz)`` of the straight emergent support."""
    idx = traj.emergent()
    if idx.size < 2:
        raise NoImageError("trajectory does not extend past the pulse")
    i, j = idx[0], idx[-1]
    slope = (traj.x[j] - traj.x[i]) / (traj.z[j] - traj.z[i])
    incident = traj.vx[0] / traj.vz[0]
    if abs(math.atan(slope) - math.atan(incident)) > PARALLEL_TOL:
        raise ConsistencyError(
            f"emergent slope {slope:.12e} differs from incident {incident:.12e}")
    z_source = traj.z[0]
    x_source = traj.x[j] - slope * (traj.z[j] - z_source)
    return x_source, slope


def image_distance(traj, scene):
    """``SS'``: distance from the source to where the emergent support meets the axis.

    Negative for a virtual image (support crossing behind the source).
    """
    if traj.ray.theta == 0.0:
        raise NoImageError("on-axis ray has no finite image")
    offset, slope = emergent_line(traj)
    if slope == 0.0 or abs(offset) <= 1e-12 * scene.source_distance * abs(slope):
        raise NoImageError("emergent support passes through the source; no image")
    return -offset / slope


def _map(fn, items, workers):
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def lens_scan(scene, thetas, v0s, dt=1e-6, workers=None):
    thetas, v0s = list(thetas), list(v0s)
    if not thetas or not v0s:
        raise ValueError("theta and v0 lists must be non-empty")
    combos = [(th, v0) for v0 in v0s for th in thetas]

    def one(item):
        th, v0 = item
        return image_distance(trace(scene, Ray(th, 0.0, v0), dt), scene)

    values = _map(one, combos, workers)
    return LensScan([(th, v0, dz) for (th, v0), dz in zip(combos, values)])


def chromatic_crossing(scan, v_low, v_high):
    """Incidence angle where the ``v_low`` and ``v_high`` image curves cross."""
    th, lo = scan.curve(v_low)
    th2, hi = scan.curve(v_high)
    if not np.array_equal(th, th2):
        raise ValueError("curves sampled on different angle grids")
    diff = hi - lo
    sign_change = np.nonzero(np.sign(diff[:-1]) * np.sign(diff[1:]) < 0)[0]
    if sign_change.size == 0:
        return None
    i = sign_change[0]
    return th[i] - diff[i] * (th[i + 1] - th[i]) / (diff[i + 1] - diff[i])


def _with_field(params, B):
    return replace(params, signal=replace(params.signal, B=B))


def min_transverse_velocity(scene, theta, B=None, v0=20.0):
    params, _, _ = ray_params(scene, Ray(theta, 0.0, v0))
    if B is not None:
        params = _with_field(params, B)
    return min_group_velocity(params, vx=v0 * math.sin(theta))[1]


def threshold_field(scene, theta, B_range=(1 * GAUSS, 1000 * GAUSS), v0=20.0, tol=1 * GAUSS):
    """Field (tesla) at which the minimum group velocity crosses zero."""
    if theta <= 0:
        raise ValueError("threshold needs a non-zero incidence angle")
    g = lambda B: min_transverse_velocity(scene, theta, B, v0)
    lo, hi = B_range
    if not (g(lo) > 0 > g(hi)):
        raise NoBracketError(
            f"min group velocity does not change sign on [{lo / GAUSS:g}, {hi / GAUSS:g}] G")
    return bisect(g, lo, hi, xtol=tol)


def cone_trace(scene, theta, azimuths, v0=20.0, dt=1e-6, workers=None):
    return _map(lambda az: trace(scene, Ray(theta, az, v0), dt), list(azimuths), workers)


@dataclass
class FocusResult:
    z_focus: float
    rms_spread: float
    thetas: np.ndarray
    offsets: np.ndarray
    slopes: np.ndarray

    def spread_at(self, z):
        """RMS transverse spread of the emergent supports at plane ``z``."""
        x = self.offsets[:, None] + self.slopes[:, None] * (np.atleast_1d(z) - self.z0)
        return np.std(x, axis=0)

    z0: float = 0.0


def refocus_metrics(scene, thetas, v0=20.0, dt=1e-6, workers=None):
    """Best-focus plane after the last pulse and the RMS spread of the rays there.

    The spread of straight supports ``x_i(z) = a_i + b_i z`` is quadratic in
    ``z``, so the minimizing plane is found in closed form.
    """
    thetas = np.asarray(list(thetas), dtype=float)
    trajs = _map(lambda th: trace(scene, Ray(th, 0.0, v0), dt), list(thetas), workers)
    z_source = -scene.source_distance
    lines = [emergent_line(tr) for tr in trajs]
    a = np.array([ln[0] for ln in lines])
    b = np.array([ln[1] for ln in lines])
    var_b = np.var(b)
    if thetas.size < 2 or var_b == 0.0:
        raise FocusError("degenerate ray set: focus undefined")
    cov = np.mean((a - a.mean()) * (b - b.mean()))
    z_best = z_source - cov / var_b
    z_after = max(tr.z[tr.emergent()[0]] for tr in trajs)
    if not z_best >= z_after:
        raise FocusError(
            f"no spread minimum after the last pulse (unconstrained minimum at z = {z_best:.4g} m)")
    spread = float(np.std(a + b * (z_best - z_source)))
    return FocusResult(float(z_best), spread, thetas, a, b, z0=z_source)
