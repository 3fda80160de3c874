"""Plain-text run configuration: ``section.key = value`` lines, ``#`` comments.

Key names carry their unit suffix.  Unknown keys are rejected; every parse
error names the offending line.
"""
import math
from dataclasses import dataclass

from .constants import GAUSS, argon_state
from .errors import ConfigError
from .pulse import PulseShape, PulseSignal, PulseTrain
from .semiclassical import PHASE_REFERENCES, ComovingParams

_FLOAT, _INT, _STR = float, int, str

# key -> (type, default, allowed values or None)
SCHEMA = {
    "atom.mass_u": (_FLOAT, 39.948, None),
    "atom.lande_g": (_FLOAT, 1.5, None),
    "atom.M": (_INT, 2, None),
    "field.B_gauss": (_FLOAT, 400.0, None),
    "pulse.epsilon_ms": (_FLOAT, 7.4, None),
    "pulse.tau_ms": (_FLOAT, 0.37, None),
    "pulse.tau1_ms": (_FLOAT, 1.2, None),
    "pulse.train": (_STR, "1@0", None),
    "device.lambda_mm": (_FLOAT, 5.0, None),
    "device.phase_reference": (_STR, "entrance", PHASE_REFERENCES),
    "device.phase_offset_rad": (_FLOAT, 0.0, None),
    "source.distance_cm": (_FLOAT, 2.0, None),
    "beam.v0_mps": (_FLOAT, 20.0, None),
    "beam.theta_rad": (_FLOAT, 0.1, None),
    "beam.azimuth_rad": (_FLOAT, 0.0, None),
    "scene.dim": (_INT, 1, (1, 2)),
    "scene.sync": (_STR, "per_ray", ("per_ray", "global")),
    "scene.length_mm": (_FLOAT, 30.0, None),
    "trace.dt_us": (_FLOAT, 1.0, None),
    "series.t_max_ms": (_FLOAT, 2.0, None),
    "series.dt_us": (_FLOAT, 1.0, None),
    "scan.theta_min_rad": (_FLOAT, 0.005, None),
    "scan.theta_max_rad": (_FLOAT, 0.12, None),
    "scan.theta_step_rad": (_FLOAT, 0.005, None),
    "scan.v0_list_mps": (_STR, "18,20,22", None),
    "threshold.B_min_gauss": (_FLOAT, 1.0, None),
    "threshold.B_max_gauss": (_FLOAT, 1000.0, None),
    "threshold.theta_list_rad": (_STR, "0.02,0.05,0.1", None),
    "spectrum.nu_max_hz": (_FLOAT, 2000.0, None),
    "spectrum.n_points": (_INT, 401, None),
    "grid.n": (_INT, 8192, None),
    "grid.length": (_FLOAT, 512.0, None),
    "packet.x0": (_FLOAT, 0.0, None),
    "packet.sigma": (_FLOAT, 20.0, None),
    "packet.k0": (_FLOAT, 10.0, None),
    "scaled.A": (_FLOAT, 600.0, None),
    "scaled.eps": (_FLOAT, 1.85, None),
    "scaled.tau": (_FLOAT, 0.0925, None),
    "scaled.tau1": (_FLOAT, 0.3, None),
    "run.dt": (_FLOAT, 1e-4, None),
    "run.t_end": (_FLOAT, 0.45, None),
    "run.record_every": (_INT, 10, None),
}


def _convert(key, raw, where):
    typ, _, allowed = SCHEMA[key]
    try:
        value = typ(raw)
    except ValueError:
        raise ConfigError(f"{where}: {key} expects {typ.__name__}, got {raw!r}") from None
    if typ is float and not math.isfinite(value):
        raise ConfigError(f"{where}: {key} must be finite")
    if allowed is not None and value not in allowed:
        raise ConfigError(f"{where}: {key} must be one of {allowed}, got {raw!r}")
    return value


class RunConfig:
    def __init__(self, values=None):
        self.values = {k: spec[1] for k, spec in SCHEMA.items()}
        for k, v in (values or {}).items():
            self.set(k, v)

    def __getitem__(self, key):
        return self.values[key]

    def set(self, key, raw, where="override"):
        if key not in SCHEMA:
            raise ConfigError(f"{where}: unknown key {key!r}")
        self.values[key] = _convert(key, raw, where)

    def override(self, assignment):
        if "=" not in assignment:
            raise ConfigError(f"--set expects section.key=value, got {assignment!r}")
        key, raw = assignment.split("=", 1)
        self.set(key.strip(), raw.strip(), where=f"--set {assignment}")

    @classmethod
    def parse(cls, text, source="<config>"):
        cfg = cls()
        errors = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            where = f"{source}:{lineno}"
            if "=" not in line:
                errors.append(f"{where}: expected 'section.key = value'")
                continue
            key, raw = (part.strip() for part in line.split("=", 1))
            try:
                cfg.set(key, raw, where)
            except ConfigError as exc:
                errors.append(str(exc))
        if errors:
            raise ConfigError("\n".join(errors))
        return cfg

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.parse(fh.read(), source=str(path))

    def dump(self):
        return "".join(f"{k} = {self.values[k]}\n" for k in sorted(self.values))

    # builders

    def train(self):
        return PulseTrain.parse(self["pulse.train"])

    def signal(self):
        state = argon_state(self["atom.M"], mass_u=self["atom.mass_u"], g=self["atom.lande_g"])
        shape = PulseShape(self["pulse.epsilon_ms"] * 1e-3, self["pulse.tau_ms"] * 1e-3,
                           self["pulse.tau1_ms"] * 1e-3)
        return PulseSignal(state=state, B=self["field.B_gauss"] * GAUSS, shape=shape,
                           train=self.train())

    def device(self):
        return ComovingParams(lambda_period=self["device.lambda_mm"] * 1e-3,
                              signal=self.signal(),
                              phase_reference=self["device.phase_reference"],
                              phase_offset=self["device.phase_offset_rad"])

    def scene(self):
        from .raytrace import Scene
        return Scene(source_distance=self["source.distance_cm"] * 1e-2, device=self.device(),
                     dim=self["scene.dim"], sync_mode=self["scene.sync"],
                     region_length=self["scene.length_mm"] * 1e-3)

    def thetas(self):
        lo, hi, step = (self["scan.theta_min_rad"], self["scan.theta_max_rad"],
                        self["scan.theta_step_rad"])
        if step <= 0 or hi < lo:
            raise ConfigError("scan angles: need step > 0 and max >= min")
        n = int(math.floor((hi - lo) / step + 1e-9))
        return [round(lo + i * step, 12) for i in range(n + 1)]

    def number_list(self, key):
        try:
            values = [float(v) for v in self[key].split(",") if v.strip()]
        except ValueError:
            raise ConfigError(f"{key} must be comma-separated numbers") from None
        if not values:
            raise ConfigError(f"{key} is empty")
        return values

    def v0_list(self):
        return self.number_list("scan.v0_list_mps")


@dataclass(frozen=True)
class Diagnostic:
    level: str  # "warning" or "fatal"
    message: str


def validate_config(cfg):
    """Cross-field checks; returns a list of :class:`Diagnostic`."""
    out = []
    fatal = lambda msg: out.append(Diagnostic("fatal", msg))
    warn = lambda msg: out.append(Diagnostic("warning", msg))

    n = cfg["grid.n"]
    if n < 256 or n & (n - 1):
        fatal(f"grid.n = {n} is not a power of two >= 256")
    if abs(cfg["atom.M"]) > 2:
        fatal("|atom.M| exceeds J = 2 of the 3P2 level")
    for key in ("pulse.epsilon_ms", "pulse.tau_ms", "pulse.tau1_ms", "device.lambda_mm",
                "source.distance_cm", "beam.v0_mps", "scene.length_mm", "atom.mass_u"):
        if not cfg[key] > 0:
            fatal(f"{key} must be positive")
    if cfg["field.B_gauss"] < 0:
        fatal("field.B_gauss must be non-negative")
    if not 0 < cfg["trace.dt_us"] <= 10:
        fatal("trace.dt_us must lie in (0, 10]")
    try:
        train = cfg.train()
    except (ConfigError, ValueError) as exc:
        fatal(str(exc))
        train = None

    if train is not None and not out:
        extent = (max(d for _, d in train.terms) + cfg["pulse.tau1_ms"] * 1e-3)
        theta = cfg["beam.theta_rad"]
        vz = cfg["beam.v0_mps"] * math.cos(theta)
        if vz * extent > cfg["scene.length_mm"] * 1e-3:
            warn(f"pulse outlasts region: transit {cfg['scene.length_mm']:g} mm < "
                 f"{vz * extent * 1e3:.3g} mm travelled during the pulse")

    length = cfg["grid.length"]
    if length <= 0:
        fatal("grid.length must be positive")
    elif n >= 1:
        dx = length / n
        sigma = cfg["packet.sigma"]
        if sigma < 4 * dx:
            fatal(f"packet.sigma = {sigma:g} under-resolved by grid spacing {dx:g}")
        if abs(cfg["packet.x0"]) + 5 * sigma > length / 2:
            fatal("packet does not fit in the grid with a 5-sigma margin")
        kmax = math.pi / dx
        if abs(cfg["packet.k0"]) + 10 / (2 * sigma) > kmax:
            fatal("packet.k0 exceeds the grid's Nyquist wave number")
    dt = cfg["run.dt"]
    if not dt > 0 or not cfg["run.t_end"] > 0:
        fatal("run.dt and run.t_end must be positive")
    else:
        if cfg["scaled.A"] * dt > 0.1:
            fatal("run.dt too large for scaled.A (need A dt <= 0.1)")
        if dt > cfg["scaled.tau"] / 100:
            fatal("run.dt must be <= scaled.tau / 100")
    return out


def replace_values(cfg, **changes):
    new = RunConfig(dict(cfg.values))
    for k, v in changes.items():
        new.set(k, v)
    return new


__all__ = ["RunConfig", "SCHEMA", "Diagnostic", "validate_config", "replace_values"]
