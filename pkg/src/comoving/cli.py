"""Command-line front end: subcommands emitting deterministic CSV.

Data files carry no timestamps; provenance goes to a ``.meta.json`` sidecar
next to each file written with ``--out``.
"""
import argparse
import io
import json
import math
import os
import platform
import sys
import warnings
from datetime import datetime, timezone

import numpy as np
import scipy

from . import __version__
from .config import RunConfig, validate_config
from .designer import DesignProblem, IllPosedDesign, TargetPhase, design_lsq, verify_design
from .errors import ConfigError, NumericalFailure
from .kernels import BACKEND
from .pulse import spectrum
from .raytrace import (ConsistencyError, FocusError, NoBracketError, NoImageError, Ray,
                       cone_trace, lens_scan, refocus_metrics, threshold_field, trace)
from .schrodinger import EvolutionConfig, GridSpec, evolve, init_gaussian, scaled_params
from .semiclassical import (group_velocity, packet_center_series, phase_series,
                            phase_shift_asymptotic)
from .constants import GAUSS

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2
NUMERIC_ERRORS = (NumericalFailure, NoImageError, ConsistencyError, NoBracketError,
                  FocusError, IllPosedDesign, ArithmeticError)

TRAJ_HEADER = ["t_s", "x_m", "y_m", "z_m", "vx_mps", "vy_mps", "vz_mps"]
SCAN_HEADER = ["v0_mps", "theta_rad", "deltaZ_m", "deltaZ_plane_m"]


class UsageError(ConfigError):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; 2 is reserved for numerical failure here
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


# CSV ------------------------------------------------------------------------

def format_csv(header, rows):
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join("%.9g" % (float(v) + 0.0) for v in row) + "\n")  # no "-0"
    return buf.getvalue()


def read_csv(path, expected):
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        if [h.strip() for h in header] != expected:
            raise ConfigError(f"{path}: expected columns {','.join(expected)}")
        try:
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
        except ValueError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    if data.shape[0] == 0 or data.shape[1] != len(expected):
        raise ConfigError(f"{path}: no data rows")
    return data


def _provenance(command, argv, cfg):
    return {
        "command": command,
        "argv": list(argv),
        "package_version": __version__,
        "kernel_backend": BACKEND,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "created_utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "config": dict(sorted(cfg.values.items())) if cfg is not None else None,
    }


def emit(text, out, meta):
    """Write CSV text to ``out`` (stdout if None) plus its provenance sidecar."""
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    with open(out + ".meta.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


# helpers --------------------------------------------------------------------

def _series_times(cfg):
    dt = cfg["series.dt_us"] * 1e-6
    t_max = cfg["series.t_max_ms"] * 1e-3
    if not (dt > 0 and t_max > 0):
        raise ConfigError("series.dt_us and series.t_max_ms must be positive")
    return dt * np.arange(int(math.floor(t_max / dt + 1e-9)) + 1)


def _vx(cfg):
    return cfg["beam.v0_mps"] * math.sin(cfg["beam.theta_rad"])


def _ray(cfg, **kw):
    args = dict(theta=cfg["beam.theta_rad"], azimuth=cfg["beam.azimuth_rad"],
                v0=cfg["beam.v0_mps"])
    args.update(kw)
    return Ray(**args)


def _traj_rows(traj, lead=()):
    rows = traj.rows()
    if lead:
        rows = np.column_stack([np.full((rows.shape[0], len(lead)), lead), rows])
    return rows


def _scan_rows(scan, scene):
    return [(v0, th, dz, dz - scene.source_distance) for th, v0, dz in scan.entries]


# subcommands ----------------------------------------------------------------

def cmd_trace(cfg, args):
    traj = trace(cfg.scene(), _ray(cfg), cfg["trace.dt_us"] * 1e-6)
    return format_csv(TRAJ_HEADER, traj.rows())


def cmd_phase(cfg, args):
    params = cfg.device()
    if args.asymptotic:
        thetas = cfg.thetas()
        v0 = cfg["beam.v0_mps"]
        ks = [params.k_from_velocity(v0 * math.sin(th)) for th in thetas]
        return format_csv(["k_per_m", "phi_inf_rad"],
                          [(k, phase_shift_asymptotic(params, k)) for k in ks])
    t = _series_times(cfg)
    return format_csv(["t_s", "phi_rad"], zip(t, phase_series(params, t, vx=_vx(cfg))))


def cmd_vg(cfg, args):
    params = cfg.device()
    t = _series_times(cfg)
    vx = _vx(cfg)
    xi = packet_center_series(params, t, vx=vx)
    vg = group_velocity(params, t, vx=vx)
    return format_csv(["t_s", "xi_m", "vgx_mps"], zip(t, xi, vg))


def cmd_lens_scan(cfg, args):
    scene = cfg.scene()
    scan = lens_scan(scene, cfg.thetas(), cfg.v0_list(), cfg["trace.dt_us"] * 1e-6,
                     workers=args.threads)
    return format_csv(SCAN_HEADER, _scan_rows(scan, scene))


def cmd_threshold(cfg, args):
    scene = cfg.scene()
    lo, hi = cfg["threshold.B_min_gauss"] * GAUSS, cfg["threshold.B_max_gauss"] * GAUSS
    rows = []
    for th in cfg.number_list("threshold.theta_list_rad"):
        B = threshold_field(scene, th, (lo, hi), v0=cfg["beam.v0_mps"])
        rows.append((th, B / GAUSS))
    return format_csv(["theta_rad", "B_threshold_gauss"], rows)


def cmd_spectrum(cfg, args):
    n = cfg["spectrum.n_points"]
    if n < 1:
        raise ConfigError("spectrum.n_points must be positive")
    nu_max = cfg["spectrum.nu_max_hz"]
    grid = np.linspace(-nu_max, nu_max, n) if n > 1 else np.array([0.0])
    spec = spectrum(cfg.signal(), grid)
    return format_csv(["nu_Hz", "reH_Js", "imH_Js"],
                      zip(spec.nu, spec.values.real, spec.values.imag))


def cmd_design(cfg, args):
    if args.target is None or args.T is None:
        raise UsageError("design needs --target and --T")
    data = read_csv(args.target, ["k_per_m", "phi_rad"])
    target = TargetPhase(data[:, 0], data[:, 1])
    params = cfg.device()
    nu_max = float(np.max(target.k_grid)) * params.hbar / (params.mass * params.lambda_period)
    if not args.T > 0:
        raise ConfigError("--T must be positive")
    problem = DesignProblem.for_band(args.T, max(nu_max, 1.0 / args.T),
                                     ridge_lambda=args.ridge, amplitude_bound=args.bound)
    result = design_lsq(target, problem, params)
    resid = verify_design(result, target, params)
    print(f"design: {result.t_grid.size} samples, rank {result.rank}, "
          f"max residual {resid:.3e} rad", file=sys.stderr)
    return format_csv(["t_s", "s_J"], zip(result.t_grid, result.s_samples))


def cmd_evolve(cfg, args):
    grid = GridSpec.centered(cfg["grid.length"], cfg["grid.n"])
    packet = init_gaussian(grid, cfg["packet.x0"], cfg["packet.sigma"], cfg["packet.k0"])
    params = scaled_params(cfg["scaled.A"], cfg["scaled.eps"], cfg["scaled.tau"],
                           cfg["scaled.tau1"])
    conf = EvolutionConfig(cfg["run.dt"], cfg["run.t_end"], cfg["run.record_every"])
    res = evolve(packet, params, conf)
    return format_csv(["t", "norm", "mean_x", "var_x", "mean_v", "vg_current"], res.columns())


# figures --------------------------------------------------------------------

FIG2_THETAS = tuple(round(0.02 * i, 12) for i in range(7))
FIG3_THETAS = tuple(round(0.005 * i, 12) for i in range(1, 25))
FIG4_AZIMUTHS = tuple(math.pi * i / 12 for i in range(13))  # half cone
FIG5_THETAS = tuple(round(0.002 * i, 12) for i in range(9))

# Each recipe: frozen overrides on top of the default bundle.
RECIPES = {
    "fig2": {},
    "fig3": {"scan.v0_list_mps": "18,20,22"},
    "fig4a": {"scene.dim": 1, "beam.theta_rad": 0.1},
    "fig4b": {"scene.dim": 2, "beam.theta_rad": 0.1},
    "fig5": {"pulse.train": "1@0,1.5@1,1@2", "scene.length_mm": 80.0,
             "device.phase_reference": "per_pulse"},
}


def _fig2(cfg, threads):
    scene, dt = cfg.scene(), cfg["trace.dt_us"] * 1e-6
    rays = [Ray(th, 0.0, cfg["beam.v0_mps"]) for th in FIG2_THETAS]
    rows = [_traj_rows(trace(scene, r, dt), (r.theta,)) for r in rays]
    return {"fig2.csv": format_csv(["theta_rad"] + TRAJ_HEADER, np.vstack(rows))}


def _fig3(cfg, threads):
    scene = cfg.scene()
    scan = lens_scan(scene, FIG3_THETAS, cfg.v0_list(), cfg["trace.dt_us"] * 1e-6, threads)
    return {"fig3.csv": format_csv(SCAN_HEADER, _scan_rows(scan, scene))}


def _fig4(name):
    def run(cfg, threads):
        trajs = cone_trace(cfg.scene(), cfg["beam.theta_rad"], FIG4_AZIMUTHS,
                           cfg["beam.v0_mps"], cfg["trace.dt_us"] * 1e-6, threads)
        rows = [_traj_rows(tr, (tr.ray.azimuth,)) for tr in trajs]
        return {f"{name}.csv": format_csv(["azimuth_rad"] + TRAJ_HEADER, np.vstack(rows))}
    return run


def _fig5(cfg, threads):
    scene, dt, v0 = cfg.scene(), cfg["trace.dt_us"] * 1e-6, cfg["beam.v0_mps"]
    rows = [_traj_rows(trace(scene, Ray(th, 0.0, v0), dt), (th,)) for th in FIG5_THETAS]
    focus = refocus_metrics(scene, FIG5_THETAS, v0, dt, threads)
    z = np.linspace(0.0, 0.2, 201)
    return {
        "fig5.csv": format_csv(["theta_rad"] + TRAJ_HEADER, np.vstack(rows)),
        "fig5_focus.csv": format_csv(["z_focus_m", "rms_spread_m"],
                                     [(focus.z_focus, focus.rms_spread)]),
        "fig5_spread.csv": format_csv(["z_m", "rms_spread_m"], zip(z, focus.spread_at(z))),
    }


FIGURES = {"fig2": _fig2, "fig3": _fig3, "fig4a": _fig4("fig4a"), "fig4b": _fig4("fig4b"),
           "fig5": _fig5}


def recipe_config(name, overrides=()):
    cfg = RunConfig()
    for key, value in RECIPES[name].items():
        cfg.set(key, value, where=f"recipe {name}")
    for item in overrides:
        cfg.override(item)
    return cfg


def run_figure(name, out_dir, threads=None, overrides=(), argv=()):
    cfg = recipe_config(name, overrides)
    _check(cfg)
    os.makedirs(out_dir, exist_ok=True)
    files = FIGURES[name](cfg, threads)
    meta = _provenance(f"figure {name}", argv, cfg)
    for fname, text in files.items():
        emit(text, os.path.join(out_dir, fname), meta)
    return sorted(files)


# driver ---------------------------------------------------------------------

COMMANDS = {
    "trace": cmd_trace, "phase": cmd_phase, "vg": cmd_vg, "lens-scan": cmd_lens_scan,
    "threshold": cmd_threshold, "spectrum": cmd_spectrum, "design": cmd_design,
    "evolve": cmd_evolve,
}


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="run configuration file")
    common.add_argument("--out", metavar="PATH", help="output CSV (directory for figure)")
    common.add_argument("--set", dest="overrides", metavar="SECTION.KEY=VALUE",
                        action="append", default=[], help="override one key (repeatable)")
    common.add_argument("--threads", type=int, default=None, metavar="N",
                        help="worker threads for sweeps")

    parser = _Parser(prog="comoving", description="Pulsed comoving-potential matter-wave optics.")
    sub = parser.add_subparsers(dest="command", metavar="SUBCOMMAND", parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "phase":
            p.add_argument("--asymptotic", action="store_true",
                           help="emit the post-pulse phase against k over the scan angles")
        if name == "design":
            p.add_argument("--target", metavar="CSV")
            p.add_argument("--T", type=float, metavar="SECONDS", help="signal duration")
            p.add_argument("--lambda", dest="ridge", type=float, default=1e-10,
                           help="relative ridge parameter (0 disables)")
            p.add_argument("--bound", type=float, default=None, metavar="JOULE",
                           help="amplitude bound on the samples")
    fig = sub.add_parser("figure", parents=[common])
    fig.add_argument("figure_id", choices=sorted(FIGURES))
    fig.add_argument("--allow-override", action="store_true",
                     help="permit --set to modify the frozen recipe")
    return parser


def _check(cfg):
    fatal = []
    for diag in validate_config(cfg):
        if diag.level == "fatal":
            fatal.append(diag.message)
        else:
            print(f"warning: {diag.message}", file=sys.stderr)
    if fatal:
        raise ConfigError("\n".join(fatal))


def run_subcommand(argv):
    """Run one CLI invocation; returns the process exit code."""
    argv = list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage().rstrip())
        if args.threads is not None and args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        if args.command == "figure":
            if args.config:
                raise ConfigError("figure recipes are frozen; --config is not accepted")
            if args.overrides and not args.allow_override:
                raise ConfigError("figure recipes are frozen; pass --allow-override with --set")
            run_figure(args.figure_id, args.out or ".", args.threads, args.overrides, argv)
            return EXIT_OK
        cfg = RunConfig.load(args.config) if args.config else RunConfig()
        for item in args.overrides:
            cfg.override(item)
        _check(cfg)
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            text = COMMANDS[args.command](cfg, args)
        emit(text, args.out, _provenance(args.command, argv, cfg))
        return EXIT_OK
    except NUMERIC_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CONFIG
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main():
    sys.exit(run_subcommand(sys.argv[1:]))


if __name__ == "__main__":
    main()
