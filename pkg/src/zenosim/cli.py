"""Batch entry point: config parsing, subcommands, CSV output, run manifests.

Subcommands
    ground      solve the stationary state, write ground_state{,_meta}.csv
    evolve      integrate one dissipative run, write trajectory.csv (+density.csv)
    sweep       loss curve over a gamma list at fixed (width, xd)
    zeno-scan   loss-curve matrix over widths x impinging points + collapse report

Configuration is a flat key=value text file; command-line flags override file
values. Every run writes a manifest.txt that is itself a valid config file
and reproduces the run bit for bit when re-fed with --config.
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, fields, replace

import numpy as np

from . import __version__
from .errors import (BlowUpError, BoundaryContaminationError, ConvergenceError,
                     ParameterError, SimulationError)
from .evolution import EvolutionConfig, calibrate_dt, decay_rate_check, evolve
from .grid import Grid, density, energy_components
from .ground_state import solve_ground_state
from .potentials import DissipationProfile, TrapPotential
from .sweep import (LossCurve, collapse_check, critical_gamma,
                    default_gamma_grid, sweep_gamma)

OUTDIR_ENV_VAR = "ZENOSIM_OUTDIR"
SATURATION_RATE_TOL = 1e-4
FMT = "%.12g"

EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3
EXIT_BLOWUP = 4
EXIT_BOUNDARY = 5


@dataclass
class RunConfig:
    """All tunables of a run; defaults reproduce the reference setup."""

    g: float = 0.1
    vh: float = 5e-4
    gamma: float = 23.4
    width: float = 0.1
    xd: float = 0.0
    gammas: tuple = ()          # sweep/zeno-scan intensity list; () = per-width default
    widths: tuple = (0.025, 0.1, 0.5, 1.0, 2.0)
    xds: tuple = (0.0, -5.0, -10.0)
    L: float = 32.0
    n: int = 10240
    dt: float = 1e-3
    t_final: float = 4.0
    tol: float = 1e-8
    stride: int = 10
    record_density: bool = False
    workers: int = 1
    dt_check: bool = True
    out: str = ""

    def outdir(self) -> str:
        return self.out or os.environ.get(OUTDIR_ENV_VAR, ".")

    def grid(self) -> Grid:
        return Grid(self.L, self.n)

    def trap(self) -> TrapPotential:
        return TrapPotential(self.vh)


_BOOL_FIELDS = {"record_density", "dt_check"}
_INT_FIELDS = {"n", "stride", "workers"}
_LIST_FIELDS = {"gammas", "widths", "xds"}
_STR_FIELDS = {"out"}


def _parse_bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ParameterError(f"expected a boolean, got {text!r}")


def parse_value_list(text):
    """Comma list ('0,1,2') or inclusive range ('0:40:1') of floats."""
    text = text.strip()
    if not text:
        return ()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ParameterError(f"range syntax is start:stop:step, got {text!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise ParameterError(f"range step must be positive, got {step}")
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        return tuple(start + i * step for i in range(count))
    return tuple(float(tok) for tok in text.split(",") if tok.strip())


def _coerce(name, text):
    if name in _BOOL_FIELDS:
        return _parse_bool(text)
    if name in _INT_FIELDS:
        return int(text)
    if name in _LIST_FIELDS:
        return parse_value_list(text)
    if name in _STR_FIELDS:
        return text.strip()
    return float(text)


def load_config_file(path) -> dict:
    """Parse a flat key=value file; '#' starts a comment."""
    known = {f.name for f in fields(RunConfig)}
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParameterError(f"{path}:{lineno}: expected key=value, got {raw!r}")
            key, _, val = line.partition("=")
            key = key.strip()
            if key == "version":
                continue                      # manifests carry the code version
            if key not in known:
                raise ParameterError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = _coerce(key, val)
    return values


def _fmt_config_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, tuple):
        return ",".join(repr(float(x)) for x in v)
    if isinstance(v, float):
        return repr(v)                        # exact round trip
    return str(v)


def write_manifest(cfg: RunConfig, path):
    with open(path, "w") as fh:
        fh.write(f"# zenosim run manifest\nversion = {__version__}\n")
        for f in fields(cfg):
            fh.write(f"{f.name} = {_fmt_config_value(getattr(cfg, f.name))}\n")


def _write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_cell(v) for v in row) + "\n")


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return FMT % v
    return str(v)


def _curve_filename(width, xd):
    return f"loss_curve_{width:g}_{xd:g}.csv"


# ---------------------------------------------------------------- subcommands

def run_ground(cfg: RunConfig) -> int:
    grid = cfg.grid()
    trap = cfg.trap()
    result = solve_ground_state(grid, cfg.g, trap, tol=cfg.tol)
    e = energy_components(result.psi0, cfg.g, trap)
    outdir = cfg.outdir()
    os.makedirs(outdir, exist_ok=True)
    rho = density(result.psi0)
    _write_csv(os.path.join(outdir, "ground_state.csv"),
               ["x", "re_psi", "im_psi", "density"],
               zip(grid.x, result.psi0.psi.real, result.psi0.psi.imag, rho))
    _write_csv(os.path.join(outdir, "ground_state_meta.csv"),
               ["mu", "residual", "iterations", "E_kin", "E_trap", "E_int"],
               [(result.mu, result.residual, result.iterations,
                 e.kinetic, e.trap, e.interaction)])
    write_manifest(cfg, os.path.join(outdir, "manifest.txt"))
    print(f"ground state: mu={result.mu:.10g} residual={result.residual:.3e} "
          f"iterations={result.iterations}")
    return 0


def _calibrated_dt(cfg: RunConfig, psi0, trap, gamma_probe: float) -> float:
    if not cfg.dt_check or gamma_probe == 0.0:
        return cfg.dt
    diss = DissipationProfile(gamma=gamma_probe, width=cfg.width, center=cfg.xd)
    dt = calibrate_dt(psi0, cfg.g, trap, diss, cfg.dt,
                      probe_time=min(1.0, cfg.t_final))
    if dt != cfg.dt:
        print(f"note: dt lowered {cfg.dt:g} -> {dt:g} to satisfy the 1% "
              f"decay-rate consistency check", file=sys.stderr)
    return dt


def run_evolve(cfg: RunConfig) -> int:
    grid = cfg.grid()
    trap = cfg.trap()
    diss = DissipationProfile(gamma=cfg.gamma, width=cfg.width, center=cfg.xd)
    diss.values(grid)                         # fail fast on resolution
    ground = solve_ground_state(grid, cfg.g, trap, tol=cfg.tol)
    dt = _calibrated_dt(cfg, ground.psi0, trap, cfg.gamma)
    evo = EvolutionConfig(dt=dt, t_final=cfg.t_final, snapshot_stride=cfg.stride,
                          record_density=cfg.record_density)
    traj = evolve(ground.psi0, evo, cfg.g, trap, diss)

    outdir = cfg.outdir()
    os.makedirs(outdir, exist_ok=True)
    _write_csv(os.path.join(outdir, "trajectory.csv"), ["t", "p_rem"],
               zip(traj.times, traj.p_rem))
    if cfg.record_density:
        with open(os.path.join(outdir, "density.csv"), "w") as fh:
            fh.write("t,x,rho\n")
            for ti, row in zip(traj.times, traj.density):
                t_str = FMT % ti
                for xi, ri in zip(grid.x, row):
                    fh.write(f"{t_str},{FMT % xi},{FMT % ri}\n")
    write_manifest(cfg, os.path.join(outdir, "manifest.txt"))

    final_rate = decay_rate_check(traj.final_psi, diss)
    if final_rate > SATURATION_RATE_TOL:
        print(f"warning: |dP_rem/dt|={final_rate:.2e} at t_final={cfg.t_final:g} "
              f"exceeds {SATURATION_RATE_TOL:g}; loss not yet saturated",
              file=sys.stderr)
    print(f"evolve: gamma={cfg.gamma:g} width={cfg.width:g} xd={cfg.xd:g} "
          f"P_rem({cfg.t_final:g})={traj.p_rem[-1]:.10g}")
    return 0


def _gamma_list(cfg: RunConfig, width: float) -> np.ndarray:
    return np.asarray(cfg.gammas, dtype=float) if cfg.gammas else default_gamma_grid(width)


def _family_dt(cfg: RunConfig, trap, psi0, width, xd_probe) -> float:
    """dt for one beam-width family, calibrated at the family's strongest beam.

    One dt per family: curves that are compared in the collapse report must
    share identical numerics.
    """
    gammas = _gamma_list(cfg, width)
    if not cfg.dt_check or gammas[-1] == 0:
        return cfg.dt
    diss = DissipationProfile(gamma=float(gammas[-1]), width=width, center=xd_probe)
    dt = calibrate_dt(psi0, cfg.g, trap, diss, cfg.dt,
                      probe_time=min(1.0, cfg.t_final))
    if dt != cfg.dt:
        print(f"note: dt lowered {cfg.dt:g} -> {dt:g} for width={width:g}",
              file=sys.stderr)
    return dt


def _sweep_curve(cfg: RunConfig, grid, trap, psi0, width, xd, dt) -> LossCurve:
    return sweep_gamma(_gamma_list(cfg, width), grid=grid, g=cfg.g, trap=trap,
                       width=width, center=xd, dt=dt, t_final=cfg.t_final,
                       psi0=psi0, n_workers=cfg.workers)


def _write_curve(outdir, curve: LossCurve):
    _write_csv(os.path.join(outdir, _curve_filename(curve.width, curve.center)),
               ["gamma", "final_loss"], zip(curve.gamma_values, curve.final_loss))


def _warn_unsaturated(curve: LossCurve):
    if curve.final_rate is None:
        return
    n_bad = int(np.sum(curve.final_rate > SATURATION_RATE_TOL))
    if n_bad:
        print(f"warning: width={curve.width:g} xd={curve.center:g}: {n_bad}/"
              f"{len(curve.final_rate)} runs not saturated at t_final="
              f"{curve.t_final:g} (|dP_rem/dt| > {SATURATION_RATE_TOL:g})",
              file=sys.stderr)


def run_sweep(cfg: RunConfig) -> int:
    grid = cfg.grid()
    trap = cfg.trap()
    ground = solve_ground_state(grid, cfg.g, trap, tol=cfg.tol)
    dt = _family_dt(cfg, trap, ground.psi0, cfg.width, cfg.xd)
    curve = _sweep_curve(cfg, grid, trap, ground.psi0, cfg.width, cfg.xd, dt)
    outdir = cfg.outdir()
    os.makedirs(outdir, exist_ok=True)
    _write_curve(outdir, curve)
    write_manifest(cfg, os.path.join(outdir, "manifest.txt"))
    _warn_unsaturated(curve)
    gs = critical_gamma(curve)
    print(f"sweep: width={cfg.width:g} xd={cfg.xd:g} gamma*="
          f"{'none' if gs is None else f'{gs:g}'}")
    return 0


def run_zeno_scan(cfg: RunConfig) -> int:
    grid = cfg.grid()
    trap = cfg.trap()
    if not cfg.widths or not cfg.xds:
        raise ParameterError("zeno-scan needs non-empty widths and xds lists")
    ground = solve_ground_state(grid, cfg.g, trap, tol=cfg.tol)
    outdir = cfg.outdir()
    os.makedirs(outdir, exist_ok=True)

    report_rows = []
    for width in cfg.widths:
        family = []
        dt = _family_dt(cfg, trap, ground.psi0, width, cfg.xds[0])
        for xd in cfg.xds:
            curve = _sweep_curve(cfg, grid, trap, ground.psi0, width, xd, dt)
            family.append(curve)
            _write_curve(outdir, curve)
            _warn_unsaturated(curve)
        report = collapse_check(family)
        for e in report.entries:
            report_rows.append((e.width, e.center, e.scale, e.residual, e.gamma_star))
    _write_csv(os.path.join(outdir, "collapse_report.csv"),
               ["w", "x_d", "scale", "residual", "gamma_star"], report_rows)
    write_manifest(cfg, os.path.join(outdir, "manifest.txt"))
    print(f"zeno-scan: {len(cfg.widths)}x{len(cfg.xds)} loss curves written to {outdir}")
    return 0


# -------------------------------------------------------------- argument glue

def _add_common_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="flat key=value config file (flags override)")
    p.add_argument("--g", type=float, help="interaction strength")
    p.add_argument("--vh", type=float, help="trap curvature")
    p.add_argument("--gamma", type=float, help="beam peak intensity")
    p.add_argument("--width", type=float, help="beam 1/e half-width")
    p.add_argument("--xd", type=float, help="beam impinging point")
    p.add_argument("--gammas", type=str, help="intensity list: '0,1,2' or '0:40:1'")
    p.add_argument("--widths", type=str, help="width list for zeno-scan")
    p.add_argument("--xds", type=str, help="impinging-point list for zeno-scan")
    p.add_argument("--L", type=float, help="box half-width")
    p.add_argument("--n", type=int, help="number of grid points (even)")
    p.add_argument("--dt", type=float, help="time step")
    p.add_argument("--t-final", dest="t_final", type=float, help="evolution horizon")
    p.add_argument("--tol", type=float, help="ground-state residual tolerance")
    p.add_argument("--stride", type=int, help="snapshot stride in steps")
    p.add_argument("--record-density", dest="record_density", action="store_true",
                   default=None, help="write density snapshots (evolve)")
    p.add_argument("--workers", type=int, help="parallel workers for sweeps")
    p.add_argument("--no-dt-check", dest="dt_check", action="store_false",
                   default=None, help="skip the dt decay-rate calibration probe")
    p.add_argument("--out", type=str,
                   help=f"output directory (default ${OUTDIR_ENV_VAR} or '.')")


def build_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        cfg = replace(cfg, **load_config_file(args.config))
    overrides = {}
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is None:
            continue
        if f.name in _LIST_FIELDS and isinstance(v, str):
            v = parse_value_list(v)
        overrides[f.name] = v
    cfg = replace(cfg, **overrides)
    cfg.grid()            # validate geometry eagerly
    cfg.trap()
    if cfg.dt <= 0 or cfg.t_final < cfg.dt:
        raise ParameterError(f"invalid time stepping: dt={cfg.dt}, t_final={cfg.t_final}")
    if cfg.tol <= 0:
        raise ParameterError(f"tol must be positive, got {cfg.tol}")
    return cfg


_COMMANDS = {
    "ground": run_ground,
    "evolve": run_evolve,
    "sweep": run_sweep,
    "zeno-scan": run_zeno_scan,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="zenosim",
        description="1D dissipative Bose-Einstein condensate simulator")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("ground", "solve the stationary state"),
        ("evolve", "time-integrate one dissipative run"),
        ("sweep", "loss curve over gamma at fixed width and impinging point"),
        ("zeno-scan", "loss-curve matrix over widths and impinging points"),
    ):
        _add_common_flags(sub.add_parser(name, help=help_text))

    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        return _COMMANDS[args.command](cfg)
    except (ParameterError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except BlowUpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    except BoundaryContaminationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BOUNDARY
    except SimulationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
