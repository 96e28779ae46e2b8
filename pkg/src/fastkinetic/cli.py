"""Command-line driver: ``fks --preset sod1d --ref riemann --out rho.csv``."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .benchmark import run_benchmark, write_report_csv
from .config import KEYS, ConfigError, make_config, read_config_file
from .diagnostics import error_norms, moment_fields
from .grids import cfl_time_step
from .io import write_fields_csv, write_vtk_structured_points
from .presets import PRESETS
from .reference import run_upwind, sod_profile
from .solver import time_steps


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fks", description="Fast kinetic scheme for the BGK equation.")
    ap.add_argument("--config", metavar="FILE", help="key = value file; flags override it")
    ap.add_argument("--preset", choices=sorted(PRESETS))
    ap.add_argument("--nx", help="cells per axis")
    ap.add_argument("--nv", help="velocity points per axis")
    ap.add_argument("--vmin")
    ap.add_argument("--vmax")
    ap.add_argument("--tau", help="relaxation time (0 = fluid limit, inf = free transport)")
    ap.add_argument("--tfinal")
    ap.add_argument("--cfl", help="time-step safety factor in (0, 1], default 0.95")
    ap.add_argument("--dt", help="fixed time step, overrides --cfl")
    ap.add_argument("--order", choices=["1", "2"])
    ap.add_argument("--bc", choices=["periodic", "clamp", "reflect"])
    ap.add_argument("--out", metavar="PATH", help="write final moment fields here")
    ap.add_argument("--format", choices=["csv", "vtk"])
    ap.add_argument("--ref", choices=["riemann", "upwind", "none"])
    ap.add_argument("--report", metavar="PATH", help="write the run report as CSV")
    ap.add_argument("--ledger", metavar="PATH", help="write per-cycle conserved totals as CSV")
    return ap


def parse_config(argv=None):
    args = build_parser().parse_args(argv)
    values = read_config_file(args.config) if args.config else {}
    for key in KEYS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    return make_config(values)


def reference_density(cfg, problem, fld, proj):
    """Density of the requested reference at the cell centres (x-line only)."""
    x = problem.sgrid.axis_centers(0)
    if cfg.ref == "riemann":
        left, right = problem.preset.euler_states()
        if problem.doubled:
            x = np.where(x > 1.0, 2.0 - x, x)
        return sod_profile(left, right, x, problem.config.tfinal)[0]
    init = problem.initial_field(proj)
    dt = problem.config.dt or cfl_time_step(problem.vgrid, problem.sgrid.dx, problem.config.safety, 1)
    run_upwind(init, time_steps(problem.config.tfinal, dt), problem.config.tau, proj)
    return moment_fields(init).rho


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
        problem = cfg.problem()
        report, res, ledger = run_benchmark(problem)
        fld = res.field
        print(report.table())
        moments = moment_fields(fld)
        if moments.vacuum_cells:
            print(f"warning: {len(moments.vacuum_cells)} vacuum cells", file=sys.stderr)
        if cfg.ref != "none":
            ref = reference_density(cfg, problem, fld, problem.projection())
            rho = moments.rho
            if rho.ndim > 1:
                rho = rho[(slice(None),) + (0,) * (rho.ndim - 1)]
            l1, linf = error_norms(rho, ref, problem.sgrid.dx)
            print(f"rho vs {cfg.ref}: L1 {l1:.6e}  Linf {linf:.6e}")
        if cfg.out:
            if cfg.format == "vtk":
                write_vtk_structured_points(moments, problem.sgrid, cfg.out)
            else:
                write_fields_csv(moments, problem.sgrid, cfg.out)
        if cfg.report:
            write_report_csv([report], cfg.report)
        if cfg.ledger:
            ledger.write_csv(cfg.ledger)
    except ConfigError as exc:
        print(f"fks: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, ArithmeticError) as exc:
        print(f"fks: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
