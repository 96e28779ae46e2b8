"""Timed runs and their cost report."""

from __future__ import annotations

import csv
import time
from dataclasses import asdict, dataclass

import numpy as np

from . import _kernels
from .diagnostics import ConservationLedger
from .presets import Problem
from .solver import DistributionField, SplittingResult, run_splitting

REPORT_COLUMNS = [
    "preset", "nx", "nv", "ncycle", "T", "Tcycle", "Tcell", "transport_pct", "relax_pct",
    "mass_drift", "mom_drift", "energy_drift", "min_f", "min_E",
]


def state_memory_bytes(N: int, n_cells: int, d: int, K: int) -> int:
    """Distribution storage plus the per-cell relaxation work arrays."""
    work = n_cells * (2 * (d + 2) + d * K + 1)
    return 8 * (N * n_cells + work + 2 * N * (d + 2))


@dataclass
class RunReport:
    preset: str
    nx: int
    nv: int
    ncycle: int
    T: float
    n_cells: int
    transport_time: float
    relax_time: float
    mass_drift: float
    mom_drift: float
    energy_drift: float
    min_f: float
    min_E: float
    memory_bytes: int

    @property
    def Tcycle(self) -> float:
        return self.T / self.ncycle

    @property
    def Tcell(self) -> float:
        return self.T / self.ncycle / self.n_cells

    @property
    def transport_pct(self) -> float:
        return 100.0 * self.transport_time / self.T

    @property
    def relax_pct(self) -> float:
        return 100.0 * self.relax_time / self.T

    def row(self) -> dict:
        out = asdict(self)
        out.update(Tcycle=self.Tcycle, Tcell=self.Tcell,
                   transport_pct=self.transport_pct, relax_pct=self.relax_pct)
        return {k: out[k] for k in REPORT_COLUMNS}

    def table(self) -> str:
        r = self.row()
        width = max(len(k) for k in r)
        lines = []
        for k, v in r.items():
            lines.append(f"{k:<{width}}  {v:.6g}" if isinstance(v, float) else f"{k:<{width}}  {v}")
        lines.append(f"{'memory_MB':<{width}}  {self.memory_bytes / 2**20:.1f}")
        return "\n".join(lines)


def write_report_csv(reports, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=REPORT_COLUMNS)
        w.writeheader()
        for rep in reports:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in rep.row().items()})


def run_benchmark(problem: Problem, proj=None, field: DistributionField = None):
    """Run ``problem`` with stage timers; returns ``(report, result, ledger)``.

    The conservation ledger is recorded every cycle; its cost is excluded
    from the wall time ``T``.
    """
    _kernels.warmup()
    proj = proj or problem.projection()
    fld = field if field is not None else problem.initial_field(proj)
    ledger = ConservationLedger(problem.vgrid.d)
    ledger.record(fld)
    spent = [0.0]

    def on_cycle(f, n, e):
        t0 = time.perf_counter()
        ledger.record(f, e)
        spent[0] += time.perf_counter() - t0

    t0 = time.perf_counter()
    res: SplittingResult = run_splitting(fld, problem.config, proj, on_cycle)
    T = time.perf_counter() - t0 - spent[0]
    drift = ledger.drift()
    d = problem.vgrid.d
    vg, sg = problem.vgrid, problem.sgrid
    report = RunReport(
        preset=problem.preset.name,
        nx=problem.preset.nx,
        nv=vg.K,
        ncycle=res.ncycle,
        T=T,
        n_cells=sg.n_cells,
        transport_time=res.timings["transport"],
        relax_time=res.timings["relax"],
        mass_drift=float(drift[0]),
        mom_drift=float(np.max(drift[1 : d + 1])),
        energy_drift=float(drift[d + 1]),
        min_f=float(min(ledger.min_f)),
        min_E=float(res.min_equilibrium),
        memory_bytes=state_memory_bytes(vg.N, sg.n_cells, d, vg.K),
    )
    return report, res, ledger
