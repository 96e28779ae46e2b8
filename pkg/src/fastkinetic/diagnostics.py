"""Conservation ledger, entropy, macroscopic fields and error norms."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .equilibrium import moment_matrix
from .solver import DistributionField, cell_moments


@dataclass
class MomentSet:
    """Per-cell conserved moments ``U[r, *cells]`` with derived primitives."""

    U: np.ndarray
    d: int
    vacuum_cells: list = field(default_factory=list)

    @property
    def rho(self):
        return self.U[0]

    @property
    def mom(self):
        return self.U[1 : self.d + 1]

    @property
    def E(self):
        return self.U[self.d + 1]

    @property
    def u(self):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(self.rho > 0, self.mom / self.rho, np.nan)

    @property
    def theta(self):
        u = self.u
        with np.errstate(divide="ignore", invalid="ignore"):
            th = (2.0 * self.E - self.rho * np.sum(u * u, axis=0)) / (self.d * self.rho)
        return np.where(self.rho > 0, th, np.nan)

    @property
    def pressure(self):
        return self.rho * self.theta


def moment_fields(fld: DistributionField) -> MomentSet:
    """Moments of every cell; vacuum cells are flagged rather than fatal."""
    U = cell_moments(fld)
    bad = np.argwhere(~(U[0] > 0))
    return MomentSet(U, fld.vgrid.d, [tuple(int(i) for i in b) for b in bad])


def conserved_totals(fld: DistributionField) -> np.ndarray:
    """``sum_j dx^d U_j``, summed over storage labels.

    Every label sits in exactly one cell, so no gather is needed.
    """
    sums = fld.values.reshape(fld.vgrid.N, -1).sum(axis=1)
    C = moment_matrix(fld.vgrid.nodes, fld.vgrid.dv)
    return (C @ sums) * fld.sgrid.cell_volume


def discrete_entropy(fld: DistributionField):
    """``H = sum_j dx^d sum_k F log F dv^d`` with ``0 log 0 = 0``.

    Negative entries are clamped to zero.  Returns ``(H, n_clamped)``.
    """
    v = fld.values
    neg = int(np.count_nonzero(v < 0))
    p = np.maximum(v, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, p * np.log(np.where(p > 0, p, 1.0)), 0.0)
    H = float(terms.sum()) * fld.vgrid.cell_volume * fld.sgrid.cell_volume
    return H, neg


def error_norms(computed, reference, cell_volume: float = 1.0):
    """``(L1, Linf)`` of the difference; ``L1 = cell_volume * sum |diff|``."""
    a = np.asarray(computed, dtype=float)
    b = np.asarray(reference, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    diff = np.abs(a - b)
    return float(diff.sum() * cell_volume), float(diff.max(initial=0.0))


class ConservationLedger:
    """Per-cycle conserved totals and minimum stored/equilibrium values."""

    def __init__(self, d: int):
        self.d = d
        self.totals = []
        self.min_f = []
        self.min_eq = []

    def record(self, fld: DistributionField, min_eq: float = math.nan):
        self.totals.append(conserved_totals(fld))
        self.min_f.append(float(fld.values.min()))
        self.min_eq.append(float(min_eq))

    def __len__(self):
        return len(self.totals)

    def drift(self) -> np.ndarray:
        """Largest relative deviation from the first entry, per component.

        Momentum is scaled by ``sqrt(2 * mass * energy)`` (an upper bound on
        its magnitude) since its initial total is often zero.
        """
        T = np.asarray(self.totals)
        t0 = T[0]
        scale = np.abs(t0).astype(float)
        scale[1 : self.d + 1] = math.sqrt(2.0 * abs(t0[0]) * abs(t0[-1]))
        return np.max(np.abs(T - t0), axis=0) / scale

    def write_csv(self, path):
        names = ["mass"] + [f"mom_{c}" for c in "xyz"[: self.d]] + ["energy"]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["cycle"] + names + ["min_f", "min_E"])
            for n, (tot, mf, me) in enumerate(zip(self.totals, self.min_f, self.min_eq)):
                w.writerow([n] + [repr(float(t)) for t in tot] + [repr(mf), repr(me)])
