"""Fast kinetic scheme: exact shift transport and exact BGK relaxation.

The distribution of every velocity node is a piecewise-constant profile that
only ever translates.  Storage keeps the profile pieces in their original
(label) order; a per-node cumulative displacement ``shift[k] = v_k t`` says
where they are.  Cell ``j`` reads label ``j - m_k`` with
``m_k = floor(shift[k] / dx + 1/2)``, wrapped periodically on each axis, so
transport is an O(N) update of ``shift`` and relaxation writes back through
the same (bijective) index map.

With ``clamp`` boundaries the storage is still indexed periodically, but each
label that wraps around an edge is refilled with the value the boundary cell
held before the move (a zero-gradient inflow state).  With ``reflect`` the
wrapped strips of each pair of mirror nodes are exchanged instead, which is
a specular wall.  The kind may differ between axes.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import _kernels
from .equilibrium import (
    ColdStateError,
    ProjectionOperator,
    VacuumError,
    primitives,
)
from .grids import SpatialGrid, VelocityGrid, cfl_time_step, shift_offset


@dataclass
class DistributionField:
    """Phase-space state: label-ordered values plus per-node displacements."""

    vgrid: VelocityGrid
    sgrid: SpatialGrid
    values: np.ndarray
    shift: np.ndarray = None

    def __post_init__(self):
        if self.sgrid.ndim > self.vgrid.d:
            raise ValueError("spatial dimension cannot exceed velocity dimension")
        expected = (self.vgrid.N,) + self.sgrid.shape
        self.values = np.ascontiguousarray(self.values, dtype=float)
        if self.values.shape != expected:
            raise ValueError(f"values must have shape {expected}, got {self.values.shape}")
        if self.shift is None:
            self.shift = np.zeros((self.vgrid.N, self.sgrid.ndim))
        self.shift = np.asarray(self.shift, dtype=float)

    @classmethod
    def zeros(cls, vgrid, sgrid):
        return cls(vgrid, sgrid, np.zeros((vgrid.N,) + sgrid.shape))

    def copy(self) -> "DistributionField":
        return DistributionField(self.vgrid, self.sgrid, self.values.copy(), self.shift.copy())

    @property
    def velocities(self) -> np.ndarray:
        """Transported velocity components, shape ``(N, sgrid.ndim)``."""
        return self.vgrid.nodes[:, : self.sgrid.ndim]

    @property
    def offsets(self) -> np.ndarray:
        return shift_offset(self.shift, self.sgrid.dx)

    def _offsets3(self) -> np.ndarray:
        out = np.zeros((self.vgrid.N, 3), dtype=np.int64)
        out[:, 3 - self.sgrid.ndim :] = self.offsets
        return out

    def _values4(self) -> np.ndarray:
        shape = (1,) * (3 - self.sgrid.ndim) + self.sgrid.shape
        return self.values.reshape((self.vgrid.N,) + shape)

    def source_labels(self, j) -> tuple:
        """Storage label read by every node at cell ``j`` (tuple of index arrays)."""
        j = np.atleast_1d(np.asarray(j, dtype=np.int64))
        m = self.offsets
        return tuple((j[a] - m[:, a]) % self.sgrid.shape[a] for a in range(self.sgrid.ndim))

    def gathered(self) -> np.ndarray:
        """Values at every cell centre, shape ``(N,) + sgrid.shape``.

        Materialises a full copy; meant for diagnostics and small grids.
        """
        out = np.empty_like(self.values)
        axes = tuple(range(1, self.sgrid.ndim + 1))
        for k, m in enumerate(self.offsets):
            out[k] = np.roll(self.values[k], tuple(m), axis=tuple(a - 1 for a in axes))
        return out


def gather_cell_values(field: DistributionField, j) -> np.ndarray:
    """N-vector ``f_k(x_j)`` read from the shifted profiles at cell ``j``."""
    labels = field.source_labels(j)
    return field.values[(np.arange(field.vgrid.N),) + labels]


def cell_moments(field: DistributionField) -> np.ndarray:
    """Stacked conserved moments ``U[r, *cells]`` of the shifted profiles."""
    vg = field.vgrid
    U4 = np.empty((vg.d + 2,) + field._values4().shape[1:])
    _kernels.gather_moments(
        field._values4(), field._offsets3(), vg.nodes, vg.cell_volume, U4
    )
    return U4.reshape((vg.d + 2,) + field.sgrid.shape)


# -- initialisation ---------------------------------------------------------


def init_field(
    sample: Callable,
    sgrid: SpatialGrid,
    vgrid: VelocityGrid,
    proj: ProjectionOperator,
    target_moments: Optional[Callable] = None,
    chunk_cells: int = 2048,
) -> DistributionField:
    """Sample ``sample(x, v)`` at cell centres and project onto target moments.

    ``sample`` receives cell centres ``x`` of shape ``(n, ndim)`` and nodes
    ``v`` of shape ``(N, d)`` and returns an ``(N, n)`` array.
    ``target_moments(x)`` returns ``(d+2, n)`` moments; when omitted the
    quadrature moments of the samples are kept (no correction).
    The work is chunked over cells so no second full-size array is created.
    """
    fld = DistributionField.zeros(vgrid, sgrid)
    x = sgrid.cell_centers().reshape(-1, sgrid.ndim)
    flat = fld.values.reshape(vgrid.N, -1)
    for start in range(0, len(x), chunk_cells):
        xs = x[start : start + chunk_cells]
        ft = np.asarray(sample(xs, vgrid.nodes), dtype=float)
        if np.any(ft < 0):
            raise ValueError("initial datum must be nonnegative")
        if target_moments is not None:
            U = np.asarray(target_moments(xs), dtype=float)
            if np.any(U[0] <= 0):
                bad = start + int(np.argmax(U[0] <= 0))
                raise VacuumError(f"vacuum cell {bad} in initial data")
            ft = proj.project(ft, U)
        elif np.any(proj.moments(ft)[0] <= 0):
            raise VacuumError("vacuum cell in initial data")
        flat[:, start : start + chunk_cells] = ft
    return fld


# -- transport --------------------------------------------------------------


def transport_exact(field: DistributionField, dt: float) -> DistributionField:
    """Advance every profile by ``v_k dt``: an O(N) update of the shifts.

    Clamp boundaries additionally refill the labels entering through an edge.
    """
    if dt < 0:
        raise ValueError(f"dt must be nonnegative, got {dt}")
    sg = field.sgrid
    if sg.boundary == "periodic":
        field.shift += field.velocities * dt
        return field
    old = field._offsets3()
    field.shift += field.velocities * dt
    new = field._offsets3()
    pad = 3 - sg.ndim
    reflect = np.array(sg.axes_with("reflect"), dtype=np.int64) + pad + 1
    clamp = np.array(sg.axes_with("clamp"), dtype=np.int64) + pad + 1
    if clamp.size:
        _kernels.fill_inflow(field._values4(), old, new, clamp)
    if reflect.size:
        mirror, forward = _mirror_tables(field.vgrid, sg.ndim)
        _kernels.reflect_swap(field._values4(), old, new, reflect, mirror, forward)
    return field


def _mirror_tables(vgrid: VelocityGrid, ndim: int):
    """Mirror node and forward-mover flag per node and padded axis."""
    if not vgrid.symmetric:
        raise ValueError("reflecting walls need a velocity grid symmetric about zero")
    mirror = np.zeros((vgrid.N, 3), dtype=np.int64)
    forward = np.zeros((vgrid.N, 3), dtype=np.bool_)
    for s in range(ndim):
        a = 3 - ndim + s
        mirror[:, a] = vgrid.mirror_nodes(s)
        forward[:, a] = vgrid.nodes[:, s] > 0
    return mirror, forward


# -- relaxation -------------------------------------------------------------


def relaxation_weight(dt: float, tau: float) -> float:
    """``exp(-dt/tau)``, with 0 for ``tau == 0`` and 1 for ``tau == inf``."""
    if tau < 0:
        raise ValueError(f"tau must be nonnegative, got {tau}")
    if tau == 0:
        return 0.0
    if math.isinf(tau):
        return 1.0
    return math.exp(-dt / tau)


def relax_field(field: DistributionField, dt: float, tau: float, proj: ProjectionOperator) -> float:
    """Exact BGK relaxation at every cell centre, written back in place.

    Returns the smallest discrete-equilibrium entry produced (``inf`` when
    ``tau`` is infinite and nothing is computed).
    """
    alpha = relaxation_weight(dt, tau)
    if alpha == 1.0:
        return math.inf
    vg = field.vgrid
    vals = field._values4()
    offs = field._offsets3()
    cells = vals.shape[1:]
    U = np.empty((vg.d + 2,) + cells)
    _kernels.gather_moments(vals, offs, vg.nodes, vg.cell_volume, U)
    factors = np.empty((vg.d, vg.K) + cells)
    pref = np.empty(cells)
    lam = np.empty_like(U)
    status, cell = _kernels.equilibrium_params(
        U, vg.axis_values, vg.cell_volume, factors, pref, lam
    )
    if status != _kernels.OK:
        where = tuple(int(i) for i in np.unravel_index(cell, cells)[3 - field.sgrid.ndim :])
        if status == _kernels.VACUUM:
            raise VacuumError(f"vacuum/negative density at cell {where}")
        raise ColdStateError(f"non-positive temperature at cell {where}")
    return _kernels.relax_write(
        vals, offs, vg.axis_index, factors, pref, lam, proj.P, alpha
    )


def step_first_order(field, dt, tau, proj) -> float:
    transport_exact(field, dt)
    return relax_field(field, dt, tau, proj)


# -- time integration -------------------------------------------------------


@dataclass
class SolverConfig:
    tau: float
    tfinal: float
    safety: float = 0.95
    order: int = 1
    dt: Optional[float] = None

    def __post_init__(self):
        if self.tau < 0:
            raise ValueError(f"tau must be >= 0, got {self.tau}")
        if not self.tfinal > 0:
            raise ValueError(f"tfinal must be > 0, got {self.tfinal}")
        if not 0 < self.safety <= 1:
            raise ValueError(f"safety must be in (0, 1], got {self.safety}")
        if self.order not in (1, 2):
            raise ValueError(f"order must be 1 or 2, got {self.order}")
        if self.dt is not None and not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")


def time_steps(tfinal: float, dt: float) -> np.ndarray:
    """Constant steps ``dt`` with the last one truncated to land on ``tfinal``."""
    n = max(1, math.ceil(tfinal / dt * (1 - 1e-12)))
    steps = np.full(n, dt)
    steps[-1] = tfinal - (n - 1) * dt
    return steps


@dataclass
class SplittingResult:
    field: DistributionField
    ncycle: int
    timings: dict
    dt: float
    min_equilibrium: float = math.inf
    history: list = field(default_factory=list)


def run_splitting(
    field: DistributionField,
    config: SolverConfig,
    proj: ProjectionOperator,
    on_cycle: Optional[Callable] = None,
) -> SplittingResult:
    """Integrate to ``config.tfinal`` with first- or second-order splitting.

    Order 2 starts with a half transport, alternates relaxation with full
    transports, and closes with a half transport.  ``on_cycle(field, n,
    min_eq)`` is called after each cycle; its time is not charged to either
    stage.
    """
    sg = field.sgrid
    dt = config.dt or cfl_time_step(field.vgrid, sg.dx, config.safety, sg.ndim)
    steps = time_steps(config.tfinal, dt)
    timings = {"transport": 0.0, "relax": 0.0}
    emin = math.inf
    clock = time.perf_counter

    def transport(h):
        t0 = clock()
        transport_exact(field, h)
        timings["transport"] += clock() - t0

    if config.order == 2:
        transport(0.5 * steps[0])
    for n, h in enumerate(steps):
        if config.order == 1:
            transport(h)
        t0 = clock()
        e = relax_field(field, h, config.tau, proj)
        timings["relax"] += clock() - t0
        emin = min(emin, e)
        if config.order == 2:
            nxt = steps[n + 1] if n + 1 < len(steps) else 0.0
            transport(0.5 * (h + nxt))
        if on_cycle is not None:
            on_cycle(field, n + 1, e)
    return SplittingResult(field, len(steps), timings, dt, emin)


def macro_fields(field: DistributionField):
    """``(rho, u, theta)`` per cell from the shifted profiles."""
    return primitives(cell_moments(field), field.vgrid.d)
