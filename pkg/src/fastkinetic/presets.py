"""Named test problems: Sod tubes in 1-3D, homogeneous relaxation, a smooth wave."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .equilibrium import ProjectionOperator, build_projection
from .grids import SpatialGrid, VelocityGrid, build_velocity_grid
from .reference import EulerState
from .solver import DistributionField, SolverConfig, init_field

# left/right Sod states as (rho, u, theta)
SOD_LEFT = (1.0, 0.0, 5.0)
SOD_RIGHT = (0.125, 0.0, 4.0)


def maxwellian_mixture(components):
    """Sampler for a sum of Maxwellians ``[(rho(x), u(x)[d], theta(x)), ...]``."""

    def sample(x, v):
        out = 0.0
        for rho_fn, u_fn, th_fn in components:
            rho, u, th = rho_fn(x), u_fn(x), th_fn(x)
            d = v.shape[1]
            c2 = np.sum((v[:, :, None] - u[None, :, :]) ** 2, axis=1)
            out = out + rho / (2 * np.pi * th) ** (d / 2) * np.exp(-c2 / (2 * th))
        return out

    return sample


@dataclass(frozen=True)
class Preset:
    name: str
    d: int
    nx: int
    nv: int
    vmin: float
    vmax: float
    tau: float
    tfinal: float
    boundary: str
    length: float = 1.0
    order: int = 1
    dt_cells: Optional[float] = None
    description: str = ""

    def spatial_shape(self, nx: int) -> tuple:
        return {
            "sod1d": (nx,),
            "sod2d": (nx, max(1, nx // 2)),
            "sod3d": (nx, nx, nx),
            "sod1d-in-3d": (nx, 2, 2),
            "homogeneous-relax": (1,),
            "smooth-periodic": (nx,),
        }[self.name]

    def primitives(self, x: np.ndarray, doubled: bool = False):
        """``(rho, u[d], theta)`` of the initial state at centres ``x``."""
        n = len(x)
        if self.name in ("sod1d", "sod1d-in-3d"):
            s = x[:, 0]
            if doubled:
                s = np.where(s > 1.0, 2.0 - s, s)
            left = s <= 0.5
        elif self.name == "sod2d":
            left = (x[:, 0] - 1.0) ** 2 + (x[:, 1] - 1.0) ** 2 <= 0.2**2
        elif self.name == "sod3d":
            left = np.sum(x**2, axis=1) <= 0.25
        elif self.name == "homogeneous-relax":
            # moments of the two-beam datum below
            return np.ones(n), np.zeros((self.d, n)), np.full(n, 1.0 + 4.0)
        elif self.name == "smooth-periodic":
            s = 2 * np.pi * x[:, 0] / self.length
            return 1.0 + 0.2 * np.sin(s), np.zeros((self.d, n)), 1.0 + 0.1 * np.cos(s)
        else:
            raise KeyError(self.name)
        rho = np.where(left, SOD_LEFT[0], SOD_RIGHT[0])
        th = np.where(left, SOD_LEFT[2], SOD_RIGHT[2])
        return rho, np.zeros((self.d, n)), th

    def target_moments(self, x, doubled=False):
        rho, u, th = self.primitives(x, doubled)
        return np.vstack([rho, rho * u, 0.5 * rho * np.sum(u * u, axis=0) + 0.5 * self.d * rho * th])

    def sampler(self, doubled=False) -> Callable:
        if self.name == "homogeneous-relax":
            d = self.d
            half = lambda x: np.full(len(x), 0.5)  # noqa: E731
            beam = lambda s: (lambda x: np.full((d, len(x)), s))  # noqa: E731
            one = lambda x: np.ones(len(x))  # noqa: E731
            return maxwellian_mixture([(half, beam(2.0), one), (half, beam(-2.0), one)])
        prim = lambda x: self.primitives(x, doubled)  # noqa: E731
        return maxwellian_mixture(
            [(lambda x: prim(x)[0], lambda x: prim(x)[1], lambda x: prim(x)[2])]
        )

    def euler_states(self):
        """Left/right Riemann data for the 1-D Sod presets."""
        if self.name not in ("sod1d", "sod1d-in-3d"):
            return None
        return tuple(
            EulerState.for_dimension(rho, u, rho * th, self.d) for rho, u, th in (SOD_LEFT, SOD_RIGHT)
        )


PRESETS = {
    p.name: p
    for p in (
        Preset("sod1d", 1, 300, 100, -15.0, 15.0, 1e-2, 0.05, "clamp",
               description="1D/1D Sod tube on [0,1]"),
        Preset("sod2d", 2, 50, 20, -15.0, 15.0, 0.0, 0.07, "clamp", length=2.0,
               description="2D/2D Sod: disk of radius 0.2 at (1,1) on [0,2]x[0,1]"),
        Preset("sod3d", 3, 25, 12, -10.0, 10.0, 0.0, 0.1, "reflect",
               description="3D/3D spherical Sod, radius 1/2 about the origin corner"),
        Preset("sod1d-in-3d", 3, 50, 13, -15.0, 15.0, 0.0, 0.1, "reflect",
               description="1D Sod on Nx x 2 x 2 cells with 3D velocities"),
        Preset("homogeneous-relax", 1, 1, 100, -15.0, 15.0, 0.1, 1.0, "periodic",
               dt_cells=None, description="single-cell relaxation of two beams u=+-2"),
        Preset("smooth-periodic", 1, 400, 21, -6.0, 6.0, 0.5, 0.4, "periodic",
               dt_cells=16.0, description="smooth density/temperature wave, lattice-aligned steps"),
    )
}


@dataclass
class Problem:
    """Grids, solver configuration and initial datum of one run."""

    preset: Preset
    sgrid: SpatialGrid
    vgrid: VelocityGrid
    config: SolverConfig
    doubled: bool = False

    def projection(self) -> ProjectionOperator:
        return build_projection(self.vgrid)

    def initial_field(self, proj: Optional[ProjectionOperator] = None) -> DistributionField:
        proj = proj or self.projection()
        return init_field(
            self.preset.sampler(self.doubled),
            self.sgrid,
            self.vgrid,
            proj,
            lambda x: self.preset.target_moments(x, self.doubled),
        )


def build_problem(
    name: str,
    nx=None,
    nv=None,
    vmin=None,
    vmax=None,
    tau=None,
    tfinal=None,
    safety: float = 0.95,
    order=None,
    boundary=None,
    dt=None,
    shape=None,
) -> Problem:
    """Instantiate a preset, overriding any of its defaults.

    A periodic ``sod1d``/``sod1d-in-3d`` run uses the mirrored tube on a
    doubled domain so that the two halves meet in equal states.
    ``shape`` replaces the preset's cell layout (same ``dx``).
    """
    try:
        p = PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    overrides = {k: v for k, v in dict(nx=nx, nv=nv, vmin=vmin, vmax=vmax, tau=tau,
                                       tfinal=tfinal, order=order, boundary=boundary).items()
                 if v is not None}
    p = replace(p, **overrides)
    vgrid = build_velocity_grid(p.d, p.nv, p.vmin, p.vmax)
    cells = p.spatial_shape(p.nx) if shape is None else tuple(shape)
    if p.name == "homogeneous-relax":
        dx = 1.0
    else:
        dx = p.length / p.nx
    doubled = p.boundary == "periodic" and p.name in ("sod1d", "sod1d-in-3d")
    if doubled:
        cells = (2 * cells[0],) + cells[1:]
    kinds = p.boundary
    if p.name == "sod1d-in-3d" and len(cells) > 1:
        # ignorable directions wrap, so uniform columns stay exactly uniform
        kinds = (p.boundary,) + ("periodic",) * (len(cells) - 1)
    sgrid = SpatialGrid(cells, dx, boundary=kinds)
    if dt is None and p.name == "homogeneous-relax":
        dt = 0.01
    if dt is None and p.dt_cells is not None:
        dt = p.dt_cells * dx / vgrid.dv
    config = SolverConfig(p.tau, p.tfinal, safety, p.order, dt)
    return Problem(p, sgrid, vgrid, config, doubled)
