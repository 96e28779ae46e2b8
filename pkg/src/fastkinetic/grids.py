"""Velocity and physical-space grids, the CFL rule and shift offsets."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

BOUNDARIES = ("periodic", "clamp", "reflect")


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class VelocityGrid:
    """Tensor Cartesian velocity set with K points per axis on [vmin, vmax].

    Nodes are enumerated lexicographically with the first axis slowest,
    i.e. node ``k`` has axis indices ``np.unravel_index(k, (K,) * d)``.
    """

    d: int
    K: int
    vmin: float
    vmax: float
    dv: float = field(init=False)
    axis_values: np.ndarray = field(init=False, repr=False)
    axis_index: np.ndarray = field(init=False, repr=False)
    nodes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not 1 <= self.d <= 3:
            raise GridError(f"velocity dimension must be 1..3, got {self.d}")
        if self.K < 2:
            raise GridError(f"need at least 2 points per axis, got K={self.K}")
        if not self.vmax > self.vmin:
            raise GridError(f"vmax ({self.vmax}) must exceed vmin ({self.vmin})")
        if self.K**self.d < self.d + 2:
            raise GridError(
                f"K^d = {self.K ** self.d} velocity nodes cannot carry "
                f"{self.d + 2} conserved moments"
            )
        axis = np.linspace(self.vmin, self.vmax, self.K)
        if self.vmin == -self.vmax:
            # exact mirror pairs, needed by reflecting walls
            axis = 0.5 * (axis - axis[::-1])
        index = np.stack(
            np.unravel_index(np.arange(self.K**self.d), (self.K,) * self.d), axis=1
        )
        object.__setattr__(self, "dv", (self.vmax - self.vmin) / (self.K - 1))
        object.__setattr__(self, "axis_values", axis)
        object.__setattr__(self, "axis_index", index)
        object.__setattr__(self, "nodes", axis[index])
        for arr in (axis, index, self.nodes):
            arr.flags.writeable = False

    @property
    def N(self) -> int:
        return self.K**self.d

    @property
    def cell_volume(self) -> float:
        """Quadrature weight dv**d shared by every node."""
        return self.dv**self.d

    @property
    def symmetric(self) -> bool:
        return self.vmin == -self.vmax

    def mirror_nodes(self, axis: int) -> np.ndarray:
        """Index of the node with velocity component ``axis`` negated."""
        idx = self.axis_index.copy()
        idx[:, axis] = self.K - 1 - idx[:, axis]
        return np.ravel_multi_index(tuple(idx.T), (self.K,) * self.d)

    @property
    def max_speed(self) -> float:
        """Largest per-axis velocity component magnitude."""
        return max(abs(self.vmin), abs(self.vmax))


def build_velocity_grid(d: int, K: int, vmin: float, vmax: float) -> VelocityGrid:
    return VelocityGrid(int(d), int(K), float(vmin), float(vmax))


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform cell-centred mesh; cell ``j`` has centre ``j * dx + origin``.

    ``shape`` may have fewer axes than the velocity grid has components:
    velocity components beyond ``len(shape)`` are carried but never transported.
    ``boundary`` is one kind for every axis or a tuple with one kind per axis.
    """

    shape: tuple
    dx: float
    origin: tuple = None
    boundary: str | tuple = "periodic"

    def __post_init__(self):
        shape = tuple(int(n) for n in self.shape)
        if not 1 <= len(shape) <= 3:
            raise GridError(f"spatial dimension must be 1..3, got {len(shape)}")
        if any(n < 1 for n in shape):
            raise GridError(f"cell counts must be positive, got {shape}")
        if not self.dx > 0:
            raise GridError(f"dx must be positive, got {self.dx}")
        kinds = (self.boundary,) * len(shape) if isinstance(self.boundary, str) else tuple(self.boundary)
        if len(kinds) != len(shape) or any(b not in BOUNDARIES for b in kinds):
            raise GridError(f"boundary must be one of {BOUNDARIES} per axis, got {self.boundary!r}")
        if len(set(kinds)) == 1:
            kinds = kinds[0]
        origin = self.origin
        if origin is None:
            origin = (0.5 * self.dx,) * len(shape)
        elif np.isscalar(origin):
            origin = (float(origin),) * len(shape)
        origin = tuple(float(o) for o in origin)
        if len(origin) != len(shape):
            raise GridError("origin must have one entry per spatial axis")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "dx", float(self.dx))
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "boundary", kinds)

    @property
    def ndim(self) -> int:
        return len(self.shape)

    @property
    def axis_boundaries(self) -> tuple:
        if isinstance(self.boundary, str):
            return (self.boundary,) * self.ndim
        return self.boundary

    def axes_with(self, kind: str) -> list:
        return [a for a, b in enumerate(self.axis_boundaries) if b == kind]

    @property
    def n_cells(self) -> int:
        return int(np.prod(self.shape))

    @property
    def cell_volume(self) -> float:
        return self.dx**self.ndim

    def axis_centers(self, axis: int) -> np.ndarray:
        return np.arange(self.shape[axis]) * self.dx + self.origin[axis]

    def cell_centers(self) -> np.ndarray:
        """Cell centres as an array of shape ``shape + (ndim,)``."""
        axes = [self.axis_centers(a) for a in range(self.ndim)]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)


def cfl_time_step(vgrid: VelocityGrid, dx: float, safety: float = 0.95, ndim=None) -> float:
    """Time step ``safety * dx / vref``.

    ``vref`` is the largest velocity component over the first ``ndim``
    (transported) axes, not the Euclidean node speed.
    """
    if not 0 < safety <= 1:
        raise GridError(f"CFL safety must be in (0, 1], got {safety}")
    if not dx > 0:
        raise GridError(f"dx must be positive, got {dx}")
    ndim = vgrid.d if ndim is None else ndim
    vref = float(np.max(np.abs(vgrid.nodes[:, :ndim])))
    if vref == 0.0:
        raise GridError("all velocity nodes are at rest; no CFL constraint")
    return safety * dx / vref


def shift_offset(s, dx: float):
    """Integer cell offset ``floor(s/dx + 1/2)`` of a cumulative displacement."""
    m = np.floor(np.asarray(s, dtype=float) / dx + 0.5).astype(np.int64)
    return m if m.ndim else int(m)
