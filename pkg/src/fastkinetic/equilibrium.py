"""Discrete moments, Maxwellians and the conservative L2 projection.

The projection enforces ``C f = U`` for the collision invariants
``(1, v, |v|^2 / 2)`` sampled on the velocity grid::

    f = f_tilde + C^T (C C^T)^{-1} (U - C f_tilde)

``C`` and ``P = C^T (C C^T)^{-1}`` depend only on the velocity grid and are
built once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grids import VelocityGrid

_EPS = np.finfo(float).eps


class VacuumError(ValueError):
    """Raised when a cell has non-positive density."""


class ColdStateError(ValueError):
    """Raised when a Maxwellian is requested at zero temperature."""


class DegenerateGridError(ValueError):
    pass


@dataclass(frozen=True)
class ConservedState:
    """Conserved moments ``(rho, rho u, E)`` of one cell."""

    rho: float
    mom: np.ndarray
    E: float

    @classmethod
    def from_primitive(cls, rho, u, theta) -> "ConservedState":
        u = np.atleast_1d(np.asarray(u, dtype=float))
        d = u.size
        return cls(float(rho), rho * u, 0.5 * rho * float(u @ u) + 0.5 * d * rho * theta)

    @classmethod
    def from_vector(cls, U) -> "ConservedState":
        U = np.asarray(U, dtype=float)
        return cls(float(U[0]), U[1:-1].copy(), float(U[-1]))

    def __post_init__(self):
        object.__setattr__(self, "mom", np.atleast_1d(np.asarray(self.mom, dtype=float)))

    @property
    def d(self) -> int:
        return self.mom.size

    @property
    def u(self) -> np.ndarray:
        return self.mom / self.rho

    @property
    def theta(self) -> float:
        return (2.0 * self.E - float(self.mom @ self.mom) / self.rho) / (self.d * self.rho)

    @property
    def internal_energy(self) -> float:
        return self.E - 0.5 * float(self.mom @ self.mom) / self.rho

    def as_vector(self) -> np.ndarray:
        return np.concatenate(([self.rho], self.mom, [self.E]))


def primitives(U: np.ndarray, d: int):
    """Map stacked conserved moments ``U[r, ...]`` to ``(rho, u, theta)``."""
    U = np.asarray(U, dtype=float)
    rho = U[0]
    u = U[1 : d + 1] / rho
    theta = (2.0 * U[d + 1] - rho * np.sum(u * u, axis=0)) / (d * rho)
    return rho, u, theta


def moment_matrix(nodes: np.ndarray, dv: float) -> np.ndarray:
    """Rows ``(1, v, |v|^2/2) * dv**d`` evaluated at each node."""
    nodes = np.asarray(nodes, dtype=float)
    if nodes.ndim == 1:
        nodes = nodes[:, None]
    w = dv ** nodes.shape[1]
    return np.vstack(
        [np.ones(len(nodes)), nodes.T, 0.5 * np.sum(nodes**2, axis=1)]
    ) * w


def compute_moments(fcell, vgrid: VelocityGrid) -> ConservedState:
    fcell = np.asarray(fcell, dtype=float)
    if fcell.shape != (vgrid.N,):
        raise ValueError(f"expected {vgrid.N} node values, got shape {fcell.shape}")
    w = vgrid.cell_volume
    v = vgrid.nodes
    rho = float(np.sum(fcell)) * w
    if not rho > 0:
        raise VacuumError(f"vacuum/negative density: rho = {rho}")
    mom = (v.T @ fcell) * w
    E = 0.5 * float(np.sum(v**2, axis=1) @ fcell) * w
    return ConservedState(rho, mom, E)


def maxwellian(state: ConservedState, vgrid: VelocityGrid) -> np.ndarray:
    """Pointwise Maxwellian ``rho (2 pi theta)^{-d/2} exp(-|v-u|^2 / 2 theta)``."""
    if not state.rho > 0:
        raise VacuumError(f"vacuum/negative density: rho = {state.rho}")
    theta = state.theta
    if not theta > 0:
        raise ColdStateError(f"cold state (theta = {theta}); no pointwise Maxwellian")
    d = vgrid.d
    c2 = np.sum((vgrid.nodes - state.u) ** 2, axis=1)
    return state.rho / (2.0 * np.pi * theta) ** (d / 2) * np.exp(-c2 / (2.0 * theta))


@dataclass(frozen=True)
class ProjectionOperator:
    """Moment matrix ``C`` and correction matrix ``P = C^T (C C^T)^{-1}``."""

    C: np.ndarray
    P: np.ndarray

    @classmethod
    def from_nodes(cls, nodes, dv: float, max_cond: float = 1e12) -> "ProjectionOperator":
        C = moment_matrix(nodes, dv)
        G = C @ C.T
        cond = np.linalg.cond(G)
        if not np.isfinite(cond) or cond > max_cond:
            raise DegenerateGridError(
                f"degenerate velocity grid: cond(C C^T) = {cond:.3e}"
            )
        L = np.linalg.cholesky(G)
        Y = np.linalg.solve(L, C)
        P = np.linalg.solve(L.T, Y).T
        C.flags.writeable = False
        P.flags.writeable = False
        return cls(C, P)

    @property
    def n_moments(self) -> int:
        return self.C.shape[0]

    def moments(self, f: np.ndarray) -> np.ndarray:
        """``C f`` for ``f`` of shape ``(N, ...)``."""
        return np.tensordot(self.C, f, axes=1)

    def project(self, ftilde: np.ndarray, U: np.ndarray) -> np.ndarray:
        """L2-closest vector to ``ftilde`` with moments ``U``.

        Works column-wise on stacked input ``ftilde[N, ...]`` / ``U[d+2, ...]``.
        Residual components at the rounding level of evaluating ``C ftilde``
        are treated as zero, so already moment-exact input is returned as is
        and a second call on the output changes nothing.
        """
        if isinstance(U, ConservedState):
            U = U.as_vector()
        ftilde = np.asarray(ftilde, dtype=float)
        U = np.asarray(U, dtype=float)
        f = ftilde.copy()
        # one refinement sweep recovers what cancellation loses when C f_tilde >> U
        for _ in range(2):
            resid = self._residual(f, U)
            if not np.any(resid):
                break
            f += np.tensordot(self.P, resid, axes=1)
        return f

    def _residual(self, f, U):
        resid = U - self.moments(f)
        bound = 4 * f.shape[0] * _EPS * (np.tensordot(np.abs(self.C), np.abs(f), axes=1) + np.abs(U))
        return np.where(np.abs(resid) <= bound, 0.0, resid)


def build_projection(vgrid: VelocityGrid) -> ProjectionOperator:
    return ProjectionOperator.from_nodes(vgrid.nodes, vgrid.dv)


def project_conserve(ftilde, U, proj: ProjectionOperator) -> np.ndarray:
    if isinstance(U, ConservedState):
        U = U.as_vector()
    return proj.project(ftilde, U)


def discrete_equilibrium(U, vgrid: VelocityGrid, proj: ProjectionOperator) -> np.ndarray:
    """Maxwellian corrected to carry exactly the moments ``U``.

    Entries may come out slightly negative at tail nodes; they are kept.
    """
    state = U if isinstance(U, ConservedState) else ConservedState.from_vector(U)
    return proj.project(maxwellian(state, vgrid), state.as_vector())
