"""Reference solutions: first-order upwind DVM and the exact Euler Riemann solver."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .equilibrium import ProjectionOperator
from .solver import DistributionField, relax_field


class CFLViolation(ValueError):
    pass


class RiemannVacuumError(ValueError):
    pass


def upwind_dvm_step(
    field: DistributionField, dt: float, tau: float, proj: ProjectionOperator
) -> float:
    """One upwind transport step on cell-aligned values, then BGK relaxation.

    ``field`` must carry zero shifts; its values are read as cell averages.
    Returns the smallest equilibrium entry of the relaxation.
    """
    sg = field.sgrid
    if sg.ndim != 1:
        raise ValueError("upwind reference is 1-D only")
    if np.any(field.shift):
        raise ValueError("upwind reference expects an unshifted field")
    v = field.velocities[:, 0]
    nu = v * dt / sg.dx
    if np.max(np.abs(nu)) > 1 + 1e-12:
        raise CFLViolation(f"Courant number {np.max(np.abs(nu)):.4f} exceeds 1")
    f = field.values
    if sg.axis_boundaries[0] == "periodic":
        left = np.roll(f, 1, axis=1)
        right = np.roll(f, -1, axis=1)
    else:
        left = np.concatenate([f[:, :1], f[:, :-1]], axis=1)
        right = np.concatenate([f[:, 1:], f[:, -1:]], axis=1)
    pos = np.maximum(nu, 0)[:, None]
    neg = np.minimum(nu, 0)[:, None]
    f -= pos * (f - left) + neg * (right - f)
    return relax_field(field, dt, tau, proj)


def run_upwind(field: DistributionField, steps, tau: float, proj: ProjectionOperator) -> DistributionField:
    for h in steps:
        upwind_dvm_step(field, h, tau, proj)
    return field


# -- exact Riemann solver ---------------------------------------------------


@dataclass(frozen=True)
class EulerState:
    """Primitive state ``(rho, u, p)`` of the Euler limit, ``gamma = (d+2)/d``."""

    rho: np.ndarray
    u: np.ndarray
    p: np.ndarray
    gamma: float

    @classmethod
    def for_dimension(cls, rho, u, p, d: int) -> "EulerState":
        return cls(rho, u, p, (d + 2.0) / d)

    @property
    def theta(self):
        return np.asarray(self.p) / np.asarray(self.rho)

    @property
    def sound_speed(self):
        return np.sqrt(self.gamma * np.asarray(self.p) / np.asarray(self.rho))


def star_state(left: EulerState, right: EulerState, tol: float = 1e-12, maxiter: int = 100):
    """Pressure and velocity between the outer waves (Newton on the pressure function)."""
    g = left.gamma
    rl, ul, pl = float(left.rho), float(left.u), float(left.p)
    rr, ur, pr = float(right.rho), float(right.u), float(right.p)
    if min(rl, rr) <= 0 or min(pl, pr) < 0:
        raise ValueError("densities must be positive and pressures nonnegative")
    cl = np.sqrt(g * pl / rl)
    cr = np.sqrt(g * pr / rr)
    if 2.0 * (cl + cr) / (g - 1.0) <= ur - ul:
        raise RiemannVacuumError("initial data generate vacuum")
    # two-rarefaction guess
    z = (g - 1.0) / (2.0 * g)
    p = ((cl + cr - 0.5 * (g - 1.0) * (ur - ul)) / (cl / pl**z + cr / pr**z)) ** (1.0 / z)
    p = max(p, 1e-14)
    for _ in range(maxiter):
        fl, dl = _fk(p, rl, pl, g)
        fr, dr = _fk(p, rr, pr, g)
        res = fl + fr + ur - ul
        p_new = max(p - res / (dl + dr), 1e-14 * p)
        if abs(res) <= tol * max(1.0, abs(ur - ul) + cl + cr):
            break
        p = p_new
    fl, _ = _fk(p, rl, pl, g)
    fr, _ = _fk(p, rr, pr, g)
    return p, 0.5 * (ul + ur) + 0.5 * (fr - fl)


def _fk(p, rho, pk, gamma):
    c = np.sqrt(gamma * pk / rho)
    if p > pk:
        A = 2.0 / ((gamma + 1.0) * rho)
        B = (gamma - 1.0) / (gamma + 1.0) * pk
        s = np.sqrt(A / (p + B))
        return (p - pk) * s, s * (1.0 - 0.5 * (p - pk) / (B + p))
    r = (p / pk) ** ((gamma - 1.0) / (2.0 * gamma))
    return 2.0 * c / (gamma - 1.0) * (r - 1.0), r / (rho * c) * (pk / p)


def exact_riemann(left: EulerState, right: EulerState, xi) -> EulerState:
    """Self-similar solution of the 1-D Euler Riemann problem at ``xi = x/t``."""
    g = left.gamma
    xi = np.asarray(xi, dtype=float)
    rl, ul, pl = float(left.rho), float(left.u), float(left.p)
    rr, ur, pr = float(right.rho), float(right.u), float(right.p)
    ps, us = star_state(left, right)
    cl = np.sqrt(g * pl / rl)
    cr = np.sqrt(g * pr / rr)
    gm = (g - 1.0) / (g + 1.0)

    rho = np.empty_like(xi)
    u = np.empty_like(xi)
    p = np.empty_like(xi)

    # left of the contact
    L = xi <= us
    if ps > pl:
        rsl = rl * (ps / pl + gm) / (gm * ps / pl + 1.0)
        sl = ul - cl * np.sqrt((g + 1.0) / (2.0 * g) * ps / pl + (g - 1.0) / (2.0 * g))
        outer = L & (xi < sl)
        star = L & (xi >= sl)
        fan = np.zeros_like(L)
    else:
        rsl = rl * (ps / pl) ** (1.0 / g)
        csl = cl * (ps / pl) ** ((g - 1.0) / (2.0 * g))
        head, tail = ul - cl, us - csl
        outer = L & (xi < head)
        star = L & (xi >= tail)
        fan = L & (xi >= head) & (xi < tail)
        c = 2.0 / (g + 1.0) * (cl + 0.5 * (g - 1.0) * (ul - xi[fan]))
        rho[fan] = rl * (c / cl) ** (2.0 / (g - 1.0))
        u[fan] = 2.0 / (g + 1.0) * (cl + 0.5 * (g - 1.0) * ul + xi[fan])
        p[fan] = pl * (c / cl) ** (2.0 * g / (g - 1.0))
    rho[outer], u[outer], p[outer] = rl, ul, pl
    rho[star], u[star], p[star] = rsl, us, ps

    R = ~L
    if ps > pr:
        rsr = rr * (ps / pr + gm) / (gm * ps / pr + 1.0)
        sr = ur + cr * np.sqrt((g + 1.0) / (2.0 * g) * ps / pr + (g - 1.0) / (2.0 * g))
        outer = R & (xi > sr)
        star = R & (xi <= sr)
    else:
        rsr = rr * (ps / pr) ** (1.0 / g)
        csr = cr * (ps / pr) ** ((g - 1.0) / (2.0 * g))
        head, tail = ur + cr, us + csr
        outer = R & (xi > head)
        star = R & (xi <= tail)
        fan = R & (xi > tail) & (xi <= head)
        c = 2.0 / (g + 1.0) * (cr - 0.5 * (g - 1.0) * (ur - xi[fan]))
        rho[fan] = rr * (c / cr) ** (2.0 / (g - 1.0))
        u[fan] = 2.0 / (g + 1.0) * (-cr + 0.5 * (g - 1.0) * ur + xi[fan])
        p[fan] = pr * (c / cr) ** (2.0 * g / (g - 1.0))
    rho[outer], u[outer], p[outer] = rr, ur, pr
    rho[star], u[star], p[star] = rsr, us, ps
    return EulerState(rho, u, p, g)


def wave_speeds(left: EulerState, right: EulerState) -> dict:
    """Characteristic speeds bounding each wave of the solution."""
    g = left.gamma
    ps, us = star_state(left, right)
    out = {"contact": us}
    for side, st, sgn in (("left", left, -1.0), ("right", right, 1.0)):
        rho, u, p = float(st.rho), float(st.u), float(st.p)
        c = np.sqrt(g * p / rho)
        if ps > p:
            s = u + sgn * c * np.sqrt((g + 1.0) / (2.0 * g) * ps / p + (g - 1.0) / (2.0 * g))
            out[side] = (s, s)
        else:
            cs = c * (ps / p) ** ((g - 1.0) / (2.0 * g))
            out[side] = (u + sgn * c, us + sgn * cs)
    return out


def sod_profile(left: EulerState, right: EulerState, x, t: float, x0: float = 0.5):
    """``(rho, u, theta)`` of the Riemann solution at positions ``x`` and time ``t``."""
    x = np.asarray(x, dtype=float)
    if t == 0:
        L = x <= x0
        rho = np.where(L, left.rho, right.rho).astype(float)
        u = np.where(L, left.u, right.u).astype(float)
        p = np.where(L, left.p, right.p).astype(float)
        return rho, u, p / rho
    s = exact_riemann(left, right, (x - x0) / t)
    return s.rho, s.u, s.p / s.rho
