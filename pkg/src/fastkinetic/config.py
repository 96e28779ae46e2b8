"""Run configuration from command-line flags and ``key = value`` files."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Optional

from .grids import BOUNDARIES
from .presets import PRESETS, Problem, build_problem


class ConfigError(ValueError):
    """Invalid or conflicting configuration; ``key`` names the offender."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


def _tau(s):
    v = float(s)
    if math.isnan(v):
        raise ValueError("nan")
    return v


# key -> converter
KEYS = {
    "preset": str,
    "nx": int,
    "nv": int,
    "vmin": float,
    "vmax": float,
    "tau": _tau,
    "tfinal": float,
    "cfl": float,
    "order": int,
    "bc": str,
    "dt": float,
    "out": str,
    "format": str,
    "ref": str,
    "report": str,
    "ledger": str,
}


@dataclass
class RunConfig:
    preset: str = "sod1d"
    nx: Optional[int] = None
    nv: Optional[int] = None
    vmin: Optional[float] = None
    vmax: Optional[float] = None
    tau: Optional[float] = None
    tfinal: Optional[float] = None
    cfl: float = 0.95
    order: Optional[int] = None
    bc: Optional[str] = None
    dt: Optional[float] = None
    out: Optional[str] = None
    format: str = "csv"
    ref: str = "none"
    report: Optional[str] = None
    ledger: Optional[str] = None

    def resolved(self, key):
        """Value of a grid/solver key after falling back to the preset default."""
        own = getattr(self, key)
        if own is not None:
            return own
        p = PRESETS[self.preset]
        return {"nx": p.nx, "nv": p.nv, "vmin": p.vmin, "vmax": p.vmax, "tau": p.tau,
                "tfinal": p.tfinal, "order": p.order, "bc": p.boundary}[key]

    def validate(self) -> "RunConfig":
        if self.preset not in PRESETS:
            raise ConfigError("preset", f"unknown preset {self.preset!r}; choose from {sorted(PRESETS)}")
        p = PRESETS[self.preset]
        nx, nv = self.resolved("nx"), self.resolved("nv")
        if nx < 1:
            raise ConfigError("nx", f"must be >= 1, got {nx}")
        if nv < 2:
            raise ConfigError("nv", f"must be >= 2, got {nv}")
        if not self.resolved("vmax") > self.resolved("vmin"):
            raise ConfigError("vmin", "vmin must be smaller than vmax")
        if not self.resolved("tau") >= 0:
            raise ConfigError("tau", "must be >= 0 (inf for free transport)")
        if not self.resolved("tfinal") > 0:
            raise ConfigError("tfinal", "must be > 0")
        if not 0 < self.cfl <= 1:
            raise ConfigError("cfl", f"safety must be in (0, 1], got {self.cfl}")
        if self.resolved("order") not in (1, 2):
            raise ConfigError("order", "must be 1 or 2")
        if self.resolved("bc") not in BOUNDARIES:
            raise ConfigError("bc", f"must be one of {BOUNDARIES}")
        if self.dt is not None and not self.dt > 0:
            raise ConfigError("dt", "must be > 0")
        if self.format not in ("csv", "vtk"):
            raise ConfigError("format", "must be csv or vtk")
        if self.format == "vtk" and len(p.spatial_shape(nx)) != 3:
            raise ConfigError("format", f"vtk output needs a 3-D preset, {self.preset} is not")
        if self.ref not in ("riemann", "upwind", "none"):
            raise ConfigError("ref", "must be riemann, upwind or none")
        if self.ref == "riemann" and p.euler_states() is None:
            raise ConfigError("ref", f"no Riemann reference for preset {self.preset}")
        if self.ref == "upwind" and len(p.spatial_shape(nx)) != 1:
            raise ConfigError("ref", "the upwind reference is 1-D only")
        return self

    def problem(self) -> Problem:
        return build_problem(
            self.preset, nx=self.nx, nv=self.nv, vmin=self.vmin, vmax=self.vmax,
            tau=self.tau, tfinal=self.tfinal, safety=self.cfl, order=self.order,
            boundary=self.bc, dt=self.dt,
        )


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}", f"expected 'key = value', got {raw.strip()!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in KEYS:
                raise ConfigError(key, "unknown key")
            out[key] = value
    return out


def make_config(values: dict) -> RunConfig:
    """Convert raw (string or typed) values and validate."""
    names = {f.name for f in fields(RunConfig)}
    kw = {}
    for key, value in values.items():
        if key not in names:
            raise ConfigError(key, "unknown key")
        if value is None:
            continue
        try:
            kw[key] = KEYS[key](value)
        except (TypeError, ValueError):
            raise ConfigError(key, f"invalid value {value!r}") from None
    return RunConfig(**kw).validate()
