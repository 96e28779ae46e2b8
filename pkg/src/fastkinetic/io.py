"""Field writers: flat CSV for line plots and legacy ASCII VTK for 3-D views."""

from __future__ import annotations

import numpy as np

from .diagnostics import MomentSet
from .grids import SpatialGrid


def _fmt(x) -> str:
    # 17 significant digits round-trips every double
    return f"{float(x):.17g}"


def write_fields_csv(moments: MomentSet, sgrid: SpatialGrid, path) -> int:
    """One row per cell in lexicographic order; returns the number of rows."""
    nd = sgrid.ndim
    d = moments.d
    header = list("xyz"[:nd]) + ["rho"] + [f"u{c}" for c in "xyz"[:d]] + ["theta", "pressure"]
    x = sgrid.cell_centers().reshape(-1, nd)
    cols = [moments.rho.reshape(-1)]
    cols += [u.reshape(-1) for u in moments.u]
    cols += [moments.theta.reshape(-1), moments.pressure.reshape(-1)]
    data = np.column_stack([x] + cols)
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in data:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    return len(data)


def read_fields_csv(path):
    """Inverse of :func:`write_fields_csv`: ``(header, data)``."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        rows = [[float(v) for v in line.split(",")] for line in fh if line.strip()]
    return header, np.asarray(rows).reshape(len(rows), len(header))


def write_vtk_structured_points(moments: MomentSet, sgrid: SpatialGrid, path) -> None:
    """Legacy ASCII ``STRUCTURED_POINTS`` file with x varying fastest."""
    if sgrid.ndim != 3 or moments.d != 3:
        raise ValueError("VTK output needs a 3-D mesh with 3-D velocities")
    nx, ny, nz = sgrid.shape
    origin = sgrid.origin
    dx = sgrid.dx

    def flat(a):
        # storage is (x, y, z) with z fastest; VTK wants x fastest
        return np.asarray(a).transpose(2, 1, 0).reshape(-1)

    lines = [
        "# vtk DataFile Version 3.0",
        "fastkinetic moments",
        "ASCII",
        "DATASET STRUCTURED_POINTS",
        f"DIMENSIONS {nx} {ny} {nz}",
        "ORIGIN " + " ".join(_fmt(o) for o in origin),
        f"SPACING {_fmt(dx)} {_fmt(dx)} {_fmt(dx)}",
        f"POINT_DATA {nx * ny * nz}",
    ]
    for name, arr in (("rho", moments.rho), ("theta", moments.theta), ("pressure", moments.pressure)):
        lines += [f"SCALARS {name} double 1", "LOOKUP_TABLE default"]
        lines += [_fmt(v) for v in flat(arr)]
    u = moments.u
    lines.append("VECTORS velocity double")
    lines += [" ".join(_fmt(c) for c in row) for row in zip(flat(u[0]), flat(u[1]), flat(u[2]))]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
