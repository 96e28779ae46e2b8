"""Fast kinetic scheme for the BGK equation on discrete velocity grids.

Transport is exact (profiles are translated by bookkeeping shifts) and the
relaxation step is solved exactly toward a conservative discrete
equilibrium, so the only error left is the splitting error.
"""

from .equilibrium import (
    ColdStateError,
    ConservedState,
    DegenerateGridError,
    ProjectionOperator,
    VacuumError,
    build_projection,
    compute_moments,
    discrete_equilibrium,
    maxwellian,
    project_conserve,
)
from .grids import SpatialGrid, VelocityGrid, build_velocity_grid, cfl_time_step, shift_offset
from .presets import PRESETS, build_problem
from .solver import (
    DistributionField,
    SolverConfig,
    cell_moments,
    init_field,
    relax_field,
    run_splitting,
    transport_exact,
)

__all__ = [
    "ColdStateError", "ConservedState", "DegenerateGridError", "ProjectionOperator",
    "VacuumError", "build_projection", "compute_moments", "discrete_equilibrium",
    "maxwellian", "project_conserve", "SpatialGrid", "VelocityGrid", "build_velocity_grid",
    "cfl_time_step", "shift_offset", "PRESETS", "build_problem", "DistributionField",
    "SolverConfig", "cell_moments", "init_field", "relax_field", "run_splitting",
    "transport_exact",
]
__version__ = "0.1.0"
