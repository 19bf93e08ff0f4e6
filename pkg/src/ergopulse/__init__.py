"""Pulse-controlled product formulas on finite-dimensional Hilbert spaces.

Interleaving a pulse unitary with short slices of a free evolution drives
the product toward e^{P(X) t} u^N, where P projects the generator onto
the commutant of the pulse.  This package computes the products, limits,
and ergodic averages behind that statement, evaluates rigorous error
bounds (per-schedule and equidistant-rate constants), probes schedule
families for the uniformity their weighted means need, and optimizes
schedules over the probability simplex, where the equal-weights row is
the total-variation minimizer.
"""

from __future__ import annotations

__version__ = "0.1.0"

from ._kernels import NUMBA_ENABLED, backend
from .errors import (
    ClusteringAmbiguityError,
    DomainError,
    InvalidDensityError,
    NotACoboundaryError,
    TooLargeInstanceError,
)
from .matrixcore import (
    MAX_DIM,
    as_operator,
    exp_product_defect_bound,
    expm,
    is_unitary,
    load_matrix,
    matrix_from_json_dict,
    matrix_to_json_dict,
    op_norm,
    random_unitary,
    save_matrix,
)
from .schedules import (
    Schedule,
    ScheduleFamily,
    UniformityReport,
    cohen_uniformity_probe,
    density_family,
    equidistant,
    equidistant_family,
    family_by_name,
    from_density,
    load_schedule,
    pathological,
    pathological_family,
    pathological_tv_exact,
    save_schedule,
    schedule_from_json_dict,
    schedule_to_json_dict,
    table_density_family,
    tv_functional,
    uhrig_family,
)
from .ergodic import (
    UnitarySpectrum,
    YosidaSplit,
    cesaro_mean,
    commutant_project,
    solve_coboundary,
    spectrum,
    weighted_cesaro_mean,
    yosida_split,
)
from .evolution import (
    BoundBreakdown,
    ConvergenceReport,
    PulseSystem,
    control_error,
    convergence_sweep,
    defect_coefficient,
    equidistant_bound_constants,
    limit_evolution,
    pulse_product,
    report_to_json_dict,
    schedule_bound_rhs,
    write_report_csv,
)
from .optimizer import (
    UNIFORM_PROXIMITY_TOL,
    OptimizationResult,
    OptimizerConfig,
    brute_force_simplex_grid,
    minimize_bound_rhs,
    minimize_tv,
    simplex_lattice,
)

__all__ = [
    "__version__",
    "NUMBA_ENABLED",
    "backend",
    "ClusteringAmbiguityError",
    "DomainError",
    "InvalidDensityError",
    "NotACoboundaryError",
    "TooLargeInstanceError",
    "MAX_DIM",
    "as_operator",
    "exp_product_defect_bound",
    "expm",
    "is_unitary",
    "load_matrix",
    "matrix_from_json_dict",
    "matrix_to_json_dict",
    "op_norm",
    "random_unitary",
    "save_matrix",
    "Schedule",
    "ScheduleFamily",
    "UniformityReport",
    "cohen_uniformity_probe",
    "density_family",
    "equidistant",
    "equidistant_family",
    "family_by_name",
    "from_density",
    "load_schedule",
    "pathological",
    "pathological_family",
    "pathological_tv_exact",
    "save_schedule",
    "schedule_from_json_dict",
    "schedule_to_json_dict",
    "table_density_family",
    "tv_functional",
    "uhrig_family",
    "UnitarySpectrum",
    "YosidaSplit",
    "cesaro_mean",
    "commutant_project",
    "solve_coboundary",
    "spectrum",
    "weighted_cesaro_mean",
    "yosida_split",
    "BoundBreakdown",
    "ConvergenceReport",
    "PulseSystem",
    "control_error",
    "convergence_sweep",
    "defect_coefficient",
    "equidistant_bound_constants",
    "limit_evolution",
    "pulse_product",
    "report_to_json_dict",
    "schedule_bound_rhs",
    "write_report_csv",
    "OptimizationResult",
    "OptimizerConfig",
    "UNIFORM_PROXIMITY_TOL",
    "brute_force_simplex_grid",
    "minimize_bound_rhs",
    "minimize_tv",
    "simplex_lattice",
]
