"""Non-cooperative spreading-code/receiver iterations and fixed-point analysis."""

from .models import (
    CapacityMetrics,
    EigenGroup,
    FixedPointReport,
    IterationSchedule,
    SumCapacityComparison,
    TracePoint,
    Variant,
)
from .metrics import capacity_metrics, column_angles, metric_d, twsc, weighted_correlation, wl_twsc
from .oversized import detect_oversized, optimal_eigenvalue_profile, optimal_real_codes, sum_capacity_comparison
from .iteration import (
    CodeIterationState,
    linear_code_iteration_step,
    perturb_codes,
    project_conjugate,
    sweep,
    wl_code_iteration_step,
)
from .solver import at_optimal_profile, iterate_state, partition_eigenvalues, run_to_fixed_point

__all__ = [
    "CapacityMetrics",
    "EigenGroup",
    "FixedPointReport",
    "IterationSchedule",
    "SumCapacityComparison",
    "TracePoint",
    "Variant",
    "capacity_metrics",
    "column_angles",
    "metric_d",
    "twsc",
    "weighted_correlation",
    "wl_twsc",
    "detect_oversized",
    "optimal_eigenvalue_profile",
    "optimal_real_codes",
    "sum_capacity_comparison",
    "CodeIterationState",
    "linear_code_iteration_step",
    "perturb_codes",
    "project_conjugate",
    "sweep",
    "wl_code_iteration_step",
    "at_optimal_profile",
    "iterate_state",
    "partition_eigenvalues",
    "run_to_fixed_point",
]
