"""Running the code iteration to a fixed point and analysing its eigenstructure."""

import logging
from typing import List, Optional, Tuple

import numpy as np
from scipy.linalg import eigh

from ..signal_model import Scenario
from ..signal_model.covariance import CodesLike
from .iteration import CodeIterationState, rotate_columns, sweep
from .metrics import capacity_metrics, column_angles, twsc, wl_twsc
from .models import EigenGroup, FixedPointReport, IterationSchedule, TracePoint, Variant
from .oversized import optimal_eigenvalue_profile

logger = logging.getLogger(__name__)

# relative potential decrease below which a sweep counts as stalled
STALL_TOL = 1e-12
# consecutive stalled sweeps that trigger an escape even above the distance tolerance
STALL_PATIENCE = 25
# relative tolerance for "eigenvalues match the optimal profile"
PROFILE_TOL = 1e-6
# relative eigenvalue gap separating partition groups
GROUP_TOL = 1e-6


def _descending_eigenvalues(matrix: np.ndarray) -> np.ndarray:
    return eigh(matrix, eigvals_only=True)[::-1]


def at_optimal_profile(state: CodeIterationState, profile: np.ndarray) -> bool:
    """True when the eigenvalues of S A S^H match the optimal profile."""
    eigenvalues = _descending_eigenvalues(state.correlation_matrix())
    return bool(np.max(np.abs(eigenvalues - profile)) <= PROFILE_TOL * max(profile[0], np.finfo(float).tiny))


def _trace_point(state: CodeIterationState, sweep_index: int, distance: float) -> TracePoint:
    gram = _descending_eigenvalues(state.gram())
    codes = state.codes()
    return TracePoint(
        sweep=sweep_index,
        wl_twsc=wl_twsc(codes, state.scenario),
        twsc=twsc(codes, state.scenario),
        gram_min=float(gram[-1]),
        gram_max=float(gram[0]),
        metric_d=distance,
        eigenvalues=_descending_eigenvalues(state.correlation_matrix()).tolist(),
    )


def iterate_state(
    state: CodeIterationState,
    schedule: IterationSchedule,
    rng: Optional[np.random.Generator] = None,
) -> Tuple[int, bool, int, List[TracePoint]]:
    """
    Sweep until consecutive signature sets are closer than ``schedule.tol``.

    When the potential stalls at a point whose eigenvalues are not the optimal
    profile, every code is rotated by at most ``perturbation_eps`` and the
    sweeps continue.

    Returns:
        (sweeps used, converged flag, perturbations applied, trace)
    """
    rng = rng if rng is not None else np.random.default_rng(schedule.seed)
    profile = optimal_eigenvalue_profile(state.weights, state.dimension)
    trace: List[TracePoint] = []
    previous = state.potential()
    stalled_sweeps = 0
    perturbations = 0

    for sweep_index in range(1, schedule.max_sweeps + 1):
        before = state.signatures.copy()
        sweep(state)
        distance = float(column_angles(before, state.signatures).max())
        potential = state.potential()
        if schedule.record_trace:
            trace.append(_trace_point(state, sweep_index, distance))

        stalled_sweeps = stalled_sweeps + 1 if previous - potential <= STALL_TOL * max(potential, 1e-300) else 0
        previous = potential
        at_rest = distance < schedule.tol

        if (
            schedule.perturbation_eps > 0
            and perturbations < schedule.max_perturbations
            and (at_rest or stalled_sweeps >= STALL_PATIENCE)
            and stalled_sweeps > 0
            and not at_optimal_profile(state, profile)
        ):
            codes = rotate_columns(state.codes().columns, schedule.perturbation_eps, rng)
            state.load_codes(codes)
            perturbations += 1
            stalled_sweeps = 0
            previous = state.potential()
            logger.warning(
                "Stalled away from the optimal profile at sweep %d; perturbing codes (eps=%g)",
                sweep_index, schedule.perturbation_eps,
            )
            continue

        if at_rest:
            logger.debug("Code iteration converged after %d sweeps", sweep_index)
            return sweep_index, True, perturbations, trace

    logger.warning("Code iteration stopped after %d sweeps without converging", schedule.max_sweeps)
    return schedule.max_sweeps, False, perturbations, trace


def partition_eigenvalues(state: CodeIterationState) -> Tuple[np.ndarray, List[EigenGroup]]:
    """
    Group the eigenvalues of S A S^H and assign users to groups.

    Eigenvalues closer than GROUP_TOL (relative to the largest) share a group;
    each user joins the group nearest to its Rayleigh quotient s_k^H S A S^H s_k.
    """
    matrix = state.correlation_matrix()
    eigenvalues = _descending_eigenvalues(matrix)
    scale = max(float(eigenvalues[0]), np.finfo(float).tiny)

    bounds = [0]
    for i in range(1, eigenvalues.size):
        if eigenvalues[i - 1] - eigenvalues[i] > GROUP_TOL * scale:
            bounds.append(i)
    bounds.append(eigenvalues.size)
    values = [float(eigenvalues[lo:hi].mean()) for lo, hi in zip(bounds[:-1], bounds[1:])]
    groups = [
        EigenGroup(eigenvalue=value, multiplicity=hi - lo, users=[])
        for value, lo, hi in zip(values, bounds[:-1], bounds[1:])
    ]

    quotients = np.einsum("ik,ij,jk->k", state.signatures.conj(), matrix, state.signatures).real
    for k, quotient in enumerate(quotients):
        nearest = int(np.argmin([abs(quotient - value) for value in values]))
        groups[nearest].users.append(k)
    return eigenvalues, groups


def run_to_fixed_point(
    scenario: Scenario,
    codes0: CodesLike,
    schedule: Optional[IterationSchedule] = None,
    variant: Variant = "wl",
) -> FixedPointReport:
    """
    Iterate the code/receiver best responses of all users to a fixed point.

    Args:
        scenario: Uplink realization
        codes0: Starting spreading codes
        schedule: Stopping rule and escape settings (defaults if omitted)
        variant: "wl" for widely-linear receivers, "linear" for linear ones

    Returns:
        FixedPointReport with the final codes, eigenstructure and metrics
    """
    schedule = schedule or IterationSchedule()
    state = CodeIterationState(scenario, codes0, variant)
    logger.info("Running %s code iteration: K=%d N=%d", variant, scenario.K, scenario.N)
    sweeps_used, converged, perturbations, trace = iterate_state(state, schedule)

    eigenvalues, partition = partition_eigenvalues(state)
    metrics = capacity_metrics(eigenvalues, scenario.noise_psd, scenario.K)
    codes = state.codes()
    report = FixedPointReport(
        variant=variant,
        codes=codes,
        weights=state.weights.tolist(),
        eigenvalues=eigenvalues.tolist(),
        partition=partition,
        wl_twsc=wl_twsc(codes, scenario),
        twsc=twsc(codes, scenario),
        tmmse=metrics.tmmse,
        c_sum=metrics.c_sum,
        sweeps_used=sweeps_used,
        converged=converged,
        perturbations=perturbations,
        trace=trace,
    )
    logger.info(
        "Code iteration finished: converged=%s sweeps=%d wl_twsc=%.6g",
        converged, sweeps_used, report.wl_twsc,
    )
    return report
