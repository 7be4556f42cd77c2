"""Data models for the spreading-code/receiver iteration and its fixed points."""

from typing import List, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer

from ..signal_model import SpreadingMatrix

Variant = Literal["wl", "linear"]

# relative agreement required between a group's eigenvalue and a user's weights
_ORDER_TOL = 1e-6


class IterationSchedule(BaseModel):
    """Stopping rule and noisy-update settings for the code iteration."""

    max_sweeps: int = Field(5000, ge=1, description="Maximum Gauss-Seidel sweeps over all users")
    tol: float = Field(1e-9, gt=0.0, description="Convergence threshold on the sweep-to-sweep distance")
    perturbation_eps: float = Field(
        1e-4, ge=0.0, description="Rotation angle bound for escapes from suboptimal fixed points (0 disables)"
    )
    max_perturbations: int = Field(20, ge=0, description="Maximum number of escape perturbations per run")
    record_trace: bool = Field(False, description="Keep per-sweep diagnostics")
    seed: int = Field(0, ge=0, description="Seed for the perturbation RNG")


class TracePoint(BaseModel):
    """Diagnostics recorded after one sweep."""

    sweep: int
    wl_twsc: float
    twsc: float
    gram_min: float = Field(..., description="Smallest eigenvalue of the signature Gram matrix")
    gram_max: float = Field(..., description="Largest eigenvalue of the signature Gram matrix")
    metric_d: float = Field(..., description="Distance to the previous sweep's signatures")
    eigenvalues: List[float] = Field(default_factory=list, description="Eigenvalues of S A S^H, descending")


class EigenGroup(BaseModel):
    """One distinct eigenvalue of S A S^H with the users whose signatures live in its eigenspace."""

    eigenvalue: float
    multiplicity: int = Field(..., ge=1)
    users: List[int] = Field(default_factory=list)


class CapacityMetrics(BaseModel):
    """Sum capacity (nats), total MSE and WL-TWSC computed from an eigenvalue profile."""

    c_sum: float
    tmmse: float
    wl_twsc: float


class SumCapacityComparison(BaseModel):
    """Optimal sum capacities of the WL, complex-linear and real-linear systems (nats)."""

    wl: float
    complex: float
    real: float


class FixedPointReport(BaseModel):
    """
    Outcome of running the code iteration to a fixed point.

    ``eigenvalues`` are those of S A S^H in the variant's signal space (2N for
    WL, N for linear), sorted in descending order. ``partition`` groups them
    into distinct values and assigns every user to the group its signature
    belongs to.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    variant: Variant
    codes: SpreadingMatrix
    weights: List[float] = Field(..., description="Received-power weights a_k^2 (WL) or d_k^2 (linear)")
    eigenvalues: List[float]
    partition: List[EigenGroup]
    wl_twsc: float
    twsc: float
    tmmse: float
    c_sum: float
    sweeps_used: int
    converged: bool
    perturbations: int = 0
    trace: List[TracePoint] = Field(default_factory=list)

    @field_serializer("codes")
    def _dump_codes(self, value: SpreadingMatrix):
        return value.model_dump()

    def local_minimum_violations(self) -> List[str]:
        """
        Check the group ordering and group size conditions of a local minimum.

        Users in a higher-eigenvalue group must not be weaker than users in a
        lower one, and every group except the smallest eigenvalue must hold at
        most as many users as its multiplicity.

        Returns:
            Human-readable violations; empty when both conditions hold
        """
        weights = np.asarray(self.weights)
        scale = max(float(weights.max()), np.finfo(float).tiny)
        violations = []
        occupied = [group for group in self.partition if group.users]
        for high_index, high in enumerate(occupied):
            for low in occupied[high_index + 1:]:
                if weights[high.users].min() < weights[low.users].max() - _ORDER_TOL * scale:
                    violations.append(
                        f"group {high.eigenvalue:.6g} holds a weaker user than group {low.eigenvalue:.6g}"
                    )
        smallest = min(group.eigenvalue for group in self.partition)
        for group in self.partition:
            if group.eigenvalue > smallest and len(group.users) > group.multiplicity:
                violations.append(
                    f"group {group.eigenvalue:.6g} has {len(group.users)} users for multiplicity {group.multiplicity}"
                )
        return violations
