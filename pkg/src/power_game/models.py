"""Data models for the energy-efficiency power-control games."""

import math
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_serializer, model_validator

from ..code_game import IterationSchedule
from ..exceptions import InvalidInputError
from ..signal_model import SpreadingMatrix


class UtilityConfig(BaseModel):
    """
    Packet format behind the utility u_k = R (L/M) f(gamma_k) / p_k.

    R and L only rescale utilities, so comparisons between game variants do
    not depend on them. L defaults to M (no overhead).
    """

    M: int = Field(120, ge=1, description="Packet length (symbols)")
    L: Optional[int] = Field(None, ge=1, description="Information symbols per packet (defaults to M)")
    R: float = Field(1e5, gt=0.0, description="Transmission rate (bit/s)")

    @model_validator(mode="after")
    def _check_lengths(self) -> "UtilityConfig":
        if self.L is not None and self.L > self.M:
            raise InvalidInputError(f"L={self.L} exceeds packet length M={self.M}")
        return self

    @property
    def info_symbols(self) -> int:
        return self.M if self.L is None else self.L

    @property
    def throughput_scale(self) -> float:
        """R L / M in bit/s."""
        return self.R * self.info_symbols / self.M


class TargetSinr(BaseModel):
    """The utility-maximizing SINR, unique positive root of f(g) = g f'(g)."""

    gamma_bar: float = Field(..., gt=0.0)
    M: int = Field(..., ge=2)
    residual: float = Field(0.0, description="|f(gamma_bar) - gamma_bar f'(gamma_bar)|")

    @property
    def gamma_bar_db(self) -> float:
        return 10.0 * math.log10(self.gamma_bar)


class GameVariant(str, Enum):
    """Which strategies users optimize (P=power, R=receiver, C=codes) and the detector family."""

    P_LINEAR = "P-linear"
    PR_LINEAR = "PR-linear"
    PRC_LINEAR = "PRC-linear"
    P_WL = "P-WL"
    PR_WL = "PR-WL"
    PRC_WL = "PRC-WL"

    @property
    def detection(self) -> str:
        return "wl" if self.value.endswith("WL") else "linear"

    @property
    def optimizes_receiver(self) -> bool:
        return self.value.startswith("PR")

    @property
    def optimizes_codes(self) -> bool:
        return self.value.startswith("PRC")


class GameSchedule(BaseModel):
    """Round structure and stopping rule of the best-response dynamics."""

    max_rounds: int = Field(10_000, ge=1, description="Maximum synchronous best-response rounds")
    tol: float = Field(1e-8, gt=0.0, description="Stop when the max relative power change falls below this")
    initial_power: str = Field(
        "single_user",
        pattern="^(single_user|scenario)$",
        description="'single_user': start at the interference-free best response; 'scenario': use scenario.p",
    )
    code_schedule: IterationSchedule = Field(
        default_factory=lambda: IterationSchedule(max_sweeps=500),
        description="Code iteration settings applied in every round of the code-optimizing games",
    )


class UserOutcome(BaseModel):
    """One user's operating point at the end of a game."""

    power: float = Field(..., gt=0.0, description="Transmit power (W)")
    p_max: float = Field(..., gt=0.0, description="Power limit (W)")
    sinr: float = Field(..., ge=0.0)
    mse: float = Field(..., gt=0.0, le=1.0)
    utility: float = Field(..., ge=0.0, description="bit/Joule")
    interference: float = Field(..., gt=0.0, description="Effective interference I_k (W), inf if unreachable")
    at_max_power: bool

    @property
    def sinr_db(self) -> float:
        return 10.0 * math.log10(self.sinr) if self.sinr > 0 else float("-inf")


class GameOutcome(BaseModel):
    """Nash-equilibrium candidate reached by the best-response dynamics."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    variant: GameVariant
    gamma_bar: float
    users: List[UserOutcome]
    codes: SpreadingMatrix
    iterations: int
    converged: bool
    trace: List[float] = Field(default_factory=list, description="Max relative best-response residual |target - p| / p per round")

    @field_serializer("codes")
    def _dump_codes(self, value: SpreadingMatrix):
        return value.model_dump()

    @property
    def powers(self) -> List[float]:
        return [user.power for user in self.users]

    @property
    def mean_utility(self) -> float:
        return sum(user.utility for user in self.users) / len(self.users)

    @property
    def fraction_at_max(self) -> float:
        return sum(user.at_max_power for user in self.users) / len(self.users)
