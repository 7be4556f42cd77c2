"""Data models for large-system power and utility prediction."""

from typing import List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator

from ..exceptions import InvalidInputError
from ..power_game import UtilityConfig
from ..signal_model import Scenario

Detection = Literal["wl", "linear"]


class LsaInput(BaseModel):
    """
    Inputs of the large-system predictors.

    The interferer load (K - 1) / N is what enters the finite-system
    equations; ``load`` is the nominal K / N.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    h_sq: np.ndarray = Field(..., description="Channel power gains h_k^2")
    noise_psd: float = Field(..., gt=0.0, description="N0 (W/Hz)")
    gamma_bar: float = Field(..., gt=0.0, description="Target SINR")
    N: int = Field(..., ge=1, description="Processing gain")
    p_max: float = Field(..., gt=0.0, description="Maximum transmit power (W)")
    detection: Detection = "wl"
    utility: UtilityConfig = Field(default_factory=UtilityConfig)

    @field_validator("h_sq", mode="before")
    @classmethod
    def _positive_gains(cls, value) -> np.ndarray:
        gains = np.atleast_1d(np.asarray(value, dtype=float)).reshape(-1)
        if gains.size == 0 or np.any(gains <= 0) or not np.all(np.isfinite(gains)):
            raise InvalidInputError("channel gains must be positive and finite")
        gains = gains.copy()
        gains.setflags(write=False)
        return gains

    @field_serializer("h_sq")
    def _dump_gains(self, value: np.ndarray) -> list:
        return value.tolist()

    @classmethod
    def from_scenario(
        cls,
        scenario: Scenario,
        gamma_bar: float,
        detection: Detection = "wl",
        utility: Optional[UtilityConfig] = None,
    ) -> "LsaInput":
        """Take gains, noise, N and the (common) power limit from a scenario."""
        return cls(
            h_sq=scenario.h ** 2,
            noise_psd=scenario.noise_psd,
            gamma_bar=gamma_bar,
            N=scenario.N,
            p_max=float(np.min(scenario.p_max)),
            detection=detection,
            utility=utility or UtilityConfig(),
        )

    @property
    def K(self) -> int:
        return int(self.h_sq.size)

    @property
    def load(self) -> float:
        return self.K / self.N

    @property
    def interferer_load(self) -> float:
        return (self.K - 1) / self.N

    @property
    def dimension_factor(self) -> float:
        """Real dimensions per chip seen by the detector: 2 for WL, 1 for linear."""
        return 2.0 if self.detection == "wl" else 1.0

    @property
    def is_feasible(self) -> bool:
        factor = self.dimension_factor
        return 1.0 - self.gamma_bar * self.interferer_load / (factor * (1.0 + self.gamma_bar)) > 0


class LsaPrediction(BaseModel):
    """Predicted per-user operating points."""

    method: Literal["plain", "improved"]
    detection: Detection
    powers: List[float] = Field(..., description="Predicted transmit powers (W)")
    received_powers: List[float] = Field(..., description="c h_k^2 p_k with c = 2 (WL) or 1 (linear)")
    sinrs: List[float]
    utilities: List[float] = Field(..., description="Predicted utilities v_k (bit/J)")
    at_max_power: List[bool]
    n_max_hat: int = Field(..., ge=0, description="Predicted number of users at maximum power")
    common_received_power: Optional[float] = Field(
        None, description="Received power P_R shared by users below p_max"
    )
