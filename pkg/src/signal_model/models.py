"""Data models for the physical uplink: scenarios, spreading codes and augmented signatures."""

from typing import Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator, model_validator

from ..exceptions import DimensionMismatchError, InvalidInputError

UNIT_NORM_TOL = 1e-12
AUGMENTED_TOL = 1e-10


def _readonly(values: np.ndarray) -> np.ndarray:
    """Copy an array and mark it immutable."""
    out = np.array(values, copy=True)
    out.setflags(write=False)
    return out


def _serialize_array(values: np.ndarray) -> Union[list, dict]:
    if np.iscomplexobj(values):
        return {"real": values.real.tolist(), "imag": values.imag.tolist()}
    return values.tolist()


def _complex_array(value) -> np.ndarray:
    if isinstance(value, dict):
        return np.asarray(value["real"], dtype=float) + 1j * np.asarray(value["imag"], dtype=float)
    return np.asarray(value, dtype=complex)


class Scenario(BaseModel):
    """
    One realization of the synchronous uplink.

    Holds the per-user transmit powers, channel amplitudes and phases, the
    per-user power limits, the noise level and the processing gain. Powers are
    in watts and ``noise_psd`` in W/Hz.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    K: int = Field(..., ge=1, description="Number of users")
    N: int = Field(..., ge=1, description="Processing gain (chips per symbol)")
    p: np.ndarray = Field(..., description="Transmit powers (W)")
    h: np.ndarray = Field(..., description="Channel amplitudes (h_k > 0)")
    phi: np.ndarray = Field(..., description="Channel phases (radians)")
    noise_psd: float = Field(..., gt=0.0, description="Noise level N0 (W/Hz)")
    p_max: np.ndarray = Field(..., description="Maximum transmit powers (W)")

    @model_validator(mode="before")
    @classmethod
    def _fill_defaults(cls, data):
        if not isinstance(data, dict) or "p" not in data:
            return data
        data = dict(data)
        count = int(np.atleast_1d(np.asarray(data["p"])).size)
        data.setdefault("K", count)
        if "p_max" in data and np.ndim(data["p_max"]) == 0:
            data["p_max"] = np.full(count, float(data["p_max"]))
        return data

    @field_validator("p", "h", "phi", "p_max", mode="before")
    @classmethod
    def _to_vector(cls, value) -> np.ndarray:
        vector = np.atleast_1d(np.asarray(value, dtype=float)).reshape(-1)
        if not np.all(np.isfinite(vector)):
            raise InvalidInputError("scenario vectors must be finite")
        return _readonly(vector)

    @model_validator(mode="after")
    def _check_invariants(self) -> "Scenario":
        for name in ("p", "h", "phi", "p_max"):
            if getattr(self, name).shape != (self.K,):
                raise DimensionMismatchError(
                    f"{name} has {getattr(self, name).size} entries, expected K={self.K}"
                )
        if np.any(self.h <= 0):
            raise InvalidInputError("channel amplitudes must be positive")
        if np.any(self.p <= 0):
            raise InvalidInputError("transmit powers must be positive")
        if np.any(self.p > self.p_max * (1.0 + 1e-12)):
            raise InvalidInputError("transmit powers must not exceed p_max")
        return self

    @field_serializer("p", "h", "phi", "p_max")
    def _dump_vector(self, value: np.ndarray) -> list:
        return value.tolist()

    @property
    def noise_variance(self) -> float:
        """Per-chip complex noise variance 2*N0."""
        return 2.0 * self.noise_psd

    @property
    def power_diagonal(self) -> "PowerDiagonal":
        return PowerDiagonal.from_scenario(self)

    def with_powers(self, powers) -> "Scenario":
        """Return a copy of this scenario with a new transmit-power vector."""
        return Scenario(
            K=self.K, N=self.N, p=powers, h=self.h, phi=self.phi,
            noise_psd=self.noise_psd, p_max=self.p_max,
        )


class ScenarioConfig(BaseModel):
    """Parameters for drawing random scenarios (user geometry, fading, noise)."""

    K: int = Field(..., ge=1, description="Number of users")
    N: int = Field(..., ge=1, description="Processing gain")
    noise_psd: float = Field(2.5e-10, gt=0.0, description="Noise level N0 (W/Hz)")
    p_max: float = Field(1.0, gt=0.0, description="Maximum transmit power (W), 1 W = 0 dBW")
    distance_min: float = Field(10.0, gt=0.0, description="Minimum user distance (m)")
    distance_max: float = Field(500.0, gt=0.0, description="Maximum user distance (m)")
    path_loss_exponent: float = Field(
        1.5, gt=0.0,
        description="Channel variance is distance**(-exponent); 1.5 or 3.0 in the reference setups",
    )
    initial_power: Optional[float] = Field(
        None, gt=0.0, description="Starting transmit power (W); defaults to p_max"
    )

    @model_validator(mode="after")
    def _check_ranges(self) -> "ScenarioConfig":
        if self.distance_max < self.distance_min:
            raise InvalidInputError("distance_max must be >= distance_min")
        if self.initial_power is not None and self.initial_power > self.p_max:
            raise InvalidInputError("initial_power must not exceed p_max")
        return self


class SpreadingMatrix(BaseModel):
    """N x K complex matrix whose columns are the users' unit-norm spreading codes."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    columns: np.ndarray = Field(..., description="N x K complex code matrix")

    @field_validator("columns", mode="before")
    @classmethod
    def _check_columns(cls, value) -> np.ndarray:
        matrix = _complex_array(value)
        if matrix.ndim == 1:
            matrix = matrix.reshape(-1, 1)
        if matrix.ndim != 2 or matrix.shape[0] < 1:
            raise DimensionMismatchError("spreading matrix must be two-dimensional")
        if not np.all(np.isfinite(matrix)):
            raise InvalidInputError("spreading codes must be finite")
        norms = np.linalg.norm(matrix, axis=0)
        if np.any(np.abs(norms - 1.0) > UNIT_NORM_TOL):
            raise InvalidInputError("every spreading code must have unit norm")
        return _readonly(matrix)

    @field_serializer("columns")
    def _dump_columns(self, value: np.ndarray):
        return _serialize_array(value)

    @property
    def N(self) -> int:
        return self.columns.shape[0]

    @property
    def K(self) -> int:
        return self.columns.shape[1]

    def column(self, k: int) -> np.ndarray:
        return self.columns[:, k]

    def gram(self) -> np.ndarray:
        """Code cross-correlation matrix S^H S."""
        return self.columns.conj().T @ self.columns


class AugmentedSignature(BaseModel):
    """A 2N-vector [s e^{j phi}; conj(s) e^{-j phi}] / sqrt(2)."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    data: np.ndarray = Field(..., description="Complex 2N-vector")

    @field_validator("data", mode="before")
    @classmethod
    def _check_structure(cls, value) -> np.ndarray:
        vector = _complex_array(value).reshape(-1)
        if vector.size % 2:
            raise DimensionMismatchError("augmented signature length must be even")
        half = vector.size // 2
        if np.max(np.abs(vector[half:] - vector[:half].conj()), initial=0.0) > AUGMENTED_TOL:
            raise InvalidInputError("lower half must conjugate the upper half")
        if abs(np.linalg.norm(vector) - 1.0) > AUGMENTED_TOL:
            raise InvalidInputError("augmented signature must have unit norm")
        return _readonly(vector)

    @field_serializer("data")
    def _dump_data(self, value: np.ndarray):
        return _serialize_array(value)

    @property
    def upper(self) -> np.ndarray:
        return self.data[: self.data.size // 2]

    def to_code(self, phi: float) -> np.ndarray:
        """Recover the spreading code given the channel phase."""
        return np.sqrt(2.0) * self.upper * np.exp(-1j * phi)


class AugmentedSignatureSet(BaseModel):
    """The 2N x K matrix S_a of augmented signatures (one column per user)."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    matrix: np.ndarray = Field(..., description="2N x K conjugate-structured matrix")

    @field_validator("matrix", mode="before")
    @classmethod
    def _check_matrix(cls, value) -> np.ndarray:
        matrix = _complex_array(value)
        if matrix.ndim != 2 or matrix.shape[0] % 2:
            raise DimensionMismatchError("augmented set must be 2N x K")
        half = matrix.shape[0] // 2
        if np.max(np.abs(matrix[half:] - matrix[:half].conj()), initial=0.0) > AUGMENTED_TOL:
            raise InvalidInputError("augmented set leaves the conjugate-structured subspace")
        if np.any(np.abs(np.linalg.norm(matrix, axis=0) - 1.0) > AUGMENTED_TOL):
            raise InvalidInputError("augmented signatures must have unit norm")
        return _readonly(matrix)

    @field_serializer("matrix")
    def _dump_matrix(self, value: np.ndarray):
        return _serialize_array(value)

    @classmethod
    def from_codes(cls, codes: Union[SpreadingMatrix, np.ndarray], phi) -> "AugmentedSignatureSet":
        columns = codes.columns if isinstance(codes, SpreadingMatrix) else np.asarray(codes, dtype=complex)
        rotation = np.exp(1j * np.asarray(phi, dtype=float))
        upper = columns * rotation[np.newaxis, :]
        return cls(matrix=np.vstack([upper, upper.conj()]) / np.sqrt(2.0))

    @property
    def N(self) -> int:
        return self.matrix.shape[0] // 2

    @property
    def K(self) -> int:
        return self.matrix.shape[1]

    def column(self, k: int) -> AugmentedSignature:
        return AugmentedSignature(data=self.matrix[:, k])

    def to_codes(self, phi) -> SpreadingMatrix:
        rotation = np.exp(-1j * np.asarray(phi, dtype=float))
        return SpreadingMatrix(columns=np.sqrt(2.0) * self.matrix[: self.N] * rotation[np.newaxis, :])

    def gram(self) -> np.ndarray:
        """S_a^H S_a; real for conjugate-structured columns."""
        return (self.matrix.conj().T @ self.matrix).real

    def real_embedding(self) -> np.ndarray:
        """Map every column v = [x; conj(x)] to sqrt(2) [Re x; Im x] in R^{2N}."""
        upper = self.matrix[: self.N]
        return np.sqrt(2.0) * np.vstack([upper.real, upper.imag])


class PowerDiagonal(BaseModel):
    """Received-power weights a_k^2 = 2 p_k h_k^2 (WL) and d_k^2 = p_k h_k^2 (linear)."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    a_sq: np.ndarray
    d_sq: np.ndarray

    @field_validator("a_sq", "d_sq", mode="before")
    @classmethod
    def _positive(cls, value) -> np.ndarray:
        vector = np.atleast_1d(np.asarray(value, dtype=float))
        if np.any(vector <= 0):
            raise InvalidInputError("received powers must be positive")
        return _readonly(vector)

    @model_validator(mode="after")
    def _check_ratio(self) -> "PowerDiagonal":
        if self.a_sq.shape != self.d_sq.shape or not np.allclose(self.a_sq, 2.0 * self.d_sq, rtol=1e-12, atol=0.0):
            raise InvalidInputError("a_sq must equal 2 * d_sq")
        return self

    @classmethod
    def from_scenario(cls, scenario: Scenario) -> "PowerDiagonal":
        d_sq = scenario.p * scenario.h ** 2
        return cls(a_sq=2.0 * d_sq, d_sq=d_sq)
