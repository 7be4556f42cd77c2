"""Receive-filter models."""

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..exceptions import InvalidInputError


def _finite_vector(value) -> np.ndarray:
    vector = np.asarray(value, dtype=complex).reshape(-1)
    if not np.all(np.isfinite(vector)):
        raise InvalidInputError("receiver entries must be finite")
    vector = vector.copy()
    vector.setflags(write=False)
    return vector


class LinearReceiver(BaseModel):
    """Linear receive filter d_k (complex N-vector). Only its direction matters."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    d: np.ndarray = Field(..., description="Complex N-vector")

    @field_validator("d", mode="before")
    @classmethod
    def _check_d(cls, value) -> np.ndarray:
        return _finite_vector(value)


class WlReceiver(BaseModel):
    """Widely-linear receive filter d_{k,a} = [d_1; d_2] acting on [r; conj(r)]."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    d_a: np.ndarray = Field(..., description="Complex 2N-vector")

    @field_validator("d_a", mode="before")
    @classmethod
    def _check_d_a(cls, value) -> np.ndarray:
        return _finite_vector(value)

    @property
    def d_1(self) -> np.ndarray:
        return self.d_a[: self.d_a.size // 2]

    @property
    def d_2(self) -> np.ndarray:
        return self.d_a[self.d_a.size // 2:]
