"""Moment tables and state comparison results."""

from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator

from .state_params import complex_pair, to_complex_vector


class MomentTable(BaseModel):
    """Theta_{a,b} = omega(s_n^a (s_n^b)*) for a, b < k and v_a = omega(s_n^a) for a <= k."""
    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=2)
    k: int = Field(..., ge=1)
    theta: Tuple[Tuple[complex, ...], ...] = Field(..., description="k x k hermitian Gram matrix")
    v: Tuple[complex, ...] = Field(..., description="Powers of s_n, v_0 .. v_k")

    @field_validator("theta", mode="before")
    @classmethod
    def _coerce_theta(cls, value):
        if isinstance(value, np.ndarray):
            value = value.tolist()
        return tuple(to_complex_vector(row) for row in value)

    @field_validator("v", mode="before")
    @classmethod
    def _coerce_v(cls, value):
        return to_complex_vector(value)

    @field_serializer("theta")
    def _serialize_theta(self, theta):
        return [[complex_pair(x) for x in row] for row in theta]

    @field_serializer("v")
    def _serialize_v(self, v):
        return [complex_pair(x) for x in v]

    def theta_matrix(self) -> np.ndarray:
        return np.asarray(self.theta, dtype=complex)

    def v_vector(self) -> np.ndarray:
        return np.asarray(self.v, dtype=complex)


class AgreementResult(BaseModel):
    """Outcome of an exhaustive comparison of two states on short monomials."""
    agree: bool = Field(..., description="True iff the worst residual is within tolerance")
    worst_residual: float = Field(..., ge=0.0)
    worst_monomial: Optional[str] = Field(None, description="Monomial attaining the worst residual")
    checked: int = Field(..., ge=0, description="Number of monomials compared")
    max_len: int = Field(..., ge=0)
    tolerance: float = Field(..., gt=0.0)
    witnesses: List[Tuple[str, float]] = Field(default_factory=list, description="Largest residuals, worst first")
