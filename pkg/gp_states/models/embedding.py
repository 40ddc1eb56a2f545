"""Geometric progression embedding models."""

from typing import Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class GpEmbedding(BaseModel):
    """The geometric progression embedding of O_m into O_n.

    Finite order k sends t_{(n-1)r+i} to s_n^r s_i (r < k, i < n) and t_m to
    s_n^k with m = (n-1)k + 1. Infinite order (order=None) sends
    t_{(n-1)r+i} to s_n^r s_i for every r >= 0.
    """
    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=2, description="Ambient generator count")
    order: Optional[int] = Field(None, ge=1, description="Order k, or None for infinite order")

    @field_validator("order", mode="before")
    @classmethod
    def _parse_infinite(cls, value: Union[int, str, None]):
        if isinstance(value, str) and value.strip().lower() in {"infinite", "inf", "infinity"}:
            return None
        return value

    @property
    def is_finite(self) -> bool:
        return self.order is not None

    @property
    def m(self) -> Optional[int]:
        """Source generator count, None for O_infinity."""
        if self.order is None:
            return None
        return (self.n - 1) * self.order + 1

    def describe(self) -> str:
        order = "infinite" if self.order is None else str(self.order)
        return f"GP embedding (n={self.n}, order={order}, m={self.m if self.m else 'infinite'})"


class Factorization(BaseModel):
    """The unique pair (hat J, a) with s_J = t_{hat J} s_n^a."""
    model_config = ConfigDict(frozen=True)

    hat_j: Tuple[int, ...] = Field(default=(), description="Word over the source generators")
    tail: int = Field(default=0, ge=0, description="Exponent a of the trailing s_n")

    @model_validator(mode="after")
    def _check_letters(self):
        if any(letter < 1 for letter in self.hat_j):
            raise ValueError("Source generator indices are 1-based")
        return self
