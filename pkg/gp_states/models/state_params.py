"""Parameter models for geometric progression states and their verdicts."""

from enum import Enum
from typing import Any, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, field_serializer, field_validator, model_validator
from scipy.special import zeta

UNIT_NORM_TOL = 1e-12
L2_NORM_TOL = 1e-9
DEFAULT_PREFIX_LENGTH = 64
MIN_ZETA_EXCESS = 1e-6


class L2Family(str, Enum):
    """Closed forms available for an l2 parameter."""
    NONE = "none"
    GEOMETRIC = "geometric"
    ZETA = "zeta"


class Verdict(str, Enum):
    """Uniqueness classification of a GP state."""
    UNIQUE_PURE = "unique_pure"
    BOUNDARY_MIXTURE = "boundary_mixture"


class EquivalenceVerdict(str, Enum):
    """Outcome of an equivalence decision."""
    EXACT_EQUIVALENT = "exact_equivalent"
    EQUIVALENT_WITHIN_TOL = "equivalent_within_tol"
    DISTINCT = "distinct"

    @property
    def is_equivalent(self) -> bool:
        return self is not EquivalenceVerdict.DISTINCT


class InvariantKind(str, Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"


def to_complex(value: Any) -> complex:
    """Accept complex numbers, reals, `[re, im]` pairs, `{"re", "im"}` maps and strings."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError(f"Complex pairs are [re, im], got {value!r}")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, dict):
        return complex(float(value.get("re", 0.0)), float(value.get("im", 0.0)))
    if isinstance(value, str):
        return complex(value.replace(" ", ""))
    return complex(value)


def to_complex_vector(values: Any) -> Tuple[complex, ...]:
    if isinstance(values, np.ndarray):
        values = values.tolist()
    return tuple(to_complex(v) for v in values)


def complex_pair(value: complex) -> List[float]:
    return [float(value.real), float(value.imag)]


def norm_tolerance(info: ValidationInfo, key: str, default: float) -> float:
    """Norm tolerance from the validation context (`unit_norm`, `l2_norm`), else the default."""
    context = info.context or {}
    return float(context.get(key, default))


class _VectorParam(BaseModel):
    model_config = ConfigDict(frozen=True)

    @staticmethod
    def _check_unit(vector: Tuple[complex, ...], label: str, tol: float = UNIT_NORM_TOL) -> None:
        norm = float(np.linalg.norm(np.asarray(vector, dtype=complex)))
        if abs(norm - 1.0) > tol:
            raise ValueError(f"{label} must be a unit vector, got norm {norm!r}")


class FiniteGpParam(_VectorParam):
    """Parameter z in the unit sphere of C^m, m = (n-1)k + 1, of a GP state of order k."""
    type: Literal["gp_finite"] = "gp_finite"
    n: int = Field(..., ge=2, description="Ambient generator count")
    k: int = Field(..., ge=1, description="Order of the GP embedding")
    z: Tuple[complex, ...] = Field(..., description="Unit vector of length m")

    @field_validator("z", mode="before")
    @classmethod
    def _coerce_z(cls, value):
        return to_complex_vector(value)

    @model_validator(mode="after")
    def _check_shape(self, info: ValidationInfo):
        if len(self.z) != self.m:
            raise ValueError(f"z must have length m = (n-1)k+1 = {self.m}, got {len(self.z)}")
        self._check_unit(self.z, "z", norm_tolerance(info, "unit_norm", UNIT_NORM_TOL))
        return self

    @field_serializer("z")
    def _serialize_z(self, z: Tuple[complex, ...]):
        return [complex_pair(v) for v in z]

    @property
    def m(self) -> int:
        return (self.n - 1) * self.k + 1

    @property
    def z_last(self) -> complex:
        return self.z[-1]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.z, dtype=complex)


class CuntzParam(_VectorParam):
    """Unit vector y in C^n of the Cuntz state omega_y."""
    type: Literal["cuntz"] = "cuntz"
    n: int = Field(..., ge=2, description="Ambient generator count")
    y: Tuple[complex, ...] = Field(..., description="Unit vector of length n")

    @field_validator("y", mode="before")
    @classmethod
    def _coerce_y(cls, value):
        return to_complex_vector(value)

    @model_validator(mode="after")
    def _check_shape(self, info: ValidationInfo):
        if len(self.y) != self.n:
            raise ValueError(f"y must have length n = {self.n}, got {len(self.y)}")
        self._check_unit(self.y, "y", norm_tolerance(info, "unit_norm", UNIT_NORM_TOL))
        return self

    @field_serializer("y")
    def _serialize_y(self, y: Tuple[complex, ...]):
        return [complex_pair(v) for v in y]

    @property
    def y_last(self) -> complex:
        return self.y[-1]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.y, dtype=complex)


class L2GpParam(_VectorParam):
    """Unit vector z of l2 for a GP state of infinite order.

    `prefix` holds z_1..z_N and `tail_norm_sq_bound` a certified upper bound on
    sum_{j>N} |z_j|^2. The GEOMETRIC family is generated by a seed unit vector
    y of length b+1 as z_{br+i} = y_{b+1}^r y_i; the ZETA family is
    z_j = (zeta(x) j^x)^(-1/2). Both give every coordinate exactly.
    """
    type: Literal["gp_infinite"] = "gp_infinite"
    n: int = Field(..., ge=2, description="Ambient generator count")
    prefix: Tuple[complex, ...] = Field(default=(), description="Leading coordinates z_1..z_N")
    tail_norm_sq_bound: float = Field(default=0.0, ge=0.0, description="Upper bound on the squared norm beyond the prefix")
    family: L2Family = Field(default=L2Family.NONE, description="Closed-form family, if any")
    seed: Optional[Tuple[complex, ...]] = Field(None, description="GEOMETRIC seed (head entries, then the ratio)")
    zeta_x: Optional[float] = Field(None, description="ZETA exponent x > 1")

    @field_validator("prefix", mode="before")
    @classmethod
    def _coerce_prefix(cls, value):
        return to_complex_vector(value)

    @field_validator("seed", mode="before")
    @classmethod
    def _coerce_seed(cls, value):
        return None if value is None else to_complex_vector(value)

    @model_validator(mode="before")
    @classmethod
    def _materialise_family(cls, data: Any):
        if not isinstance(data, dict):
            return data
        family = L2Family(data.get("family", L2Family.NONE))
        if family is L2Family.NONE:
            return data
        data = dict(data)
        length = len(data.get("prefix") or ()) or DEFAULT_PREFIX_LENGTH
        if family is L2Family.GEOMETRIC:
            seed = data.get("seed")
            if seed is None:
                raise ValueError("GEOMETRIC family needs a seed vector")
            seed = np.asarray(to_complex_vector(seed), dtype=complex)
            if len(seed) < 2:
                raise ValueError("GEOMETRIC seed needs at least one head entry and a ratio")
            data["prefix"] = tuple(_geometric_coefficients(seed, 0, length).tolist())
            data["tail_norm_sq_bound"] = _geometric_tail(seed, length)
        else:
            x = data.get("zeta_x")
            if x is None or float(x) <= 1.0 + MIN_ZETA_EXCESS:
                raise ValueError(f"ZETA family needs x > 1 + {MIN_ZETA_EXCESS}, got {x!r}")
            data["prefix"] = tuple(_zeta_coefficients(float(x), 0, length).tolist())
            data["tail_norm_sq_bound"] = _zeta_integral_bound(float(x), length)
        return data

    @model_validator(mode="after")
    def _check_norm(self, info: ValidationInfo):
        if self.family is L2Family.GEOMETRIC:
            self._check_unit(self.seed, "seed", norm_tolerance(info, "unit_norm", UNIT_NORM_TOL))
            if abs(self.seed[-1]) >= 1.0:
                raise ValueError("GEOMETRIC ratio must satisfy |ratio| < 1")
        elif self.family is L2Family.NONE:
            prefix_sq = float(np.sum(np.abs(np.asarray(self.prefix, dtype=complex)) ** 2))
            tol = norm_tolerance(info, "l2_norm", L2_NORM_TOL)
            if prefix_sq > 1.0 + tol or prefix_sq + self.tail_norm_sq_bound < 1.0 - tol:
                raise ValueError(
                    f"Prefix norm^2 {prefix_sq!r} with tail bound {self.tail_norm_sq_bound!r} does not bracket 1"
                )
        return self

    @field_serializer("prefix")
    def _serialize_prefix(self, prefix: Tuple[complex, ...]):
        return [complex_pair(v) for v in prefix]

    @field_serializer("seed")
    def _serialize_seed(self, seed: Optional[Tuple[complex, ...]]):
        return None if seed is None else [complex_pair(v) for v in seed]

    @property
    def is_closed_form(self) -> bool:
        return self.family is not L2Family.NONE

    def coefficients(self, offset: int, count: int) -> np.ndarray:
        """z_{offset+1}, ..., z_{offset+count}; NONE-family entries past the prefix read as 0."""
        if count <= 0:
            return np.zeros(0, dtype=complex)
        if self.family is L2Family.GEOMETRIC:
            return _geometric_coefficients(np.asarray(self.seed, dtype=complex), offset, count)
        if self.family is L2Family.ZETA:
            return _zeta_coefficients(self.zeta_x, offset, count)
        known = np.asarray(self.prefix[offset:offset + count], dtype=complex)
        return np.concatenate([known, np.zeros(count - len(known), dtype=complex)])

    def coefficient(self, j: int) -> complex:
        return complex(self.coefficients(j - 1, 1)[0])

    def tail_norm_sq(self, horizon: int) -> float:
        """sum_{j > horizon} |z_j|^2: exact for closed forms, an upper bound otherwise."""
        if self.family is L2Family.GEOMETRIC:
            return _geometric_tail(np.asarray(self.seed, dtype=complex), horizon)
        if self.family is L2Family.ZETA:
            return float(zeta(self.zeta_x, horizon + 1) / zeta(self.zeta_x))
        rest = np.asarray(self.prefix[horizon:], dtype=complex)
        return float(np.sum(np.abs(rest) ** 2)) + self.tail_norm_sq_bound

    def known_length(self) -> Optional[int]:
        """Number of exactly known coordinates, None when all are."""
        return None if self.is_closed_form else len(self.prefix)


def _geometric_coefficients(seed: np.ndarray, offset: int, count: int) -> np.ndarray:
    block = len(seed) - 1
    idx = np.arange(offset, offset + count)
    r, i = np.divmod(idx, block)
    ratio = seed[-1]
    powers = np.abs(ratio) ** r * np.exp(1j * np.angle(ratio) * r)
    return powers * seed[:-1][i]


def _geometric_tail(seed: np.ndarray, horizon: int) -> float:
    block = len(seed) - 1
    head_sq = np.abs(seed[:-1]) ** 2
    rho_sq = abs(seed[-1]) ** 2
    blocks, partial = divmod(horizon, block)
    current = rho_sq ** blocks * float(np.sum(head_sq[partial:]))
    later = rho_sq ** (blocks + 1) * float(np.sum(head_sq)) / (1.0 - rho_sq)
    return float(current + later)


def _zeta_coefficients(x: float, offset: int, count: int) -> np.ndarray:
    j = np.arange(offset + 1, offset + count + 1, dtype=float)
    return (zeta(x) * j ** x) ** -0.5 + 0j


def _zeta_integral_bound(x: float, horizon: int) -> float:
    """Integral-test bound sum_{j>N} j^-x <= N^(1-x)/(x-1), normalised by zeta(x)."""
    if horizon == 0:
        return 1.0
    return float(horizon ** (1.0 - x) / ((x - 1.0) * zeta(x)))


GpStateParam = Union[FiniteGpParam, L2GpParam, CuntzParam]


class Classification(BaseModel):
    """Uniqueness verdict of a GP state, with mixture components at the boundary."""
    verdict: Verdict = Field(..., description="UNIQUE_PURE or BOUNDARY_MIXTURE")
    components: List[CuntzParam] = Field(default_factory=list, description="Pure Cuntz components of a boundary mixture")
    note: Optional[str] = Field(None, description="Additional remarks")


class CanonicalInvariant(BaseModel):
    """Complete invariant of a pure GP state: an l2 unit vector or (0, ..., 0, c)."""
    model_config = ConfigDict(frozen=True)

    kind: InvariantKind = Field(..., description="INTERIOR or BOUNDARY")
    n: int = Field(..., ge=2, description="Ambient generator count")
    interior: Optional[L2GpParam] = Field(None, description="l2 vector for INTERIOR invariants")
    c: Optional[complex] = Field(None, description="Unimodular last entry for BOUNDARY invariants")

    @field_validator("c", mode="before")
    @classmethod
    def _coerce_c(cls, value):
        return None if value is None else to_complex(value)

    @field_serializer("c")
    def _serialize_c(self, c: Optional[complex]):
        return None if c is None else complex_pair(c)

    @model_validator(mode="after")
    def _check_kind(self):
        if self.kind is InvariantKind.INTERIOR and self.interior is None:
            raise ValueError("INTERIOR invariants carry an l2 vector")
        if self.kind is InvariantKind.BOUNDARY and (self.c is None or abs(abs(self.c) - 1.0) > UNIT_NORM_TOL):
            raise ValueError("BOUNDARY invariants carry a unimodular c")
        return self

    def boundary_vector(self) -> Tuple[complex, ...]:
        """The vector (0, ..., 0, c) of C^n."""
        return (0j,) * (self.n - 1) + (self.c,)
