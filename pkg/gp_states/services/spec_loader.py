"""Loading state specs, unitaries and word lists from files or inline text."""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

import numpy as np
import yaml
from pydantic import BaseModel, Field, ValidationError

from ..exceptions import InvalidParameterError, UsageError
from ..models.settings import ToleranceConfig
from ..models.state_params import (
    CuntzParam,
    FiniteGpParam,
    GpStateParam,
    L2Family,
    L2GpParam,
    complex_pair,
    to_complex,
    to_complex_vector,
)
from ..models.words import Monomial, parse_monomial

logger = logging.getLogger(__name__)


class StateSpec(BaseModel):
    """One state per document, as written in spec files and API bodies."""
    type: Literal["gp_finite", "gp_infinite", "cuntz"] = Field(..., description="Parameter kind")
    n: int = Field(..., ge=2, description="Ambient generator count")
    k: Optional[int] = Field(None, ge=1, description="Order, for gp_finite")
    z: Optional[List[Any]] = Field(None, description="Complex entries as [re, im] pairs")
    family: L2Family = Field(default=L2Family.NONE, description="l2 closed form, for gp_infinite")
    family_args: Dict[str, Any] = Field(default_factory=dict, description="seed / x / prefix_length")
    tail_bound: Optional[float] = Field(None, ge=0.0, description="Tail bound of a NONE-family prefix")
    normalize: bool = Field(default=False, description="Rescale z (or the seed) to unit norm first")

    def _vector(self, values: Any) -> List[complex]:
        vector = list(to_complex_vector(values))
        if self.normalize:
            norm = float(np.linalg.norm(vector))
            if norm == 0.0:
                raise InvalidParameterError("Cannot normalize the zero vector")
            vector = [value / norm for value in vector]
        return vector

    def to_param(self, tolerances: Optional[ToleranceConfig] = None) -> GpStateParam:
        """Build the parameter model; invalid specs raise InvalidParameterError.

        Unit-norm checks use `tolerances.unit_norm` and `tolerances.l2_norm` when given.
        """
        context = None
        if tolerances is not None:
            context = {"unit_norm": tolerances.unit_norm, "l2_norm": tolerances.l2_norm}
        try:
            if self.type == "cuntz":
                return CuntzParam.model_validate({"n": self.n, "y": self._vector(self._require_z())}, context=context)
            if self.type == "gp_finite":
                if self.k is None:
                    raise InvalidParameterError("gp_finite specs need an order k")
                return FiniteGpParam.model_validate(
                    {"n": self.n, "k": self.k, "z": self._vector(self._require_z())}, context=context
                )
            return L2GpParam.model_validate(self._l2_fields(), context=context)
        except ValidationError as e:
            raise InvalidParameterError(f"Invalid {self.type} state: {e}") from e
        except (TypeError, ValueError) as e:
            if isinstance(e, InvalidParameterError):
                raise
            raise InvalidParameterError(f"Invalid {self.type} state: {e}") from e

    def _require_z(self) -> List[Any]:
        if self.z is None:
            raise InvalidParameterError(f"{self.type} specs need a vector z")
        return self.z

    def _l2_fields(self) -> Dict[str, Any]:
        args = self.family_args
        length = int(args.get("prefix_length", 0))
        if self.family is L2Family.NONE:
            return {
                "n": self.n,
                "prefix": to_complex_vector(self._require_z()),
                "tail_norm_sq_bound": self.tail_bound or 0.0,
            }
        prefix = (0j,) * length if length else ()
        if self.family is L2Family.GEOMETRIC:
            if "seed" not in args:
                raise InvalidParameterError("geometric family needs family_args.seed")
            return {"n": self.n, "family": self.family, "seed": self._vector(args["seed"]), "prefix": prefix}
        if "x" not in args:
            raise InvalidParameterError("zeta family needs family_args.x")
        return {"n": self.n, "family": self.family, "zeta_x": float(args["x"]), "prefix": prefix}

    @classmethod
    def from_param(cls, param: GpStateParam) -> "StateSpec":
        """Spec that re-parses to an equal parameter."""
        if isinstance(param, CuntzParam):
            return cls(type="cuntz", n=param.n, z=[complex_pair(v) for v in param.y])
        if isinstance(param, FiniteGpParam):
            return cls(type="gp_finite", n=param.n, k=param.k, z=[complex_pair(v) for v in param.z])
        if param.family is L2Family.NONE:
            return cls(
                type="gp_infinite",
                n=param.n,
                z=[complex_pair(v) for v in param.prefix],
                tail_bound=param.tail_norm_sq_bound,
            )
        args: Dict[str, Any] = {"prefix_length": len(param.prefix)}
        if param.family is L2Family.GEOMETRIC:
            args["seed"] = [complex_pair(v) for v in param.seed]
        else:
            args["x"] = param.zeta_x
        return cls(type="gp_infinite", n=param.n, family=param.family, family_args=args)

    def to_document(self) -> Dict[str, Any]:
        return self.model_dump(mode="json", exclude_none=True, exclude_defaults=True)


def parse_state_spec(document: Union[str, Dict[str, Any]]) -> StateSpec:
    """Parse a JSON or YAML document (or an already decoded mapping)."""
    if isinstance(document, str):
        try:
            document = yaml.safe_load(document)
        except yaml.YAMLError as e:
            raise InvalidParameterError(f"State spec is neither JSON nor YAML: {e}") from e
    if not isinstance(document, dict):
        raise InvalidParameterError("A state spec must be a mapping")
    try:
        return StateSpec.model_validate(document)
    except ValidationError as e:
        raise InvalidParameterError(f"Invalid state spec: {e}") from e


def load_state_spec(path: Union[str, Path]) -> StateSpec:
    path = Path(path)
    if not path.exists():
        raise UsageError(f"State spec file not found: {path}")
    logger.debug("Loading state spec from %s", path)
    return parse_state_spec(path.read_text(encoding="utf-8"))


def load_state(path: Union[str, Path], tolerances: Optional[ToleranceConfig] = None) -> GpStateParam:
    return load_state_spec(path).to_param(tolerances)


def parse_unitary(document: Union[str, List[Any]]) -> np.ndarray:
    """Row-major complex matrix from nested lists of [re, im] pairs or numbers."""
    if isinstance(document, str):
        try:
            document = yaml.safe_load(document)
        except yaml.YAMLError as e:
            raise UsageError(f"Unitary is neither JSON nor YAML: {e}") from e
    if not isinstance(document, list) or not all(isinstance(row, list) for row in document):
        raise UsageError("A unitary is a list of rows")
    try:
        return np.array([[to_complex(entry) for entry in row] for row in document], dtype=complex)
    except (TypeError, ValueError) as e:
        raise UsageError(f"Cannot read unitary entries: {e}") from e


def load_unitary(source: str) -> np.ndarray:
    """Read a unitary from a file path, or from inline JSON when no such file exists."""
    try:
        path = Path(source)
        is_file = path.is_file()
    except OSError:
        is_file = False
    if is_file:
        return parse_unitary(path.read_text(encoding="utf-8"))
    return parse_unitary(source)


def parse_words(texts: List[str], n: int) -> List[Optional[Monomial]]:
    """Parse word arguments; a None entry marks a product that vanishes."""
    return [parse_monomial(text, n) for text in texts]


def dump_spec(param: GpStateParam) -> Dict[str, Any]:
    return StateSpec.from_param(param).to_document()


def dumps_spec(param: GpStateParam) -> str:
    return json.dumps(dump_spec(param), sort_keys=True)
