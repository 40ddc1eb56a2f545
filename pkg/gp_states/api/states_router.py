"""FastAPI router exposing the report commands over HTTP."""

import logging
from typing import Any, List, Optional, Union

from fastapi import APIRouter, File, HTTPException, UploadFile
from pydantic import BaseModel, Field

from ..exceptions import (
    GpStateError,
    NearBoundaryError,
    OracleMismatchError,
    SingularSystemError,
    TailBoundTooLooseError,
)
from ..models.report import Report
from ..models.settings import SystemSettings
from ..services.report_service import ReportService
from ..services.spec_loader import StateSpec, parse_state_spec, parse_unitary

logger = logging.getLogger(__name__)

# Router for state endpoints
router = APIRouter(prefix="/states", tags=["states"])

settings = SystemSettings()


class StateRequest(BaseModel):
    state: StateSpec = Field(..., description="State spec, same format as spec files")
    tolerance: Optional[float] = Field(None, gt=0.0, description="Comparison tolerance override")


class EvalRequest(StateRequest):
    words: Optional[List[str]] = Field(None, description="Words such as 's2 s1 s1*'; all short words when omitted")
    max_len: Optional[int] = Field(None, ge=0, le=12)
    verify: bool = False


class EquivRequest(BaseModel):
    a: StateSpec
    b: StateSpec
    witness: bool = False
    max_len: Optional[int] = Field(None, ge=0, le=12)
    tolerance: Optional[float] = Field(None, gt=0.0)


class LiftRequest(StateRequest):
    order: int = Field(..., ge=1)


class GaugeRequest(StateRequest):
    unitary: List[List[Any]] = Field(..., description="Row-major (n-1)x(n-1) unitary of [re, im] pairs")
    max_len: Optional[int] = Field(None, ge=0, le=8)


class FactorizeRequest(BaseModel):
    n: int = Field(..., ge=2)
    order: Union[int, str] = Field(..., description="Order k or 'infinite'")
    word: str = Field(..., description="Word of generators, e.g. 's2 s2 s2'")


def _service(tolerance: Optional[float] = None) -> ReportService:
    configured = settings if tolerance is None else settings.with_tolerance(tolerance)
    return ReportService(configured)


def _http_error(e: GpStateError) -> HTTPException:
    if isinstance(e, (NearBoundaryError, TailBoundTooLooseError)):
        status = 422
    elif isinstance(e, (SingularSystemError, OracleMismatchError)):
        status = 500
    else:
        status = 400
    logger.warning("❌ %s: %s", type(e).__name__, e)
    return HTTPException(status_code=status, detail=f"{type(e).__name__}: {e}")


def _order(value: Union[int, str]) -> Optional[int]:
    if isinstance(value, str):
        if value.strip().lower() in {"infinite", "inf", "infinity"}:
            return None
        return int(value)
    return value


@router.post("/classify", response_model=Report)
def classify_state(request: StateRequest):
    """Uniqueness and purity of a GP state, with mixture components at the boundary."""
    try:
        return _service(request.tolerance).classify(request.state.to_param(settings.tolerances), {"source": "request"})
    except GpStateError as e:
        raise _http_error(e) from e


@router.post("/upload/classify", response_model=Report)
async def classify_uploaded_state(file: UploadFile = File(..., description="State spec file (JSON or YAML)")):
    """Classify a state spec uploaded as a file."""
    content = await file.read()
    try:
        spec = parse_state_spec(content.decode("utf-8"))
        return _service().classify(spec.to_param(settings.tolerances), {"spec": file.filename or "upload"})
    except UnicodeDecodeError as e:
        raise HTTPException(status_code=400, detail="State spec must be UTF-8 text") from e
    except GpStateError as e:
        raise _http_error(e) from e


@router.post("/eval", response_model=Report)
def evaluate_state(request: EvalRequest):
    """Tabulate omega(s_J s_K*) on the requested words."""
    try:
        return _service(request.tolerance).evaluate(
            request.state.to_param(settings.tolerances),
            words=request.words,
            max_len=request.max_len,
            verify=request.verify,
            arguments={"words": request.words or "all short words", "verify": request.verify},
        )
    except GpStateError as e:
        raise _http_error(e) from e


@router.post("/equiv", response_model=Report)
def equivalence(request: EquivRequest):
    """Decide equivalence of two GP states."""
    try:
        return _service(request.tolerance).equivalence(
            request.a.to_param(settings.tolerances),
            request.b.to_param(settings.tolerances),
            witness=request.witness,
            max_len=request.max_len,
            arguments={"witness": request.witness},
        )
    except GpStateError as e:
        raise _http_error(e) from e


@router.post("/canon", response_model=Report)
def canonical_invariant(request: StateRequest):
    try:
        return _service(request.tolerance).canonical(request.state.to_param(settings.tolerances))
    except GpStateError as e:
        raise _http_error(e) from e


@router.post("/lift", response_model=Report)
def lift_order(request: LiftRequest):
    try:
        return _service(request.tolerance).lift(request.state.to_param(settings.tolerances), request.order, {"order": request.order})
    except GpStateError as e:
        raise _http_error(e) from e


@router.post("/gauge", response_model=Report)
def gauge_action(request: GaugeRequest):
    try:
        return _service(request.tolerance).gauge(
            request.state.to_param(settings.tolerances),
            parse_unitary(request.unitary),
            max_len=request.max_len,
        )
    except GpStateError as e:
        raise _http_error(e) from e


@router.post("/gram", response_model=Report)
def gram_matrix(request: StateRequest):
    try:
        return _service(request.tolerance).gram(request.state.to_param(settings.tolerances))
    except GpStateError as e:
        raise _http_error(e) from e


@router.post("/factorize", response_model=Report)
def factorize_word(request: FactorizeRequest):
    try:
        order = _order(request.order)
        return _service().factorize(request.n, order, request.word, {"word": request.word, "n": request.n})
    except ValueError as e:
        if isinstance(e, GpStateError):
            raise _http_error(e) from e
        raise HTTPException(status_code=400, detail=str(e)) from e
