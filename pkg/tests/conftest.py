import math
from pathlib import Path

import numpy as np
import pytest

from gp_states.models.settings import SystemSettings
from gp_states.models.state_params import CuntzParam, FiniteGpParam
from gp_states.services.embedding_service import EmbeddingService
from gp_states.services.evaluation_service import EvaluationService
from gp_states.services.oracle_service import OracleService
from gp_states.services.report_service import ReportService
from gp_states.services.state_param_service import StateParamService

SPECS_DIR = Path(__file__).resolve().parent.parent / "specs"

ABE_Z = (1 / math.sqrt(2), 1 / math.sqrt(2), 0.0)


def random_unit_vector(rng: np.random.Generator, size: int) -> np.ndarray:
    v = rng.normal(size=size) + 1j * rng.normal(size=size)
    return v / np.linalg.norm(v)


def random_finite_param(rng: np.random.Generator, n: int, k: int, max_last: float = 0.95) -> FiniteGpParam:
    """Random interior parameter with |z_m| <= max_last."""
    m = (n - 1) * k + 1
    head = random_unit_vector(rng, m - 1)
    last = max_last * rng.uniform() * np.exp(2j * np.pi * rng.uniform())
    z = np.concatenate([head * math.sqrt(1 - abs(last) ** 2), [last]])
    return FiniteGpParam(n=n, k=k, z=z / np.linalg.norm(z))


def random_cuntz_param(rng: np.random.Generator, n: int, max_last: float = 0.9) -> CuntzParam:
    y = random_finite_param(rng, n, 1, max_last).z
    return CuntzParam(n=n, y=y)


def random_unitary(rng: np.random.Generator, size: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(size, size)) + 1j * rng.normal(size=(size, size)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture
def settings():
    return SystemSettings(enable_logging=False)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def embeddings(settings):
    return EmbeddingService(settings)


@pytest.fixture
def params(settings):
    return StateParamService(settings)


@pytest.fixture
def evaluation(settings):
    return EvaluationService(settings)


@pytest.fixture
def oracle(settings):
    return OracleService(settings)


@pytest.fixture
def reports(settings):
    return ReportService(settings)


@pytest.fixture
def abe():
    return FiniteGpParam(n=2, k=2, z=ABE_Z)
