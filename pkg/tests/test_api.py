"""HTTP surface over the report commands."""

import json
import math

import pytest
from fastapi.testclient import TestClient

from main import app

from .conftest import SPECS_DIR

client = TestClient(app)


def load(name):
    return json.loads((SPECS_DIR / name).read_text(encoding="utf-8"))


ABE = load("abe.json")


def entry(report, table_name, label):
    table = next(t for t in report["tables"] if t["name"] == table_name)
    item = next(e for e in table["entries"] if e["label"] == label)
    return complex(*item["value"])


def test_health():
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json()["status"] == "healthy"


def test_endpoint_listing():
    assert client.get("/api").json()["endpoints"]["eval"] == "/states/eval"


def test_no_cross_origin_headers():
    response = client.get("/health", headers={"Origin": "http://localhost:3000"})
    assert response.status_code == 200
    assert "access-control-allow-origin" not in response.headers


def test_classify():
    response = client.post("/states/classify", json={"state": ABE})
    assert response.status_code == 200
    assert response.json()["verdicts"]["classification"] == "unique_pure"


def test_classify_mixture():
    report = client.post("/states/classify", json={"state": load("mixture.json")}).json()
    assert report["verdicts"]["classification"] == "boundary_mixture"
    assert len(report["tables"][-1]["entries"]) == 2


def test_upload_classify():
    content = (SPECS_DIR / "cuntz.yaml").read_bytes()
    response = client.post("/states/upload/classify", files={"file": ("cuntz.yaml", content, "application/x-yaml")})
    assert response.status_code == 200
    assert response.json()["arguments"]["spec"] == "cuntz.yaml"


def test_eval_words():
    report = client.post("/states/eval", json={"state": ABE, "words": ["s1", "s2"], "verify": True}).json()
    assert entry(report, "moments", "s1") == pytest.approx(1 / math.sqrt(2))
    assert entry(report, "moments", "s2") == pytest.approx(0.5)
    assert report["verdicts"]["oracle"] == "agree"


def test_equiv():
    cuntz = {"type": "cuntz", "n": 2, "z": [[0.6, 0], [0.8, 0]]}
    response = client.post("/states/equiv", json={"a": load("gp_from_cuntz.json"), "b": cuntz})
    assert response.status_code == 200
    assert response.json()["verdicts"]["equivalence"] == "exact_equivalent"


def test_gram():
    report = client.post("/states/gram", json={"state": ABE}).json()
    assert report["verdicts"]["correlation_dimension"] == "2"


def test_gauge():
    body = {"state": load("geometric.json"), "unitary": load("unitary_swap.json"), "max_len": 2}
    report = client.post("/states/gauge", json=body).json()
    assert report["verdicts"]["covariance"] == "holds"


def test_lift():
    report = client.post("/states/lift", json={"state": ABE, "order": 4}).json()
    assert len(report["state_specs"]["lifted"]["z"]) == 5
    assert report["verdicts"]["equivalence"] == "exact_equivalent"


def test_factorize():
    report = client.post("/states/factorize", json={"n": 2, "order": "infinite", "word": "s2 s2 s1"}).json()
    assert report["verdicts"]["hat_j"] == "t3"
    assert report["verdicts"]["tail"] == "0"


def test_factorize_rejects_small_n():
    assert client.post("/states/factorize", json={"n": 1, "order": 2, "word": "s1"}).status_code == 422


def test_invalid_state_is_bad_request():
    bad = {"type": "gp_finite", "n": 2, "k": 2, "z": [[1, 0], [1, 0], [0, 0]]}
    response = client.post("/states/classify", json={"state": bad})
    assert response.status_code == 400
    assert response.json()["detail"].startswith("InvalidParameterError")


def test_near_boundary_is_unprocessable():
    last = 1.0 - 5e-9
    near = {"type": "gp_finite", "n": 2, "k": 2, "z": [[math.sqrt(1 - last ** 2), 0], [0, 0], [last, 0]]}
    assert client.post("/states/classify", json={"state": near}).status_code == 422
