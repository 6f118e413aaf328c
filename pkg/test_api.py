"""
Test script for the API
Root and health endpoints, the generation protocol and the evaluation routes
"""

import pytest
from fastapi.testclient import TestClient

from core import __version__
from core.main import app


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as test_client:
        yield test_client


def test_root_and_health(client):
    print("🧪 Testing service endpoints...")
    response = client.get("/")
    assert response.status_code == 200
    assert response.json()["version"] == __version__

    health = client.get("/health").json()
    assert health["status"] == "healthy"
    assert set(health["components"]) == {"generation", "evaluation"}
    print("✅ Service endpoints respond")


def test_api_info(client):
    info = client.get("/api/v1/info").json()
    assert info["endpoints"]["generate"] == "/api/v1/generate"
    assert info["filter_rules"] == "default-1"
    assert info["abnormality_classes"] == 20


def test_generate_endpoint(client):
    response = client.post(
        "/api/v1/generate",
        json={"prompt": "pleural effusion: 0.66, pneumothorax: 0.31 TL;DR", "max_new_tokens": 64, "request_id": "s1"},
    )
    assert response.status_code == 200, f"Generation failed: {response.text}"
    assert response.json() == {
        "text": "There is likely a pleural effusion. There may be a pneumothorax.",
        "request_id": "s1",
    }


def test_generate_endpoint_caps_tokens(client):
    response = client.post("/api/v1/generate", json={"prompt": "lesion: 0.87 TL;DR", "max_new_tokens": 2})
    assert response.json()["text"] == "There is"


@pytest.mark.parametrize(
    "body",
    [{"prompt": "write a report"}, {"prompt": ""}, {"prompt": "lesion: 0.87 TL;DR", "max_new_tokens": 0}],
)
def test_generate_endpoint_rejects_bad_requests(client, body):
    assert client.post("/api/v1/generate", json=body).status_code == 422


def test_rouge_endpoint(client):
    response = client.post(
        "/api/v1/evaluation/rouge",
        json={"hypothesis": "the cat on the mat", "reference": "the cat sat on the mat"},
    )
    assert response.status_code == 200
    body = response.json()
    assert body["precision"] == 1.0
    assert body["f"] == pytest.approx(10 / 11, abs=1e-12)
    assert body["lcs_len"] == 5

    assert client.post("/api/v1/evaluation/rouge", json={"hypothesis": "a", "reference": "a", "beta": 0}).status_code == 422


def test_comparison_endpoint(client):
    response = client.post(
        "/api/v1/evaluation/comparison",
        json={"rows": [{"system": "template backend", "rouge_l": 0.2}], "include_baselines": True},
    )
    assert response.status_code == 200
    body = response.json()
    assert [row["system"] for row in body["rows"]][:2] == ["template backend", "ST"]
    assert body["rows"][-1] == {"system": "OURS", "rouge_l": 0.373}
    assert body["table"].splitlines()[-1].split() == ["OURS", "0.373", "*"]


def test_comparison_endpoint_needs_rows(client):
    assert client.post("/api/v1/evaluation/comparison", json={"rows": []}).status_code == 422
