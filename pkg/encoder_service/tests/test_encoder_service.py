"""Endpoint conformance: schemas, truncation, pooling, determinism, errors."""

import math
import threading

import numpy as np
import pytest
from fastapi.testclient import TestClient

from encoder_service.app import create_app
from encoder_service.config import ServiceConfig, ServiceConfigError

PAIR_KEYS = {"dim", "cls", "tokens_a", "tokens_b", "truncated_a", "truncated_b",
             "model_id"}
SINGLE_KEYS = {"dim", "summary", "tokens", "model_id"}


def post_pair(client, text_a, text_b, max_tokens=512):
    return client.post("/v1/encode-pair", json={
        "text_a": text_a, "text_b": text_b, "max_tokens": max_tokens,
    })


def post_single(client, text, max_tokens=512):
    return client.post("/v1/encode-single", json={
        "text": text, "max_tokens": max_tokens,
    })


class TestSchemas:
    def test_pair_response_schema(self, client):
        obj = post_pair(client, "pumpe leck geprueft", "ventil getauscht").json()
        assert set(obj) == PAIR_KEYS
        dim = obj["dim"]
        assert len(obj["cls"]) == dim
        assert all(len(row) == dim for row in obj["tokens_a"])
        assert all(len(row) == dim for row in obj["tokens_b"])
        assert len(obj["tokens_a"]) >= 1 and len(obj["tokens_b"]) >= 1
        assert isinstance(obj["truncated_a"], bool)
        assert isinstance(obj["truncated_b"], bool)
        flat = obj["cls"] + [v for row in obj["tokens_a"] for v in row]
        assert all(math.isfinite(v) for v in flat)

    def test_single_response_schema(self, client):
        obj = post_single(client, "druck alarm sensor").json()
        assert set(obj) == SINGLE_KEYS
        assert len(obj["summary"]) == obj["dim"]
        assert all(len(row) == obj["dim"] for row in obj["tokens"])
        assert len(obj["tokens"]) == 3

    def test_health(self, client):
        obj = client.get("/v1/health").json()
        assert set(obj) == {"status", "model_id", "dim"}
        assert obj["status"] == "ok"
        pair = post_pair(client, "pumpe", "ventil").json()
        assert obj["model_id"] == pair["model_id"]
        assert obj["dim"] == pair["dim"]

    def test_dim_is_model_hidden_size(self, client):
        # the test model is built with hidden size 32
        assert client.get("/v1/health").json()["dim"] == 32

    def test_request_schema_enforced(self, client):
        resp = client.post("/v1/encode-pair", json={"text_a": "pumpe"})
        assert resp.status_code == 422


class TestTruncation:
    def test_pair_budget_row_counts(self, client):
        long_text = " ".join(["pumpe"] * 600)
        obj = post_pair(client, long_text, "ventil getauscht").json()
        # (512 - 3) // 2 positions remain per record beside [CLS] and two [SEP]
        assert len(obj["tokens_a"]) == 254
        assert obj["truncated_a"] is True
        assert len(obj["tokens_b"]) == 2
        assert obj["truncated_b"] is False

    def test_pair_respects_request_max_tokens(self, client):
        long_text = " ".join(["druck"] * 100)
        obj = post_pair(client, long_text, long_text, max_tokens=64).json()
        budget = (64 - 3) // 2
        assert len(obj["tokens_a"]) == budget
        assert len(obj["tokens_b"]) == budget
        assert obj["truncated_a"] and obj["truncated_b"]

    def test_single_budget(self, client):
        obj = post_single(client, " ".join(["motor"] * 600)).json()
        assert len(obj["tokens"]) == 510  # 512 minus [CLS] and [SEP]

    def test_short_text_not_truncated(self, client):
        obj = post_pair(client, "lager riss", "kessel filter alarm").json()
        assert obj["truncated_a"] is False and obj["truncated_b"] is False
        assert len(obj["tokens_a"]) == 2 and len(obj["tokens_b"]) == 3


class TestPooling:
    def test_mean_summary_matches_token_rows(self, client):
        obj = post_single(client, "pumpe dichtung leck temperatur").json()
        tokens = np.asarray(obj["tokens"])
        np.testing.assert_allclose(
            np.asarray(obj["summary"]), tokens.mean(axis=0), atol=1e-5
        )

    def test_cls_summary_mode(self, model_dir):
        config = ServiceConfig(model_path=str(model_dir), summary_mode="cls")
        with TestClient(create_app(config)) as cls_client:
            obj = post_single(cls_client, "pumpe dichtung leck temperatur").json()
        tokens = np.asarray(obj["tokens"])
        summary = np.asarray(obj["summary"])
        assert summary.shape == (obj["dim"],)
        assert not np.allclose(summary, tokens.mean(axis=0), atol=1e-4)


class TestDeterminism:
    def test_identical_requests_identical_bodies(self, client):
        payload = {"text_a": "welle ausgefallen", "text_b": "welle instand gemeldet",
                   "max_tokens": 512}
        first = client.post("/v1/encode-pair", json=payload)
        second = client.post("/v1/encode-pair", json=payload)
        assert first.content == second.content

    def test_identical_records_same_row_counts(self, client):
        # contextual vectors differ across positions even for identical texts;
        # the stable part of the contract is the token partition itself
        obj = post_pair(client, "sensor alarm erneut", "sensor alarm erneut").json()
        assert len(obj["tokens_a"]) == len(obj["tokens_b"]) == 3

    def test_concurrent_requests_match_serial(self, client):
        payload = {"text_a": "filter getauscht", "text_b": "filter wieder normal",
                   "max_tokens": 512}
        serial = client.post("/v1/encode-pair", json=payload).content
        results = [None] * 4

        def hit(i):
            results[i] = client.post("/v1/encode-pair", json=payload).content

        threads = [threading.Thread(target=hit, args=(i,)) for i in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert all(r == serial for r in results)


class TestErrors:
    @pytest.mark.parametrize("text", ["", "   "])
    def test_empty_text_is_400(self, client, text):
        assert post_pair(client, text, "ventil").status_code == 400
        assert post_pair(client, "ventil", text).status_code == 400
        assert post_single(client, text).status_code == 400

    def test_oversize_request_is_413(self, client):
        assert post_pair(client, "pumpe", "ventil", max_tokens=1024).status_code == 413
        assert post_single(client, "pumpe", max_tokens=4096).status_code == 413

    def test_no_room_for_content_is_413(self, client):
        assert post_pair(client, "pumpe", "ventil", max_tokens=4).status_code == 413
        assert post_single(client, "pumpe", max_tokens=2).status_code == 413

    def test_model_not_loaded_is_503(self):
        with TestClient(create_app()) as bare:
            assert bare.get("/v1/health").status_code == 503
            assert post_pair(bare, "pumpe", "ventil").status_code == 503
            assert post_single(bare, "pumpe").status_code == 503


class TestConfig:
    def test_bad_summary_mode_rejected(self, model_dir):
        with pytest.raises(ServiceConfigError):
            ServiceConfig(model_path=str(model_dir), summary_mode="max")

    def test_max_tokens_beyond_model_limit_rejected(self, model_dir):
        from encoder_service.model import MountedModel

        config = ServiceConfig(model_path=str(model_dir), max_tokens=1024)
        with pytest.raises(ServiceConfigError):
            MountedModel(config)  # test model caps positions at 512

    def test_missing_model_path_rejected(self):
        with pytest.raises(ServiceConfigError):
            ServiceConfig(model_path="")
