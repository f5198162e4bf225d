"""Session fixtures: one tiny mounted model shared by all service tests."""

import pytest
from fastapi.testclient import TestClient

from encoder_service.app import create_app
from encoder_service.config import ServiceConfig
from encoder_service.testing import build_test_model


@pytest.fixture(scope="session")
def model_dir(tmp_path_factory):
    return build_test_model(tmp_path_factory.mktemp("model"), seed=0)


@pytest.fixture(scope="session")
def service_config(model_dir):
    return ServiceConfig(model_path=str(model_dir))


@pytest.fixture(scope="session")
def client(service_config):
    with TestClient(create_app(service_config)) as c:
        yield c
