from pathlib import Path

import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from balanced.main import app
from balanced.services.digraph import parse_graph

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def client():
    return TestClient(app)


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def fixture_path():
    return lambda name: FIXTURES / name


@pytest.fixture
def load_graph():
    return lambda name: parse_graph((FIXTURES / name).read_text(encoding="utf-8"))
