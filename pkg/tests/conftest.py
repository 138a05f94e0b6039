"""Shared fixtures for the CES engine tests."""

import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
ENGINE = ROOT / "ces-engine"
if str(ENGINE) not in sys.path:
    sys.path.insert(0, str(ENGINE))

from model import ModelParams  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: Meijer-G quadrature over the whole half-line")


@pytest.fixture
def broken():
    return ModelParams(1.0, 1.0, "broken")


@pytest.fixture
def broken_eps3():
    return ModelParams(1.0, 3.0, "broken")


@pytest.fixture
def unbroken():
    return ModelParams(1.0, 0.5, "unbroken")


@pytest.fixture
def launcher():
    return ROOT / "ces_launcher.py"
