"""Shared fixtures for the nilplab test suite."""

from pathlib import Path

import pytest

from src.cli import configure_logging
from src.config import settings
from src.exactmath import GF, QQ
from src.scenarios import build_two_dim_solvable, build_xixi, build_xwi


DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(autouse=True, scope="session")
def quiet_logging():
    configure_logging(settings.log_level)


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def f5():
    return GF(5)


@pytest.fixture
def xixi4():
    """x1 x1 = x2, x2 x2 = x3."""
    return build_xixi(4)


@pytest.fixture
def xwi4():
    return build_xwi(4)


@pytest.fixture
def two_dim_lie():
    return build_two_dim_solvable(QQ)


@pytest.fixture
def small_max_dim(monkeypatch):
    monkeypatch.setattr(settings, "max_dim", 4)
    return 4
