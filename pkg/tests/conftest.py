"""Shared fixtures."""
from pathlib import Path

import pytest

from models.eisenstein import split_prime

SPEC_DIR = Path(__file__).resolve().parent.parent / "data" / "specs"


@pytest.fixture
def spec_dir() -> Path:
    return SPEC_DIR


@pytest.fixture
def info2():
    return split_prime(2)


@pytest.fixture
def info3():
    return split_prime(3)
