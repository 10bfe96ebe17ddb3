from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

REPO_ROOT = Path(__file__).resolve().parents[1]
FIXTURES_DIR = REPO_ROOT / "fixtures"
DATA_DIR = Path(__file__).resolve().parent / "data"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES_DIR


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def spam_model_1(fixtures_dir):
    from threshtune import parse_dataset

    return parse_dataset((fixtures_dir / "spam_model_1.csv").read_bytes(), "binary", positive_label="spam")


@pytest.fixture(scope="session")
def spam_model_2(fixtures_dir):
    from threshtune import parse_dataset

    return parse_dataset((fixtures_dir / "spam_model_2.csv").read_bytes(), "binary", positive_label="spam")


@pytest.fixture(scope="session")
def tomatoes_ripeness(fixtures_dir):
    from threshtune import parse_dataset

    return parse_dataset((fixtures_dir / "tomatoes_ripeness.csv").read_bytes(), "binary", positive_label="ripe")


@pytest.fixture(scope="session")
def tomatoes_schedule(fixtures_dir):
    from threshtune import parse_schedule

    return parse_schedule((fixtures_dir / "tomatoes_costs.json").read_bytes())
