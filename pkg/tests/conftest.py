import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from scriptmorph.config import resolve_path
from scriptmorph.strategies import load_modules, load_rules


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return resolve_path("pkg:").resolve()


@pytest.fixture(scope="session")
def registry(data_dir):
    return load_modules(data_dir / "modules")


@pytest.fixture(scope="session")
def precedence_rules(data_dir):
    return load_rules(data_dir / "rules" / "precedence.json")


@pytest.fixture(scope="session")
def signature_rules_path(data_dir) -> Path:
    return data_dir / "rules" / "signatures.json"


@pytest.fixture(scope="session")
def corpus_dir(data_dir) -> Path:
    return data_dir / "corpus"
