"""
Shared fixtures for all test modules.
"""

import logging
import os
import tempfile
from pathlib import Path

import pytest

# Ensure global config lookups are isolated from any real user config files.
# This must run before importing fairrate modules that read config paths.
os.environ.setdefault("XDG_CONFIG_HOME", tempfile.mkdtemp(prefix="fairrate-tests-xdg-"))

from fairrate.config import ENV_VARIABLES
from fairrate.model import BitSourceModel, load_instance
from fairrate.oracle import EntropyOracle

FIXTURES_DIR = Path(__file__).parent / "fixtures"


def fixture_path(name: str) -> Path:
    return FIXTURES_DIR / f"{name}.json"


@pytest.fixture
def overlapping_path() -> Path:
    """Three players sharing bits a-f; the running example of the region checks."""
    return fixture_path("overlapping")


@pytest.fixture
def independent_path() -> Path:
    return fixture_path("independent")


@pytest.fixture
def decomposable_path() -> Path:
    return fixture_path("decomposable")


@pytest.fixture
def two_terminal_path() -> Path:
    return fixture_path("two_terminal")


@pytest.fixture
def overlapping_model(overlapping_path) -> BitSourceModel:
    return load_instance(overlapping_path).model


@pytest.fixture
def independent_model(independent_path) -> BitSourceModel:
    return load_instance(independent_path).model


@pytest.fixture
def decomposable_model(decomposable_path) -> BitSourceModel:
    return load_instance(decomposable_path).model


@pytest.fixture
def two_terminal_model(two_terminal_path) -> BitSourceModel:
    return load_instance(two_terminal_path).model


@pytest.fixture
def overlapping_oracle(overlapping_model) -> EntropyOracle:
    return EntropyOracle(overlapping_model)


@pytest.fixture
def independent_oracle(independent_model) -> EntropyOracle:
    return EntropyOracle(independent_model)


@pytest.fixture
def decomposable_oracle(decomposable_model) -> EntropyOracle:
    return EntropyOracle(decomposable_model)


@pytest.fixture
def two_terminal_oracle(two_terminal_model) -> EntropyOracle:
    return EntropyOracle(two_terminal_model)


@pytest.fixture
def clean_env(monkeypatch):
    """Remove every FAIRRATE_* variable and restore the environment afterwards."""
    original_env = dict(os.environ)
    for variable in list(ENV_VARIABLES.values()) + ["FAIRRATE_USE_GLOBAL_CONFIG"]:
        monkeypatch.delenv(variable, raising=False)

    yield monkeypatch

    # load_dotenv writes straight into os.environ
    os.environ.clear()
    os.environ.update(original_env)


@pytest.fixture(autouse=True)
def reset_package_logger():
    """Undo setup_logging so caplog sees fairrate records in every test."""
    yield
    logger = logging.getLogger("fairrate")
    for handler in list(logger.handlers):
        if not isinstance(handler, logging.NullHandler):
            logger.removeHandler(handler)
    logger.setLevel(logging.NOTSET)
    logger.propagate = True
