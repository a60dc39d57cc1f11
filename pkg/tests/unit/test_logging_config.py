"""
Unit tests for logging setup.
"""

import io
import json
import logging

import pytest

from fairrate.decomposition import finest_decomposer
from fairrate.logging_config import StructuredFormatter, resolve_level, setup_logging


class TestResolveLevel:
    def test_names_and_numbers(self):
        assert resolve_level("debug") == logging.DEBUG
        assert resolve_level(" WARNING ") == logging.WARNING
        assert resolve_level(logging.ERROR) == logging.ERROR

    def test_unknown_name(self):
        with pytest.raises(ValueError, match="Unknown log level"):
            resolve_level("chatty")


class TestSetupLogging:
    def test_text_format(self):
        stream = io.StringIO()
        logger = setup_logging("info", stream=stream)
        logger.info("hello")
        assert "| fairrate | INFO | hello" in stream.getvalue()
        assert logger.propagate is False

    def test_reconfigure_keeps_one_handler(self):
        setup_logging("info", stream=io.StringIO())
        logger = setup_logging("debug")
        assert len(logger.handlers) == 1
        assert logger.handlers[0].level == logging.DEBUG

    def test_force_replaces_handler(self):
        first = setup_logging("info", stream=io.StringIO())
        old = first.handlers[0]
        logger = setup_logging("info", structured=True, stream=io.StringIO(), force=True)
        assert logger.handlers[0] is not old
        assert isinstance(logger.handlers[0].formatter, StructuredFormatter)

    def test_structured_records_carry_oracle_context(self, decomposable_oracle):
        stream = io.StringIO()
        setup_logging("debug", structured=True, stream=stream)
        finest_decomposer(decomposable_oracle)

        payloads = [json.loads(line) for line in stream.getvalue().splitlines()]
        phases = [p["phase"] for p in payloads if "phase" in p]
        assert "finest_decomposer" in phases
        summary = next(p for p in payloads if "blocks" in p)
        assert summary["players"] == 3
        assert summary["blocks"] == 2
        assert summary["name"] == "fairrate.decomposition"
