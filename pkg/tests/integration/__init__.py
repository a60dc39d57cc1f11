"""Integration tests on generated games."""
