"""Unit tests for fairrate modules."""
