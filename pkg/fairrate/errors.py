"""
Custom exceptions for fairrate.
"""

from __future__ import annotations

from typing import Any, Dict, Optional


class FairRateError(Exception):
    """Base exception for all fairrate errors."""

    def __init__(
        self,
        message: str,
        *,
        error_code: Optional[str] = None,
        context: Optional[Dict[str, Any]] = None,
        cause: Optional[Exception] = None,
    ) -> None:
        super().__init__(message)
        self.error_code = error_code
        self.context = dict(context) if context else {}
        self.cause = cause

    def __str__(self) -> str:
        base_msg = super().__str__()
        prefix = f"[{self.error_code}] " if self.error_code else ""
        rendered = f"{prefix}{base_msg}"

        if self.context:
            context_pairs = ", ".join(
                f"{key}={repr(value)}" for key, value in sorted(self.context.items())
            )
            rendered = f"{rendered} (Context: {context_pairs})"
        return rendered


class ModelError(FairRateError):
    """Raised when a source model or coalition is invalid for the game."""


class InstanceFormatError(ModelError):
    """Raised when an instance file cannot be decoded into a model."""

    def __init__(
        self,
        message: str,
        *,
        path: Optional[str] = None,
        error_code: Optional[str] = "INVALID_INSTANCE",
        context: Optional[Dict[str, Any]] = None,
        cause: Optional[Exception] = None,
    ) -> None:
        merged: Dict[str, Any] = dict(context) if context else {}
        if path is not None:
            merged.setdefault("path", path)
        super().__init__(message, error_code=error_code, context=merged, cause=cause)
        self.path = path


class EnumerationLimitError(FairRateError):
    """Raised when an exhaustive operation would exceed its ground-set cap."""

    def __init__(
        self,
        message: str,
        *,
        players: int,
        limit: int,
        operation: str,
        cause: Optional[Exception] = None,
    ) -> None:
        super().__init__(
            message,
            error_code="ENUMERATION_LIMIT",
            context={"players": players, "limit": limit, "operation": operation},
            cause=cause,
        )
        self.players = players
        self.limit = limit
        self.operation = operation


class PermutationError(FairRateError):
    """Raised when a permutation is not a bijection on the players."""


class PartitionError(FairRateError):
    """Raised for invalid partitions and overlapping or incomplete direct sums."""


class GenerationError(FairRateError):
    """Raised when an instance cannot be generated from a GenSpec."""


class ReportError(FairRateError):
    """Raised when a benchmark report cannot be written."""


class RegressionError(FairRateError):
    """Raised when a benchmark's embedded consistency check fails."""
