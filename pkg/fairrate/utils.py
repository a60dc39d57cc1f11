"""
Parsing helpers for command-line and text input.
"""

from fractions import Fraction
from typing import List, Tuple

from .coalition import Coalition, Permutation, permutation_from_labels
from .errors import ModelError, PermutationError
from .rates import RateVector


def parse_rational(text: str) -> Fraction:
    """
    Parse an exact rational such as ``"9/5"``, ``"2"`` or ``"0.3"``.

    Args:
        text: The literal to parse

    Returns:
        The value as a Fraction

    Raises:
        ValueError: If the text is not a rational literal or has a zero denominator
    """
    cleaned = text.strip()
    if not cleaned:
        raise ValueError("Empty rational literal")
    try:
        return Fraction(cleaned)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"Not an exact rational: {text!r}") from exc


def _split(text: str) -> List[str]:
    return [part for part in text.replace(" ", "").strip("()[]{}").split(",") if part]


def parse_rates(text: str) -> RateVector:
    """Parse a comma-separated rate list, e.g. ``"1,9/5,2"``."""
    parts = _split(text)
    if not parts:
        raise ValueError("No rates given")
    return RateVector(tuple(parse_rational(part) for part in parts))


def _parse_labels(text: str) -> List[int]:
    try:
        return [int(part) for part in _split(text)]
    except ValueError as exc:
        raise ValueError(f"Player labels must be integers: {text!r}") from exc


def parse_permutation(text: str, players: int) -> Permutation:
    """
    Parse a 1-based permutation such as ``"3,2,1"`` into 0-based indices.

    Raises:
        PermutationError: If the labels are not a permutation of ``1..players``
    """
    try:
        labels = _parse_labels(text)
    except ValueError as exc:
        raise PermutationError(str(exc), error_code="MALFORMED_PERMUTATION", cause=exc) from exc
    return permutation_from_labels(labels, players)


def parse_coalition(text: str, players: int) -> Coalition:
    """
    Parse 1-based labels such as ``"2,3"``; an empty string is the empty coalition.

    Raises:
        ModelError: If a label is outside ``1..players``
    """
    try:
        labels = _parse_labels(text)
    except ValueError as exc:
        raise ModelError(str(exc), error_code="PLAYER_OUT_OF_RANGE", cause=exc) from exc
    return Coalition.from_labels(labels, players)


def parse_size_range(text: str) -> Tuple[int, ...]:
    """
    Parse ``"5..15"`` (inclusive) or a comma list ``"5,8,10"`` into sizes.

    Raises:
        ValueError: If the text is malformed or describes no sizes
    """
    cleaned = text.strip()
    try:
        if ".." in cleaned:
            low, high = (int(part) for part in cleaned.split("..", 1))
            sizes = tuple(range(low, high + 1))
        else:
            sizes = tuple(int(part) for part in _split(cleaned))
    except ValueError as exc:
        raise ValueError(f"Malformed size range: {text!r}") from exc
    if not sizes or min(sizes) < 1:
        raise ValueError(f"Size range must name positive sizes: {text!r}")
    return sizes
