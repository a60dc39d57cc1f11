"""
Exact rate vectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, List, Tuple

from .coalition import Coalition
from .errors import ModelError
from .model import RationalLike, to_fraction


@dataclass(frozen=True, order=True)
class RateVector:
    """One exact coding rate per player; ``rates[i]`` belongs to player ``i``."""

    rates: Tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "rates", tuple(to_fraction(rate) for rate in self.rates))

    @classmethod
    def of(cls, values: Iterable[RationalLike]) -> "RateVector":
        return cls(tuple(to_fraction(value) for value in values))

    @classmethod
    def zeros(cls, players: int) -> "RateVector":
        return cls((Fraction(0),) * players)

    def sum_over(self, coalition: Coalition) -> Fraction:
        """r(X), the total rate of the members of ``coalition``; 0 for the empty set."""
        if coalition.ground_size != len(self.rates):
            raise ModelError(
                "Coalition and rate vector have different ground sets",
                error_code="GROUND_MISMATCH",
                context={"coalition": coalition.ground_size, "rates": len(self.rates)},
            )
        return sum((self.rates[p] for p in coalition.members), Fraction(0))

    def total(self) -> Fraction:
        return sum(self.rates, Fraction(0))

    def project(self, coalition: Coalition) -> "RateVector":
        """The coordinates of the members of ``coalition``, in player order."""
        return RateVector(tuple(self.rates[p] for p in coalition.members))

    def distance_linf(self, other: "RateVector") -> Fraction:
        self._same_length(other)
        return max((abs(a - b) for a, b in zip(self.rates, other.rates)), default=Fraction(0))

    def _same_length(self, other: "RateVector") -> None:
        if len(self.rates) != len(other.rates):
            raise ModelError(
                "Rate vectors have different lengths",
                error_code="GROUND_MISMATCH",
                context={"left": len(self.rates), "right": len(other.rates)},
            )

    def __add__(self, other: "RateVector") -> "RateVector":
        self._same_length(other)
        return RateVector(tuple(a + b for a, b in zip(self.rates, other.rates)))

    def scale(self, factor: RationalLike) -> "RateVector":
        factor = to_fraction(factor)
        return RateVector(tuple(rate * factor for rate in self.rates))

    def as_strings(self) -> List[str]:
        return [str(rate) for rate in self.rates]

    def __len__(self) -> int:
        return len(self.rates)

    def __getitem__(self, player: int) -> Fraction:
        return self.rates[player]

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.rates)

    def __str__(self) -> str:
        return "(" + ", ".join(self.as_strings()) + ")"


def mean_vector(vectors: Iterable[RateVector]) -> RateVector:
    """Exact coordinate-wise mean."""
    vectors = list(vectors)
    if not vectors:
        raise ValueError("Cannot average an empty collection of rate vectors")
    total = vectors[0]
    for vector in vectors[1:]:
        total = total + vector
    return total.scale(Fraction(1, len(vectors)))
