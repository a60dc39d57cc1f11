"""
The achievable rate region and its extreme points.

The Slepian-Wolf region, the core and the base polyhedron of the dual entropy
are the same set. The Slepian-Wolf bound H(X | V \\ X) and the dual entropy
H#(X) are the same number, so those two checks share their lower bounds; the
core check tests the upper bounds r(X) <= H(X) instead and is the independent
form.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .coalition import Coalition, Permutation, iter_coalitions, validate_permutation
from .config import DEFAULT_MAX_PERMUTATION_PLAYERS, check_enumeration_limit
from .errors import ModelError
from .oracle import EntropyOracle
from .rates import RateVector, mean_vector

logger = logging.getLogger(__name__)

LOWER = "lower"
UPPER = "upper"
SUM_RATE = "sum_rate"


@dataclass(frozen=True)
class Violation:
    """The first failed constraint: ``actual`` is r(X), ``bound`` the value it was tested against."""

    coalition: Coalition
    bound: Fraction
    actual: Fraction
    kind: str

    def __str__(self) -> str:
        relation = {LOWER: ">=", UPPER: "<=", SUM_RATE: "=="}[self.kind]
        return f"r({self.coalition}) = {self.actual} violates {relation} {self.bound}"


@dataclass(frozen=True)
class MembershipReport:
    """Result of a membership check; ``tight_sets`` lists every nonempty X with r(X) = H(X)."""

    is_member: bool
    violated: Optional[Violation]
    tight_sets: Tuple[Coalition, ...]
    form: str
    oracle_calls: int = 0

    def __bool__(self) -> bool:
        return self.is_member


def _check_length(oracle: EntropyOracle, rates: RateVector) -> None:
    if len(rates) != oracle.ground_size:
        raise ModelError(
            f"Expected {oracle.ground_size} rates, got {len(rates)}",
            error_code="GROUND_MISMATCH",
            context={"players": oracle.ground_size, "rates": len(rates)},
        )


def _check_region(
    oracle: EntropyOracle,
    rates: RateVector,
    *,
    form: str,
    proper_bound: Callable[[List[Fraction], int, int], Fraction],
    kind: str,
    allow_excess_sum_rate: bool,
    max_players: Optional[int],
    force: bool,
) -> MembershipReport:
    _check_length(oracle, rates)
    players = oracle.ground_size
    full = (1 << players) - 1
    before = oracle.ledger.snapshot()
    with oracle.ensure_phase(form):
        table = oracle.table(max_players=max_players, force=force)

    violated: Optional[Violation] = None
    tight: List[Coalition] = []
    for coalition in iter_coalitions(players):
        actual = rates.sum_over(coalition)
        if actual == table[coalition.mask]:
            tight.append(coalition)
        if violated is not None:
            continue
        if coalition.mask == full:
            total = table[full]
            if actual < total or (actual > total and not allow_excess_sum_rate):
                violated = Violation(coalition, total, actual, SUM_RATE)
            continue
        bound = proper_bound(table, coalition.mask, full)
        if (kind == LOWER and actual < bound) or (kind == UPPER and actual > bound):
            violated = Violation(coalition, bound, actual, kind)

    report = MembershipReport(
        is_member=violated is None,
        violated=violated,
        tight_sets=tuple(tight),
        form=form,
        oracle_calls=oracle.ledger.since(before).distinct,
    )
    logger.debug("%s check of %s: member=%s", form, rates, report.is_member)
    return report


def check_slepian_wolf(
    oracle: EntropyOracle,
    rates: RateVector,
    *,
    allow_excess_sum_rate: bool = False,
    max_players: Optional[int] = None,
    force: bool = False,
) -> MembershipReport:
    """
    Test r(X) >= H(X | V \\ X) for every proper X and r(V) = H(V).

    Constraints are visited by cardinality, then lexicographically, and the first
    failure is reported.

    Args:
        oracle: Entropy oracle of the game
        rates: Candidate rate vector
        allow_excess_sum_rate: Accept r(V) >= H(V); decomposition results do not apply then
        max_players: Cap on |V|
        force: Run above the cap

    Raises:
        EnumerationLimitError: If |V| exceeds the cap
        ModelError: If ``rates`` has the wrong length
    """
    return _check_region(
        oracle,
        rates,
        form="slepian_wolf",
        proper_bound=lambda table, mask, full: table[full] - table[full & ~mask],
        kind=LOWER,
        allow_excess_sum_rate=allow_excess_sum_rate,
        max_players=max_players,
        force=force,
    )


def check_core(
    oracle: EntropyOracle,
    rates: RateVector,
    *,
    allow_excess_sum_rate: bool = False,
    max_players: Optional[int] = None,
    force: bool = False,
) -> MembershipReport:
    """
    Test r(X) <= H(X) for every proper X and r(V) = H(V).

    Raises:
        ModelError: If ``allow_excess_sum_rate`` is set; the core has no relaxed form
        EnumerationLimitError: If |V| exceeds the cap
    """
    if allow_excess_sum_rate:
        raise ModelError(
            "The core is only defined with r(V) = H(V)",
            error_code="UNSUPPORTED_RELAXATION",
        )
    return _check_region(
        oracle,
        rates,
        form="core",
        proper_bound=lambda table, mask, full: table[mask],
        kind=UPPER,
        allow_excess_sum_rate=False,
        max_players=max_players,
        force=force,
    )


def check_dual_base(
    oracle: EntropyOracle,
    rates: RateVector,
    *,
    allow_excess_sum_rate: bool = False,
    max_players: Optional[int] = None,
    force: bool = False,
) -> MembershipReport:
    """Test r(X) >= H#(X) for every proper X and r(V) = H(V)."""
    return _check_region(
        oracle,
        rates,
        form="dual_base",
        proper_bound=lambda table, mask, full: table[full] - table[full & ~mask],
        kind=LOWER,
        allow_excess_sum_rate=allow_excess_sum_rate,
        max_players=max_players,
        force=force,
    )


CHECKS = {
    "sw": check_slepian_wolf,
    "core": check_core,
    "dual": check_dual_base,
}


def greedy_from_table(table: Sequence[Fraction], permutation: Permutation) -> RateVector:
    """Marginal vector of ``permutation`` read off a full entropy table."""
    rates = [Fraction(0)] * len(permutation)
    prefix = 0
    previous = Fraction(0)
    for player in permutation:
        prefix |= 1 << player
        value = table[prefix]
        rates[player] = value - previous
        previous = value
    return RateVector(tuple(rates))


def edmonds_greedy(oracle: EntropyOracle, permutation: Sequence[int]) -> RateVector:
    """
    Marginal vector: the k-th player in order gets H(first k) - H(first k-1).

    Uses one oracle call per player; H of the empty prefix is 0 without a call.

    Raises:
        PermutationError: If ``permutation`` is not a bijection on the players
    """
    perm = validate_permutation(permutation, oracle.ground_size)
    rates = [Fraction(0)] * len(perm)
    prefix = 0
    previous = Fraction(0)
    with oracle.ensure_phase("edmonds_greedy"):
        for player in perm:
            prefix |= 1 << player
            value = oracle.evaluate_mask(prefix)
            rates[player] = value - previous
            previous = value
    return RateVector(tuple(rates))


@dataclass(frozen=True)
class ExtremePointSet:
    """Distinct marginal vectors over all permutations, sorted, plus the permutation map."""

    points: Tuple[RateVector, ...]
    by_permutation: Dict[Permutation, RateVector] = field(default_factory=dict)
    oracle_calls: int = 0

    def mean(self) -> RateVector:
        """Centroid of the distinct extreme points."""
        return mean_vector(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, vector: object) -> bool:
        return vector in self.points

    def __iter__(self):
        return iter(self.points)


def enumerate_extreme_points(
    oracle: EntropyOracle,
    *,
    max_players: Optional[int] = None,
    force: bool = False,
) -> ExtremePointSet:
    """
    Run the greedy algorithm for every permutation of the players.

    Args:
        oracle: Entropy oracle of the game
        max_players: Cap on |V| (|V|! permutations); defaults to 9
        force: Run above the cap, logging a warning

    Raises:
        EnumerationLimitError: If |V| exceeds the cap and ``force`` is False
    """
    players = oracle.ground_size
    check_enumeration_limit(
        players,
        max_players,
        operation="enumerate_extreme_points",
        force=force,
        default=DEFAULT_MAX_PERMUTATION_PLAYERS,
    )
    before = oracle.ledger.snapshot()
    with oracle.ensure_phase("enumerate_extreme_points"):
        table = oracle.table(force=True)

    by_permutation: Dict[Permutation, RateVector] = {}
    for perm in permutations(range(players)):
        by_permutation[perm] = greedy_from_table(table, perm)
    points = tuple(sorted(set(by_permutation.values())))
    logger.info("Found %s extreme points over %s permutations", len(points), len(by_permutation))
    return ExtremePointSet(
        points=points,
        by_permutation=by_permutation,
        oracle_calls=oracle.ledger.since(before).distinct,
    )
