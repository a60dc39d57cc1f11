"""
Shapley value of the source-coding game.

The exact solvers work on a full entropy table with integer arithmetic over a
common denominator; the sampler averages greedy marginal vectors of seeded
random permutations.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import factorial, lcm
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Sequence

import numpy as np

from .oracle import EntropyOracle
from .polyhedron import edmonds_greedy, enumerate_extreme_points
from .rates import RateVector, mean_vector

if TYPE_CHECKING:
    from .decomposition import DecomposerResult

logger = logging.getLogger(__name__)

RNG_ALGORITHM = "PCG64"


class ShapleyMethod(str, Enum):
    DIRECT = "direct"
    PERMUTATIONS = "perms"
    SAMPLED = "sampled"
    DECOMPOSED = "decomposed"


@dataclass(frozen=True)
class ShapleyResult:
    """
    A Shapley vector and what it cost.

    ``oracle_calls`` counts distinct coalitions evaluated; ``raw_oracle_calls``
    counts every request. Sampled results record the seed and generator so the
    estimate can be reproduced.
    """

    value: RateVector
    method: ShapleyMethod
    oracle_calls: int
    raw_oracle_calls: int = 0
    sample_count: Optional[int] = None
    seed: Optional[int] = None
    rng_algorithm: Optional[str] = None
    extreme_point_mean: Optional[RateVector] = None
    extreme_point_mean_differs: Optional[bool] = None
    decomposer: Optional["DecomposerResult"] = None

    def to_dict(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {
            "value": self.value.as_strings(),
            "method": self.method.value,
            "oracle_calls": self.oracle_calls,
            "raw_oracle_calls": self.raw_oracle_calls,
        }
        if self.sample_count is not None:
            payload.update(sample_count=self.sample_count, seed=self.seed, rng_algorithm=self.rng_algorithm)
        if self.extreme_point_mean is not None:
            payload["extreme_point_mean"] = self.extreme_point_mean.as_strings()
            payload["extreme_point_mean_differs"] = self.extreme_point_mean_differs
        if self.decomposer is not None:
            payload["decomposer"] = self.decomposer.to_dict()
        return payload


def shapley_from_table(players: int, table: Sequence[Fraction]) -> RateVector:
    """
    Weighted-marginal Shapley formula over a complete entropy table.

    Each player's value is sum over C not containing i of
    |C|! (|V|-|C|-1)! / |V|! * (H(C + i) - H(C)). Makes no oracle calls.
    """
    if len(table) != 1 << players:
        raise ValueError(f"Expected a table of {1 << players} entries, got {len(table)}")
    denominator = lcm(*(value.denominator for value in table))
    scaled = [value.numerator * (denominator // value.denominator) for value in table]

    cardinality = [0] * len(table)
    for mask in range(1, len(table)):
        cardinality[mask] = cardinality[mask >> 1] + (mask & 1)

    # sums[i][k]: total marginal of player i over coalitions of size k without i
    sums: List[List[int]] = [[0] * players for _ in range(players)]
    for mask in range(len(table)):
        size = cardinality[mask]
        if size == players:
            continue
        base = scaled[mask]
        for player in range(players):
            bit = 1 << player
            if not mask & bit:
                sums[player][size] += scaled[mask | bit] - base

    weights = [factorial(k) * factorial(players - k - 1) for k in range(players)]
    scale = factorial(players) * denominator
    return RateVector(
        tuple(
            Fraction(sum(w * s for w, s in zip(weights, sums[player])), scale)
            for player in range(players)
        )
    )


def shapley_direct(
    oracle: EntropyOracle,
    *,
    max_players: Optional[int] = None,
    force: bool = False,
) -> ShapleyResult:
    """
    Exact Shapley value from the weighted-marginal formula.

    Evaluates every coalition once, so ``oracle_calls`` is 2^|V|.

    Raises:
        EnumerationLimitError: If |V| exceeds the cap and ``force`` is False
    """
    before = oracle.ledger.snapshot()
    with oracle.ensure_phase("shapley_direct"):
        table = oracle.table(max_players=max_players, force=force)
    cost = oracle.ledger.since(before)
    value = shapley_from_table(oracle.ground_size, table)
    logger.debug("Direct Shapley over %s players used %s oracle calls", oracle.ground_size, cost.distinct)
    return ShapleyResult(
        value=value,
        method=ShapleyMethod.DIRECT,
        oracle_calls=cost.distinct,
        raw_oracle_calls=cost.raw,
    )


def shapley_by_permutations(
    oracle: EntropyOracle,
    *,
    max_players: Optional[int] = None,
    force: bool = False,
) -> ShapleyResult:
    """
    Mean of the greedy marginal vectors over all |V|! permutations.

    Also reports the centroid of the distinct extreme points, which differs from
    the permutation mean when some marginal vectors coincide.
    """
    before = oracle.ledger.snapshot()
    with oracle.ensure_phase("shapley_by_permutations"):
        extreme = enumerate_extreme_points(oracle, max_players=max_players, force=force)
    cost = oracle.ledger.since(before)

    value = mean_vector(extreme.by_permutation.values())
    centroid = extreme.mean()
    if centroid != value:
        logger.info("Extreme-point centroid %s differs from the permutation mean %s", centroid, value)
    return ShapleyResult(
        value=value,
        method=ShapleyMethod.PERMUTATIONS,
        oracle_calls=cost.distinct,
        raw_oracle_calls=cost.raw,
        extreme_point_mean=centroid,
        extreme_point_mean_differs=centroid != value,
    )


def shapley_sampled(oracle: EntropyOracle, sample_count: int, seed: int) -> ShapleyResult:
    """
    Monte Carlo estimate from ``sample_count`` uniformly drawn permutations.

    Every sample is a core point, so the estimate sums to H(V) exactly.

    Raises:
        ValueError: If ``sample_count`` is less than 1
    """
    if sample_count < 1:
        raise ValueError("sample_count must be at least 1")
    players = oracle.ground_size
    rng = np.random.default_rng(seed)
    totals = [Fraction(0)] * players

    before = oracle.ledger.snapshot()
    with oracle.ensure_phase("shapley_sampled"):
        for _ in range(sample_count):
            perm = [int(p) for p in rng.permutation(players)]
            marginal = edmonds_greedy(oracle, perm)
            totals = [a + b for a, b in zip(totals, marginal.rates)]
    cost = oracle.ledger.since(before)

    return ShapleyResult(
        value=RateVector(tuple(total / sample_count for total in totals)),
        method=ShapleyMethod.SAMPLED,
        oracle_calls=cost.distinct,
        raw_oracle_calls=cost.raw,
        sample_count=sample_count,
        seed=seed,
        rng_algorithm=RNG_ALGORITHM,
    )
