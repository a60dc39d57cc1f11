"""
Game decomposition.

A partition P of the players is a decomposer when H(V) equals the sum of H(C)
over its blocks; the blocks are then mutually independent source groups and
the Shapley value splits into the Shapley values of the subgames.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from .coalition import (
    Coalition,
    Partition,
    Permutation,
    identity_permutation,
    validate_permutation,
)
from .config import check_enumeration_limit, default_n_jobs
from .errors import PartitionError
from .model import BitSourceModel
from .oracle import EntropyOracle
from .rates import RateVector
from .shapley import RNG_ALGORITHM, ShapleyMethod, ShapleyResult, shapley_from_table, shapley_sampled

logger = logging.getLogger(__name__)

DEFAULT_SAMPLES_FACTOR = 100

__all__ = [
    "DecomposerResult",
    "Partition",
    "core_dimension",
    "direct_sum",
    "finest_decomposer",
    "is_decomposer",
    "partition_cost",
    "restrict_model",
    "shapley_decomposed",
]


def restrict_model(model: BitSourceModel, coalition: Coalition) -> BitSourceModel:
    """
    Subgame model over ``coalition``; ``global_index`` maps its players back.

    Raises:
        ModelError: If ``coalition`` is empty
    """
    return model.restrict(coalition)


def _check_partition(oracle: EntropyOracle, partition: Partition) -> None:
    if partition.ground_size != oracle.ground_size:
        raise PartitionError(
            "Partition is over a different ground set",
            error_code="INVALID_PARTITION",
            context={"partition": partition.ground_size, "oracle": oracle.ground_size},
        )


def partition_cost(oracle: EntropyOracle, partition: Partition) -> Fraction:
    """Sum of the block entropies; never below H(V) by submodularity."""
    _check_partition(oracle, partition)
    return sum((oracle.evaluate(block) for block in partition), Fraction(0))


def is_decomposer(oracle: EntropyOracle, partition: Partition) -> bool:
    """
    True iff the block entropies add up to H(V) exactly.

    Raises:
        PartitionError: If ``partition`` is over another ground set
    """
    with oracle.ensure_phase("is_decomposer"):
        cost = partition_cost(oracle, partition)
        return cost == oracle.evaluate(Coalition.full(oracle.ground_size))


class _DisjointSet:
    """Union-find with path compression and union by rank."""

    def __init__(self, size: int):
        self.parent = list(range(size))
        self.rank = [0] * size

    def find(self, item: int) -> int:
        root = item
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[item] != root:
            self.parent[item], item = root, self.parent[item]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1

    def groups(self) -> List[int]:
        """One bitmask per component."""
        masks: Dict[int, int] = {}
        for item in range(len(self.parent)):
            root = self.find(item)
            masks[root] = masks.get(root, 0) | 1 << item
        return list(masks.values())


@dataclass(frozen=True)
class DecomposerResult:
    """
    Output of the finest-decomposer search.

    ``intermediate_sets[i]`` is the set grown for player ``i`` before merging.
    ``witness_extreme_point`` is the greedy marginal vector of ``permutation``.
    """

    finest: Partition
    decomposable: bool
    witness_extreme_point: RateVector
    oracle_calls: int
    raw_oracle_calls: int
    intermediate_sets: Tuple[Coalition, ...]
    permutation: Permutation

    def to_dict(self) -> Dict[str, Any]:
        return {
            "finest": self.finest.labels(),
            "decomposable": self.decomposable,
            "extreme_point": self.witness_extreme_point.as_strings(),
            "oracle_calls": self.oracle_calls,
            "raw_oracle_calls": self.raw_oracle_calls,
            "intermediate_sets": [list(s.labels()) for s in self.intermediate_sets],
            "permutation": [p + 1 for p in self.permutation],
        }


def finest_decomposer(
    oracle: EntropyOracle,
    permutation: Optional[Sequence[int]] = None,
) -> DecomposerResult:
    """
    Find the finest decomposer with O(|V|^2) oracle calls.

    Players are added in ``permutation`` order and receive their greedy marginal
    rate. The set grown for the newest player starts as the whole prefix and then,
    walking back through the earlier players once, drops each one whose removal
    leaves a tight set (r(S) = H(S)). Sets that intersect are merged; the merged
    groups are the finest decomposer.

    Args:
        oracle: Entropy oracle of the game
        permutation: Player order (0-based); identity when omitted

    Raises:
        PermutationError: If ``permutation`` is not a bijection on the players
    """
    players = oracle.ground_size
    perm = (
        identity_permutation(players)
        if permutation is None
        else validate_permutation(permutation, players)
    )
    rates = [Fraction(0)] * players
    grown = [0] * players

    def rate_of(mask: int) -> Fraction:
        total = Fraction(0)
        for player in perm:
            if mask >> player & 1:
                total += rates[player]
        return total

    before = oracle.ledger.snapshot()
    with oracle.ensure_phase("finest_decomposer"):
        first = perm[0]
        rates[first] = oracle.evaluate_mask(1 << first)
        grown[first] = 1 << first
        prefix = 1 << first
        for i in range(1, players):
            player = perm[i]
            previous_prefix = prefix
            prefix |= 1 << player
            current = prefix
            rates[player] = oracle.evaluate_mask(current) - oracle.evaluate_mask(previous_prefix)
            for j in range(1, i + 1):
                candidate = current & ~(1 << perm[i - j])
                if rate_of(candidate) == oracle.evaluate_mask(candidate):
                    current = candidate
            grown[player] = current
    cost = oracle.ledger.since(before)

    merged = _DisjointSet(players)
    for mask in grown:
        members = Coalition(mask, players).members
        for other in members[1:]:
            merged.union(members[0], other)
    finest = Partition.from_masks(merged.groups(), players)

    logger.info(
        "Finest decomposer of %s players has %s blocks (%s oracle calls)",
        players,
        len(finest),
        cost.distinct,
        extra={"players": players, "blocks": len(finest), "oracle_calls": cost.distinct},
    )
    return DecomposerResult(
        finest=finest,
        decomposable=len(finest) > 1,
        witness_extreme_point=RateVector(tuple(rates)),
        oracle_calls=cost.distinct,
        raw_oracle_calls=cost.raw,
        intermediate_sets=tuple(Coalition(mask, players) for mask in grown),
        permutation=perm,
    )


def direct_sum(
    parts: Sequence[Tuple[Coalition, RateVector]],
    *,
    require_cover: bool = True,
) -> RateVector:
    """
    Place each part's coordinates at its players' positions.

    Args:
        parts: ``(coalition, vector)`` pairs; ``vector[k]`` belongs to the k-th
            smallest member of ``coalition``
        require_cover: Demand that the coalitions cover every player. When False
            the result is over the union of the coalitions in increasing player order.

    Raises:
        PartitionError: If parts overlap, have mismatched lengths, or leave players uncovered
    """
    if not parts:
        raise PartitionError("Direct sum of no parts", error_code="INVALID_DIRECT_SUM")
    ground_size = parts[0][0].ground_size
    placed: Dict[int, Fraction] = {}
    covered = 0
    for coalition, vector in parts:
        if coalition.ground_size != ground_size:
            raise PartitionError("Direct-sum parts are over different ground sets", error_code="INVALID_DIRECT_SUM")
        if len(vector) != len(coalition):
            raise PartitionError(
                f"Part over {coalition} carries {len(vector)} rates",
                error_code="INVALID_DIRECT_SUM",
                context={"coalition": str(coalition), "rates": len(vector)},
            )
        if covered & coalition.mask:
            raise PartitionError(
                f"Direct-sum parts overlap at {Coalition(covered & coalition.mask, ground_size)}",
                error_code="INVALID_DIRECT_SUM",
            )
        covered |= coalition.mask
        for player, rate in zip(coalition.members, vector.rates):
            placed[player] = rate
    if require_cover and covered != (1 << ground_size) - 1:
        missing = Coalition(((1 << ground_size) - 1) & ~covered, ground_size)
        raise PartitionError(
            f"Direct-sum parts leave {missing} uncovered",
            error_code="INVALID_DIRECT_SUM",
            context={"missing": missing.labels()},
        )
    return RateVector(tuple(placed[player] for player in sorted(placed)))


def shapley_decomposed(
    oracle: EntropyOracle,
    *,
    permutation: Optional[Sequence[int]] = None,
    method: str = "direct",
    parallel: bool = False,
    n_jobs: Optional[int] = None,
    samples_factor: int = DEFAULT_SAMPLES_FACTOR,
    seed: int = 0,
    max_players: Optional[int] = None,
    force: bool = False,
) -> ShapleyResult:
    """
    Shapley value assembled from the subgames of the finest decomposer.

    Decomposer-search calls and subgame calls share one phase, so ``oracle_calls``
    counts a coalition evaluated by both once; ``raw_oracle_calls`` counts both.

    Args:
        oracle: Entropy oracle of the game
        permutation: Player order for the decomposer search
        method: ``"direct"`` for exact subgame values, ``"sampled"`` for
            ``samples_factor * |C|^2`` random permutations per block
        parallel: Evaluate the subgame formulas on a joblib worker pool
        n_jobs: Pool size; hardware threads when omitted
        samples_factor: Multiplier of the per-block sample count
        seed: Master seed; blocks get independent spawned seeds
        max_players: Cap on the largest block (2^|C| evaluations)
        force: Run above the cap

    Raises:
        EnumerationLimitError: If the largest block exceeds the cap
        ValueError: If ``method`` is unknown
    """
    if method not in ("direct", "sampled"):
        raise ValueError(f"Unknown subgame method: {method!r}")
    before = oracle.ledger.snapshot()
    with oracle.ensure_phase("shapley_decomposed"):
        decomposer = finest_decomposer(oracle, permutation)
        blocks = decomposer.finest.blocks

        sample_count = None
        if method == "direct":
            check_enumeration_limit(
                decomposer.finest.largest_block_size,
                max_players,
                operation="shapley_decomposed",
                force=force,
            )
            tables = [oracle.restrict(block).table(force=True) for block in blocks]
            if parallel and len(blocks) > 1:
                with Parallel(n_jobs=n_jobs or default_n_jobs(), prefer="threads") as pool:
                    values = pool(
                        delayed(shapley_from_table)(len(block), table)
                        for block, table in zip(blocks, tables)
                    )
            else:
                values = [shapley_from_table(len(block), table) for block, table in zip(blocks, tables)]
        else:
            children = np.random.SeedSequence(seed).spawn(len(blocks))
            values = []
            sample_count = 0
            for block, child in zip(blocks, children):
                count = max(1, samples_factor * len(block) ** 2)
                sample_count += count
                block_seed = int(child.generate_state(1)[0])
                values.append(shapley_sampled(oracle.restrict(block), count, block_seed).value)
    cost = oracle.ledger.since(before)

    value = direct_sum(list(zip(blocks, values)))
    logger.info(
        "Decomposed Shapley over %s blocks (largest %s) used %s distinct / %s raw oracle calls",
        len(blocks),
        decomposer.finest.largest_block_size,
        cost.distinct,
        cost.raw,
        extra={
            "players": oracle.ground_size,
            "blocks": len(blocks),
            "oracle_calls": cost.distinct,
            "raw_oracle_calls": cost.raw,
        },
    )
    return ShapleyResult(
        value=value,
        method=ShapleyMethod.DECOMPOSED,
        oracle_calls=cost.distinct,
        raw_oracle_calls=cost.raw,
        sample_count=sample_count,
        seed=seed if method == "sampled" else None,
        rng_algorithm=RNG_ALGORITHM if method == "sampled" else None,
        decomposer=decomposer,
    )


def core_dimension(oracle: EntropyOracle, permutation: Optional[Sequence[int]] = None) -> int:
    """Dimension of the core, |V| minus the number of blocks of the finest decomposer."""
    return oracle.ground_size - len(finest_decomposer(oracle, permutation).finest)
