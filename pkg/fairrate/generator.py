"""
Random game instances for experiments and property tests.

Decomposable instances plant a partition of the players: every block gets its
own bits, linked by a chain of shared bits, and no bit crosses blocks. All
weights are then rescaled by one rational factor so H(V) hits the target.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from .coalition import Partition
from .config import DEFAULT_SEED, MAX_GROUND_SIZE
from .decomposition import finest_decomposer
from .errors import GenerationError
from .model import BitSourceModel, RationalLike, to_fraction
from .oracle import EntropyOracle

logger = logging.getLogger(__name__)

DEFAULT_TARGET_ENTROPY = Fraction(50)
DEFAULT_MAX_DENOMINATOR = 10


@dataclass(frozen=True)
class GenSpec:
    """
    Knobs of the generator.

    ``block_count`` may be ``"random"``: between 2 and ceil(players / 2) blocks.
    ``bits_per_block_range`` bounds the extra bits each block gets on top of its
    linking chain. Weights are drawn from the fractions p/q in ``weight_range``
    with q up to ``max_denominator``.
    """

    players: int
    target_total_entropy: Fraction = DEFAULT_TARGET_ENTROPY
    block_count: Union[int, str] = "random"
    bits_per_block_range: Tuple[int, int] = (1, 4)
    weight_range: Tuple[RationalLike, RationalLike] = (Fraction(1, 10), Fraction(1))
    max_denominator: int = DEFAULT_MAX_DENOMINATOR
    seed: int = DEFAULT_SEED

    def __post_init__(self) -> None:
        def fail(message: str) -> GenerationError:
            return GenerationError(message, error_code="INFEASIBLE_SPEC", context={"players": self.players})

        object.__setattr__(self, "target_total_entropy", to_fraction(self.target_total_entropy))
        low, high = (to_fraction(bound) for bound in self.weight_range)
        object.__setattr__(self, "weight_range", (low, high))

        if not 1 <= self.players <= MAX_GROUND_SIZE:
            raise fail(f"players must be between 1 and {MAX_GROUND_SIZE}")
        if self.target_total_entropy <= 0:
            raise fail("target_total_entropy must be positive")
        if isinstance(self.block_count, str):
            if self.block_count != "random":
                raise fail(f"block_count must be an integer or 'random', got {self.block_count!r}")
        elif not 1 <= self.block_count <= self.players:
            raise fail(f"block_count {self.block_count} must be between 1 and players={self.players}")
        lo_bits, hi_bits = self.bits_per_block_range
        if not 0 <= lo_bits <= hi_bits:
            raise fail(f"Empty bits-per-block range {self.bits_per_block_range}")
        if not 0 <= low <= high or high <= 0:
            raise fail(f"Empty weight range ({low}, {high})")
        if self.max_denominator < 1:
            raise fail("max_denominator must be at least 1")
        if not weight_grid(low, high, self.max_denominator):
            raise fail(f"No fraction with denominator <= {self.max_denominator} in ({low}, {high})")


@dataclass(frozen=True)
class GeneratedInstance:
    model: BitSourceModel
    planted: Partition
    spec: GenSpec


def weight_grid(low: Fraction, high: Fraction, max_denominator: int) -> List[Fraction]:
    """Sorted distinct fractions p/q in [low, high] with 1 <= q <= max_denominator."""
    grid = set()
    for q in range(1, max_denominator + 1):
        for p in range(int(low * q), int(high * q) + 1):
            value = Fraction(p, q)
            if low <= value <= high:
                grid.add(value)
    return sorted(grid)


def _draw_blocks(rng: np.random.Generator, players: int, block_count: int) -> List[List[int]]:
    order = [int(p) for p in rng.permutation(players)]
    if block_count == 1:
        return [sorted(order)]
    cuts = sorted(int(c) for c in rng.choice(np.arange(1, players), size=block_count - 1, replace=False))
    bounds = [0] + cuts + [players]
    return [sorted(order[bounds[k] : bounds[k + 1]]) for k in range(block_count)]


def _resolve_block_count(rng: np.random.Generator, spec: GenSpec) -> int:
    if spec.block_count != "random":
        return int(spec.block_count)
    if spec.players == 1:
        return 1
    upper = max(2, (spec.players + 1) // 2)
    return int(rng.integers(2, upper + 1))


def _populate(rng: np.random.Generator, spec: GenSpec, blocks: List[List[int]]) -> BitSourceModel:
    grid = weight_grid(spec.weight_range[0], spec.weight_range[1], spec.max_denominator)
    weights: Dict[str, Fraction] = {}
    observes: Dict[int, List[str]] = {player + 1: [] for player in range(spec.players)}

    def add_bit(bit_id: str, observers: List[int]) -> None:
        weights[bit_id] = grid[int(rng.integers(len(grid)))]
        for player in observers:
            observes[player + 1].append(bit_id)

    lo_bits, hi_bits = spec.bits_per_block_range
    for index, block in enumerate(blocks):
        if len(block) == 1:
            add_bit(f"b{index}_link0", block)
        else:
            chain = [block[int(k)] for k in rng.permutation(len(block))]
            for k in range(len(chain) - 1):
                add_bit(f"b{index}_link{k}", [chain[k], chain[k + 1]])
        for k in range(int(rng.integers(lo_bits, hi_bits + 1))):
            size = int(rng.integers(1, len(block) + 1))
            members = sorted(int(p) for p in rng.choice(block, size=size, replace=False))
            add_bit(f"b{index}_extra{k}", members)

    total = sum(weights.values(), Fraction(0))
    if total == 0:
        raise GenerationError("Every drawn weight is zero; cannot rescale", error_code="ZERO_ENTROPY")
    factor = spec.target_total_entropy / total
    scaled = {bit_id: weight * factor for bit_id, weight in weights.items()}
    return BitSourceModel.build(scaled, observes, players=spec.players)


def generate_decomposable(spec: GenSpec) -> GeneratedInstance:
    """
    Draw an instance whose players split into independent planted blocks.

    Raises:
        GenerationError: If the spec is infeasible
    """
    rng = np.random.default_rng(spec.seed)
    block_count = _resolve_block_count(rng, spec)
    blocks = _draw_blocks(rng, spec.players, block_count)
    model = _populate(rng, spec, blocks)
    planted = Partition.from_labels([[p + 1 for p in block] for block in blocks], spec.players)
    logger.debug("Generated %s players in %s planted blocks (seed %s)", spec.players, block_count, spec.seed)
    return GeneratedInstance(model=model, planted=planted, spec=spec)


def generate_indecomposable(spec: GenSpec, *, max_attempts: int = 10) -> GeneratedInstance:
    """
    Draw an instance whose only decomposer is the grand coalition.

    All players are linked by one chain of shared bits. The result is confirmed
    with the decomposer search and redrawn from a fresh seed if it splits.

    Raises:
        GenerationError: If ``players < 2`` or no attempt is indecomposable
    """
    if spec.players < 2:
        raise GenerationError("An indecomposable instance needs at least two players", error_code="INFEASIBLE_SPEC")

    seeds = np.random.SeedSequence(spec.seed).spawn(max_attempts)
    planted = Partition.trivial(spec.players)
    last_blocks: Optional[int] = None
    for attempt, child in enumerate(seeds):
        rng = np.random.default_rng(child)
        model = _populate(rng, spec, [list(range(spec.players))])
        finest = finest_decomposer(EntropyOracle(model)).finest
        if len(finest) == 1:
            return GeneratedInstance(model=model, planted=planted, spec=spec)
        last_blocks = len(finest)
        logger.debug("Attempt %s split into %s blocks; redrawing", attempt + 1, last_blocks)
    raise GenerationError(
        f"No indecomposable instance after {max_attempts} attempts",
        error_code="RETRY_BUDGET_EXHAUSTED",
        context={"attempts": max_attempts, "last_block_count": last_blocks},
    )
