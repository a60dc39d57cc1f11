"""
Ground-set arithmetic: coalitions, partitions and permutations of players.

Players are indexed ``0..|V|-1`` internally. Text and file boundaries use the
1-based labels and translate with :meth:`Coalition.from_labels`
and :meth:`Coalition.labels`.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, List, Sequence, Tuple

from .config import MAX_GROUND_SIZE
from .errors import ModelError, PartitionError, PermutationError

Permutation = Tuple[int, ...]


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def mask_members(mask: int) -> Tuple[int, ...]:
    """Indices of the set bits of ``mask`` in increasing order."""
    members = []
    index = 0
    while mask:
        if mask & 1:
            members.append(index)
        mask >>= 1
        index += 1
    return tuple(members)


def _check_ground_size(ground_size: int) -> None:
    if not 1 <= ground_size <= MAX_GROUND_SIZE:
        raise ModelError(
            f"Ground set must hold between 1 and {MAX_GROUND_SIZE} players",
            error_code="GROUND_SIZE",
            context={"ground_size": ground_size},
        )


@dataclass(frozen=True)
class Coalition:
    """A subset of the players ``{0, ..., ground_size-1}`` stored as a bitmask."""

    mask: int
    ground_size: int

    def __post_init__(self) -> None:
        _check_ground_size(self.ground_size)
        if self.mask < 0 or self.mask >> self.ground_size:
            raise ModelError(
                "Coalition has members outside the ground set",
                error_code="PLAYER_OUT_OF_RANGE",
                context={"mask": self.mask, "ground_size": self.ground_size},
            )

    @classmethod
    def from_members(cls, members: Iterable[int], ground_size: int) -> "Coalition":
        _check_ground_size(ground_size)
        mask = 0
        for player in members:
            if not 0 <= player < ground_size:
                raise ModelError(
                    f"Player index {player} is outside 0..{ground_size - 1}",
                    error_code="PLAYER_OUT_OF_RANGE",
                    context={"player": player, "ground_size": ground_size},
                )
            mask |= 1 << player
        return cls(mask, ground_size)

    @classmethod
    def from_labels(cls, labels: Iterable[int], ground_size: int) -> "Coalition":
        """Build a coalition from 1-based player labels."""
        return cls.from_members((label - 1 for label in labels), ground_size)

    @classmethod
    def empty(cls, ground_size: int) -> "Coalition":
        return cls(0, ground_size)

    @classmethod
    def full(cls, ground_size: int) -> "Coalition":
        _check_ground_size(ground_size)
        return cls((1 << ground_size) - 1, ground_size)

    @property
    def members(self) -> Tuple[int, ...]:
        return mask_members(self.mask)

    def labels(self) -> Tuple[int, ...]:
        """1-based labels of the members."""
        return tuple(player + 1 for player in self.members)

    def is_empty(self) -> bool:
        return self.mask == 0

    def is_full(self) -> bool:
        return self.mask == (1 << self.ground_size) - 1

    def _same_ground(self, other: "Coalition") -> None:
        if self.ground_size != other.ground_size:
            raise ModelError(
                "Coalitions belong to different ground sets",
                error_code="GROUND_MISMATCH",
                context={"left": self.ground_size, "right": other.ground_size},
            )

    def union(self, other: "Coalition") -> "Coalition":
        self._same_ground(other)
        return Coalition(self.mask | other.mask, self.ground_size)

    def intersection(self, other: "Coalition") -> "Coalition":
        self._same_ground(other)
        return Coalition(self.mask & other.mask, self.ground_size)

    def difference(self, other: "Coalition") -> "Coalition":
        self._same_ground(other)
        return Coalition(self.mask & ~other.mask, self.ground_size)

    def complement(self) -> "Coalition":
        return Coalition(((1 << self.ground_size) - 1) & ~self.mask, self.ground_size)

    def issubset(self, other: "Coalition") -> bool:
        self._same_ground(other)
        return self.mask & ~other.mask == 0

    def isdisjoint(self, other: "Coalition") -> bool:
        self._same_ground(other)
        return self.mask & other.mask == 0

    def with_player(self, player: int) -> "Coalition":
        return Coalition.from_members(self.members + (player,), self.ground_size)

    def without_player(self, player: int) -> "Coalition":
        return Coalition(self.mask & ~(1 << player), self.ground_size)

    __or__ = union
    __and__ = intersection
    __sub__ = difference
    __le__ = issubset

    def __len__(self) -> int:
        return popcount(self.mask)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __contains__(self, player: object) -> bool:
        return isinstance(player, int) and 0 <= player < self.ground_size and bool(
            self.mask >> player & 1
        )

    def __str__(self) -> str:
        return "{" + ",".join(str(label) for label in self.labels()) + "}"


def iter_coalitions(ground_size: int, *, include_empty: bool = False) -> Iterator[Coalition]:
    """
    Yield every coalition by increasing cardinality, then lexicographically.

    This is the order in which membership checks report violations.
    """
    _check_ground_size(ground_size)
    start = 0 if include_empty else 1
    for size in range(start, ground_size + 1):
        for members in combinations(range(ground_size), size):
            yield Coalition.from_members(members, ground_size)


def validate_permutation(permutation: Sequence[int], ground_size: int) -> Permutation:
    """Return ``permutation`` as a tuple after checking it is a bijection on the players."""
    perm = tuple(int(p) for p in permutation)
    if sorted(perm) != list(range(ground_size)):
        raise PermutationError(
            f"Expected a permutation of {ground_size} players",
            error_code="MALFORMED_PERMUTATION",
            context={"permutation": perm, "ground_size": ground_size},
        )
    return perm


def permutation_from_labels(labels: Sequence[int], ground_size: int) -> Permutation:
    return validate_permutation([label - 1 for label in labels], ground_size)


def identity_permutation(ground_size: int) -> Permutation:
    return tuple(range(ground_size))


@dataclass(frozen=True)
class Partition:
    """Disjoint nonempty coalitions covering the ground set, sorted by minimum member."""

    blocks: Tuple[Coalition, ...]

    def __post_init__(self) -> None:
        if not self.blocks:
            raise PartitionError("A partition needs at least one block", error_code="INVALID_PARTITION")
        ground_size = self.blocks[0].ground_size
        covered = 0
        for block in self.blocks:
            if block.ground_size != ground_size:
                raise PartitionError(
                    "Partition blocks belong to different ground sets",
                    error_code="INVALID_PARTITION",
                )
            if block.is_empty():
                raise PartitionError("Partition blocks must be nonempty", error_code="INVALID_PARTITION")
            if covered & block.mask:
                raise PartitionError(
                    f"Partition blocks overlap at {block}",
                    error_code="INVALID_PARTITION",
                    context={"block": str(block)},
                )
            covered |= block.mask
        if covered != (1 << ground_size) - 1:
            raise PartitionError(
                "Partition blocks do not cover the ground set",
                error_code="INVALID_PARTITION",
                context={"missing": Coalition(((1 << ground_size) - 1) & ~covered, ground_size).labels()},
            )
        ordered = tuple(sorted(self.blocks, key=lambda block: block.members[0]))
        object.__setattr__(self, "blocks", ordered)

    @classmethod
    def from_masks(cls, masks: Iterable[int], ground_size: int) -> "Partition":
        return cls(tuple(Coalition(mask, ground_size) for mask in masks))

    @classmethod
    def from_labels(cls, groups: Iterable[Iterable[int]], ground_size: int) -> "Partition":
        return cls(tuple(Coalition.from_labels(group, ground_size) for group in groups))

    @classmethod
    def trivial(cls, ground_size: int) -> "Partition":
        return cls((Coalition.full(ground_size),))

    @classmethod
    def singletons(cls, ground_size: int) -> "Partition":
        return cls(tuple(Coalition.from_members([p], ground_size) for p in range(ground_size)))

    @property
    def ground_size(self) -> int:
        return self.blocks[0].ground_size

    @property
    def largest_block_size(self) -> int:
        return max(len(block) for block in self.blocks)

    def block_of(self, player: int) -> Coalition:
        for block in self.blocks:
            if player in block:
                return block
        raise ModelError(f"Player {player} is not in the ground set", error_code="PLAYER_OUT_OF_RANGE")

    def refines(self, other: "Partition") -> bool:
        """True when every block lies inside a block of ``other``."""
        return all(any(block.issubset(big) for big in other.blocks) for block in self.blocks)

    def merge(self, groups: Iterable[Iterable[int]]) -> "Partition":
        """Coarsen by merging the blocks whose positions appear together in each group."""
        used = set()
        merged: List[int] = []
        for group in groups:
            mask = 0
            for position in group:
                if position in used:
                    raise PartitionError(
                        f"Block {position} appears in more than one merge group",
                        error_code="INVALID_PARTITION",
                    )
                used.add(position)
                mask |= self.blocks[position].mask
            if mask:
                merged.append(mask)
        merged.extend(block.mask for i, block in enumerate(self.blocks) if i not in used)
        return Partition.from_masks(merged, self.ground_size)

    def labels(self) -> List[List[int]]:
        return [list(block.labels()) for block in self.blocks]

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self) -> Iterator[Coalition]:
        return iter(self.blocks)

    def __str__(self) -> str:
        return "{" + ", ".join(str(block) for block in self.blocks) + "}"
