"""
Bit-coverage source models and the instance file format.

A source model is a set of independent weighted bits and, for each player, the
bits that player observes. The entropy of a coalition is the total weight of
the bits observed by at least one member.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from typing_extensions import Protocol, TypedDict, runtime_checkable

from .coalition import Coalition, Partition, mask_members
from .errors import InstanceFormatError, ModelError, PartitionError

logger = logging.getLogger(__name__)

RationalLike = Union[Fraction, int, str]


class BitPayload(TypedDict):
    id: str
    weight: List[int]


@runtime_checkable
class EntropyModel(Protocol):
    """Anything an :class:`~fairrate.oracle.EntropyOracle` can evaluate."""

    @property
    def ground_size(self) -> int: ...

    @property
    def global_index(self) -> Tuple[int, ...]: ...

    def entropy_mask(self, mask: int) -> Fraction: ...

    def restrict(self, coalition: Coalition) -> "EntropyModel": ...


def to_fraction(value: RationalLike) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("Booleans are not rationals")
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"Cannot interpret {value!r} as an exact rational")


@dataclass(frozen=True)
class Bit:
    """An independent uniformly distributed source component and its entropy."""

    id: str
    weight: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "weight", to_fraction(self.weight))


@dataclass(frozen=True)
class BitSourceModel:
    """
    Coverage model of a multiterminal source.

    ``observes[i]`` holds the bit ids seen by player ``i`` (0-based). Weights must be
    nonnegative unless ``allow_negative`` is set, which only exists to exercise
    :func:`~fairrate.oracle.verify_polymatroid` on broken inputs.

    Restricted models keep ``global_index``: position ``k`` is the player of the
    original model that local player ``k`` stands for.
    """

    ground_size: int
    bits: Tuple[Bit, ...]
    observes: Tuple[frozenset, ...]
    global_index: Tuple[int, ...] = ()
    allow_negative: bool = False
    _player_bits: Tuple[int, ...] = field(init=False, repr=False, compare=False)
    _scaled: Tuple[int, ...] = field(init=False, repr=False, compare=False)
    _denominator: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.ground_size < 1:
            raise ModelError("A source model needs at least one player", error_code="GROUND_SIZE")
        bits = tuple(self.bits)
        observes = tuple(frozenset(seen) for seen in self.observes)
        if len(observes) != self.ground_size:
            raise ModelError(
                "Observation map must list every player",
                error_code="INVALID_MODEL",
                context={"ground_size": self.ground_size, "listed": len(observes)},
            )

        position: Dict[str, int] = {}
        for index, bit in enumerate(bits):
            if bit.id in position:
                raise ModelError(f"Duplicate bit id {bit.id!r}", error_code="INVALID_MODEL")
            if bit.weight < 0 and not self.allow_negative:
                raise ModelError(
                    f"Bit {bit.id!r} has negative weight {bit.weight}",
                    error_code="NEGATIVE_WEIGHT",
                    context={"bit": bit.id},
                )
            position[bit.id] = index

        player_bits = []
        for player, seen in enumerate(observes):
            mask = 0
            for bit_id in seen:
                if bit_id not in position:
                    raise ModelError(
                        f"Player {player + 1} observes unknown bit {bit_id!r}",
                        error_code="UNKNOWN_BIT",
                        context={"player": player + 1, "bit": bit_id},
                    )
                mask |= 1 << position[bit_id]
            player_bits.append(mask)

        global_index = tuple(self.global_index) or tuple(range(self.ground_size))
        if len(global_index) != self.ground_size or len(set(global_index)) != self.ground_size:
            raise ModelError("global_index must name one distinct player per position", error_code="INVALID_MODEL")

        denominator = lcm(*(bit.weight.denominator for bit in bits)) if bits else 1
        scaled = tuple(bit.weight.numerator * (denominator // bit.weight.denominator) for bit in bits)

        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "observes", observes)
        object.__setattr__(self, "global_index", global_index)
        object.__setattr__(self, "_player_bits", tuple(player_bits))
        object.__setattr__(self, "_scaled", scaled)
        object.__setattr__(self, "_denominator", denominator)

    @classmethod
    def build(
        cls,
        weights: Mapping[str, RationalLike],
        observes: Mapping[int, Iterable[str]],
        *,
        players: Optional[int] = None,
        allow_negative: bool = False,
    ) -> "BitSourceModel":
        """
        Build a model from bit weights and a 1-based observation map.

        Example:
            >>> BitSourceModel.build({"s": 3, "a": 1, "b": 3}, {1: ["s", "a"], 2: ["s", "b"]})
        """
        ground_size = players if players is not None else max(observes, default=0)
        for label in observes:
            if not 1 <= label <= ground_size:
                raise ModelError(
                    f"Player label {label} is outside 1..{ground_size}",
                    error_code="PLAYER_OUT_OF_RANGE",
                )
        return cls(
            ground_size=ground_size,
            bits=tuple(Bit(bit_id, to_fraction(weight)) for bit_id, weight in weights.items()),
            observes=tuple(frozenset(observes.get(label, ())) for label in range(1, ground_size + 1)),
            allow_negative=allow_negative,
        )

    @property
    def total_weight(self) -> Fraction:
        return Fraction(sum(self._scaled), self._denominator)

    def player_bit_ids(self, player: int) -> Tuple[str, ...]:
        return tuple(sorted(self.observes[player]))

    def _check_mask(self, mask: int) -> None:
        if mask < 0 or mask >> self.ground_size:
            raise ModelError(
                "Coalition has members outside the ground set",
                error_code="PLAYER_OUT_OF_RANGE",
                context={"mask": mask, "ground_size": self.ground_size},
            )

    def covered_bits(self, mask: int) -> int:
        """Bitmask over ``bits`` of the components observed by ``mask``."""
        self._check_mask(mask)
        covered = 0
        for player in mask_members(mask):
            covered |= self._player_bits[player]
        return covered

    def entropy_mask(self, mask: int) -> Fraction:
        covered = self.covered_bits(mask)
        total = 0
        for position in mask_members(covered):
            total += self._scaled[position]
        return Fraction(total, self._denominator)

    def entropy(self, coalition: Coalition) -> Fraction:
        if coalition.ground_size != self.ground_size:
            raise ModelError(
                "Coalition and model have different ground sets",
                error_code="GROUND_MISMATCH",
                context={"coalition": coalition.ground_size, "model": self.ground_size},
            )
        return self.entropy_mask(coalition.mask)

    def restrict(self, coalition: Coalition) -> "BitSourceModel":
        """
        Subgame model over the members of ``coalition``, reindexed from 0.

        Bits nobody in the coalition observes are dropped; they never contribute.

        Raises:
            ModelError: If ``coalition`` is empty or from another ground set
        """
        if coalition.ground_size != self.ground_size:
            raise ModelError("Coalition and model have different ground sets", error_code="GROUND_MISMATCH")
        if coalition.is_empty():
            raise ModelError("Cannot restrict a model to the empty coalition", error_code="EMPTY_COALITION")
        members = coalition.members
        kept_ids = set().union(*(self.observes[p] for p in members))
        return BitSourceModel(
            ground_size=len(members),
            bits=tuple(bit for bit in self.bits if bit.id in kept_ids),
            observes=tuple(self.observes[p] for p in members),
            global_index=tuple(self.global_index[p] for p in members),
            allow_negative=self.allow_negative,
        )

    def scaled(self, factor: RationalLike) -> "BitSourceModel":
        """Same observation structure with every weight multiplied by ``factor``."""
        factor = to_fraction(factor)
        return BitSourceModel(
            ground_size=self.ground_size,
            bits=tuple(Bit(bit.id, bit.weight * factor) for bit in self.bits),
            observes=self.observes,
            global_index=self.global_index,
            allow_negative=self.allow_negative,
        )

    def to_dict(self) -> Dict[str, Any]:
        bits: List[BitPayload] = [
            {"id": bit.id, "weight": [bit.weight.numerator, bit.weight.denominator]}
            for bit in self.bits
        ]
        return {
            "players": self.ground_size,
            "bits": bits,
            "observes": {str(p + 1): self.player_bit_ids(p) for p in range(self.ground_size)},
        }

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any], *, path: Optional[str] = None) -> "BitSourceModel":
        """
        Decode the instance payload ``{"players", "bits", "observes"}``.

        Raises:
            InstanceFormatError: If any field is missing, mistyped or inconsistent
        """
        try:
            players = payload["players"]
            raw_bits = payload["bits"]
            raw_observes = payload.get("observes", {})
        except (KeyError, TypeError, AttributeError) as exc:
            raise InstanceFormatError(f"Instance is missing a required field: {exc}", path=path, cause=exc) from exc

        if not isinstance(players, int) or isinstance(players, bool) or players < 1:
            raise InstanceFormatError("'players' must be a positive integer", path=path)
        if not isinstance(raw_bits, list) or not isinstance(raw_observes, dict):
            raise InstanceFormatError("'bits' must be a list and 'observes' an object", path=path)

        bits = [_decode_bit(entry, path) for entry in raw_bits]
        observes: Dict[int, Sequence[str]] = {}
        for key, seen in raw_observes.items():
            try:
                label = int(key)
            except (TypeError, ValueError) as exc:
                raise InstanceFormatError(f"Observer key {key!r} is not a player label", path=path, cause=exc) from exc
            if not 1 <= label <= players:
                raise InstanceFormatError(
                    f"Observer {label} is outside 1..{players}",
                    path=path,
                    context={"player": label},
                )
            if not isinstance(seen, list) or not all(isinstance(bit_id, str) for bit_id in seen):
                raise InstanceFormatError(f"Observer {label} must list bit ids", path=path)
            observes[label] = seen

        try:
            return cls(
                ground_size=players,
                bits=tuple(bits),
                observes=tuple(frozenset(observes.get(label, ())) for label in range(1, players + 1)),
            )
        except ModelError as exc:
            raise InstanceFormatError(str(exc.args[0]), path=path, context=exc.context, cause=exc) from exc


def _decode_bit(entry: Any, path: Optional[str]) -> Bit:
    if not isinstance(entry, dict) or "id" not in entry or "weight" not in entry:
        raise InstanceFormatError("Each bit needs an 'id' and a 'weight'", path=path)
    weight = entry["weight"]
    if (
        not isinstance(weight, list)
        or len(weight) != 2
        or not all(isinstance(part, int) and not isinstance(part, bool) for part in weight)
    ):
        raise InstanceFormatError(
            f"Weight of bit {entry['id']!r} must be a [numerator, denominator] pair",
            path=path,
        )
    numerator, denominator = weight
    if denominator <= 0:
        raise InstanceFormatError(f"Bit {entry['id']!r} has a non-positive denominator", path=path)
    if numerator < 0:
        raise InstanceFormatError(f"Bit {entry['id']!r} has a negative weight", path=path)
    return Bit(str(entry["id"]), Fraction(numerator, denominator))


@dataclass(frozen=True)
class Instance:
    """A model loaded from disk plus the partition it was generated with, if recorded."""

    model: BitSourceModel
    planted: Optional[Partition] = None


def instance_to_json(model: BitSourceModel, planted: Optional[Partition] = None) -> str:
    payload = model.to_dict()
    if planted is not None:
        payload["planted"] = planted.labels()
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def load_instance(path: Union[str, Path]) -> Instance:
    """
    Read an instance file.

    Raises:
        InstanceFormatError: If the file is unreadable, not JSON, or malformed
    """
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise InstanceFormatError(f"Cannot read instance file: {exc}", path=str(path), cause=exc) from exc
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"Instance file is not valid JSON: {exc.msg}", path=str(path), cause=exc) from exc
    if not isinstance(payload, dict):
        raise InstanceFormatError("Instance file must hold a JSON object", path=str(path))

    model = BitSourceModel.from_dict(payload, path=str(path))
    planted = None
    if "planted" in payload:
        try:
            planted = Partition.from_labels(payload["planted"], model.ground_size)
        except (TypeError, ModelError, PartitionError) as exc:
            raise InstanceFormatError("'planted' is not a partition of the players", path=str(path), cause=exc) from exc
    logger.debug("Loaded %s players and %s bits from %s", model.ground_size, len(model.bits), path)
    return Instance(model=model, planted=planted)


def save_instance(path: Union[str, Path], model: BitSourceModel, planted: Optional[Partition] = None) -> Path:
    path = Path(path)
    path.write_text(instance_to_json(model, planted), encoding="utf-8")
    logger.debug("Wrote instance with %s players to %s", model.ground_size, path)
    return path
