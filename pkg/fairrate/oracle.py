"""
Entropy oracle: the counted characteristic function of the game.

All other modules reach the entropy function only through
:class:`EntropyOracle`, so every evaluation lands in an :class:`OracleLedger`.
"""

from __future__ import annotations

import logging
import threading
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Set, Tuple

from .coalition import Coalition, mask_members
from .config import check_enumeration_limit
from .errors import ModelError
from .metrics import OracleLedger
from .model import EntropyModel

logger = logging.getLogger(__name__)

DEFAULT_PHASE = "default"


class _SharedState:
    """Ledger, phase and memo shared by an oracle and every subgame oracle cut from it."""

    def __init__(self, ledger: OracleLedger, memoize: bool):
        self.ledger = ledger
        self.memoize = memoize
        self.phase: Optional[str] = None
        self.seen: Set[int] = set()
        self.values: Dict[int, Fraction] = {}
        self.lock = threading.RLock()


class EntropyOracle:
    """
    Counted access to the entropy function of a model.

    Memo keys are coalitions of the original model, so a subgame oracle from
    :meth:`restrict` and its parent deduplicate against each other.

    Args:
        model: The source model to evaluate
        ledger: Ledger receiving the call counts; a fresh one when omitted
        memoize: When True a coalition counts once per phase run; when False every call counts
    """

    def __init__(
        self,
        model: EntropyModel,
        *,
        ledger: Optional[OracleLedger] = None,
        memoize: bool = True,
    ):
        self._bind(model, _SharedState(ledger if ledger is not None else OracleLedger(), memoize))

    def _bind(self, model: EntropyModel, state: _SharedState) -> None:
        self._model = model
        self._state = state
        self._global_index = tuple(model.global_index)
        self._identity = self._global_index == tuple(range(model.ground_size))

    @property
    def model(self) -> EntropyModel:
        return self._model

    @property
    def ground_size(self) -> int:
        return self._model.ground_size

    @property
    def global_index(self) -> Tuple[int, ...]:
        return self._global_index

    @property
    def ledger(self) -> OracleLedger:
        return self._state.ledger

    @property
    def memoize(self) -> bool:
        return self._state.memoize

    @property
    def current_phase(self) -> Optional[str]:
        return self._state.phase

    @contextmanager
    def phase(self, label: str) -> Iterator["EntropyOracle"]:
        """
        Attribute calls to ``label`` and start a fresh distinct-coalition scope.

        The previous phase, and its scope, are restored on exit.
        """
        state = self._state
        with state.lock:
            previous = (state.phase, state.seen)
            state.phase = label
            state.seen = set()
        logger.debug("Entering oracle phase %s", label, extra={"phase": label})
        try:
            yield self
        finally:
            with state.lock:
                state.phase, state.seen = previous
            logger.debug("Leaving oracle phase %s", label, extra={"phase": label})

    @contextmanager
    def ensure_phase(self, label: str) -> Iterator["EntropyOracle"]:
        """Open phase ``label`` unless the caller already opened one."""
        if self._state.phase is not None:
            yield self
            return
        with self.phase(label):
            yield self

    def _key(self, mask: int) -> int:
        if self._identity:
            return mask
        key = 0
        for player in mask_members(mask):
            key |= 1 << self._global_index[player]
        return key

    def evaluate_mask(self, mask: int) -> Fraction:
        """
        Entropy of the coalition encoded by ``mask``; one oracle call.

        Raises:
            ModelError: If the mask names players outside the ground set
        """
        if mask < 0 or mask >> self.ground_size:
            raise ModelError(
                "Coalition has members outside the ground set",
                error_code="PLAYER_OUT_OF_RANGE",
                context={"mask": mask, "ground_size": self.ground_size},
            )
        state = self._state
        key = self._key(mask)
        value: Optional[Fraction] = None
        with state.lock:
            phase = state.phase or DEFAULT_PHASE
            if state.memoize:
                distinct = key not in state.seen
                state.seen.add(key)
                value = state.values.get(key)
            else:
                distinct = True
        if value is None:
            value = self._model.entropy_mask(mask)
            if state.memoize:
                with state.lock:
                    state.values[key] = value
        state.ledger.record(phase, distinct=distinct)
        return value

    def evaluate(self, coalition: Coalition) -> Fraction:
        if coalition.ground_size != self.ground_size:
            raise ModelError(
                "Coalition does not belong to this oracle's ground set",
                error_code="GROUND_MISMATCH",
                context={"coalition": coalition.ground_size, "oracle": self.ground_size},
            )
        return self.evaluate_mask(coalition.mask)

    __call__ = evaluate

    def table(self, *, max_players: Optional[int] = None, force: bool = False) -> List[Fraction]:
        """
        Entropy of every coalition, indexed by mask; 2^|V| oracle calls.

        Raises:
            EnumerationLimitError: If |V| exceeds ``max_players`` and ``force`` is False
        """
        check_enumeration_limit(self.ground_size, max_players, operation="entropy table", force=force)
        return [self.evaluate_mask(mask) for mask in range(1 << self.ground_size)]

    def restrict(self, coalition: Coalition) -> "EntropyOracle":
        """Subgame oracle over ``coalition`` sharing this oracle's ledger, phase and memo."""
        if coalition.ground_size != self.ground_size:
            raise ModelError("Coalition does not belong to this oracle's ground set", error_code="GROUND_MISMATCH")
        child = EntropyOracle.__new__(EntropyOracle)
        child._bind(self._model.restrict(coalition), self._state)
        return child

    def __repr__(self) -> str:
        return (
            f"EntropyOracle(players={self.ground_size}, memoize={self.memoize}, "
            f"phase={self.current_phase!r})"
        )


def entropy(oracle: EntropyOracle, coalition: Coalition) -> Fraction:
    """
    Entropy H(X) of a coalition.

    Raises:
        ModelError: If the coalition is not over the oracle's players
    """
    return oracle.evaluate(coalition)


def conditional_entropy(oracle: EntropyOracle, x: Coalition, y: Coalition) -> Fraction:
    """H(X | Y) = H(X u Y) - H(Y)."""
    return oracle.evaluate(x | y) - oracle.evaluate(y)


def mutual_information(oracle: EntropyOracle, x: Coalition, y: Coalition) -> Fraction:
    """H(X) + H(Y) - H(X u Y): the rate saved when X and Y encode jointly."""
    return oracle.evaluate(x) + oracle.evaluate(y) - oracle.evaluate(x | y)


def dual_entropy(oracle: EntropyOracle, coalition: Coalition) -> Fraction:
    """H#(X) = H(V) - H(V \\ X), the least total rate X must send."""
    return oracle.evaluate(Coalition.full(oracle.ground_size)) - oracle.evaluate(coalition.complement())


@dataclass(frozen=True)
class PolymatroidReport:
    """
    Outcome of an exhaustive polymatroid check.

    ``witness`` is the first offending pair: ``(X, Y)`` with ``H(X) > H(Y)`` for a
    monotonicity failure, or ``H(X) + H(Y) < H(X n Y) + H(X u Y)`` for a
    submodularity failure.
    """

    normalized: bool
    monotone: bool
    submodular: bool
    witness: Optional[Tuple[Coalition, Coalition]] = None
    failure: Optional[str] = None
    oracle_calls: int = 0

    @property
    def is_polymatroid(self) -> bool:
        return self.normalized and self.monotone and self.submodular

    def __bool__(self) -> bool:
        return self.is_polymatroid


def _first_monotonicity_failure(table: List[Fraction], players: int) -> Optional[Tuple[int, int]]:
    for mask in range(1 << players):
        for player in range(players):
            bigger = mask | 1 << player
            if bigger != mask and table[mask] > table[bigger]:
                return mask, bigger
    return None


def _first_submodularity_failure(table: List[Fraction], players: int) -> Optional[Tuple[int, int]]:
    # The local condition H(X+i) + H(X+j) >= H(X) + H(X+i+j) over all X and i < j
    # outside X is equivalent to submodularity over all pairs.
    for mask in range(1 << players):
        outside = [p for p in range(players) if not mask >> p & 1]
        for a, i in enumerate(outside):
            with_i = mask | 1 << i
            for j in outside[a + 1 :]:
                with_j = mask | 1 << j
                if table[with_i] + table[with_j] < table[mask] + table[with_i | with_j]:
                    return with_i, with_j
    return None


def verify_polymatroid(
    model: EntropyModel,
    *,
    max_players: Optional[int] = None,
    force: bool = False,
) -> PolymatroidReport:
    """
    Check that a model's entropy function is normalized, monotone and submodular.

    Args:
        model: Model to check
        max_players: Cap on |V| (2^|V| evaluations)
        force: Run above the cap, logging a warning

    Returns:
        PolymatroidReport with a witnessing pair when a condition fails

    Raises:
        EnumerationLimitError: If |V| exceeds the cap and ``force`` is False
    """
    players = model.ground_size
    check_enumeration_limit(players, max_players, operation="verify_polymatroid", force=force)
    oracle = EntropyOracle(model)
    with oracle.phase("verify_polymatroid"):
        table = oracle.table(max_players=max_players, force=True)
    calls = oracle.ledger.count("verify_polymatroid")

    def coalition(mask: int) -> Coalition:
        return Coalition(mask, players)

    normalized = table[0] == 0
    monotone_failure = _first_monotonicity_failure(table, players)
    submodular_failure = _first_submodularity_failure(table, players)
    monotone = monotone_failure is None
    submodular = submodular_failure is None

    witness = None
    failure = None
    if not normalized:
        witness = (coalition(0), coalition(0))
        failure = "normalization"
    elif monotone_failure is not None:
        witness = (coalition(monotone_failure[0]), coalition(monotone_failure[1]))
        failure = "monotonicity"
    elif submodular_failure is not None:
        witness = (coalition(submodular_failure[0]), coalition(submodular_failure[1]))
        failure = "submodularity"

    report = PolymatroidReport(normalized, monotone, submodular, witness, failure, calls)
    if failure:
        logger.info("Polymatroid check failed on %s: %s vs %s", failure, witness[0], witness[1])
    return report
