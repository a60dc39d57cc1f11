"""
Oracle-call accounting for fairrate.

Every evaluation of the entropy function is recorded against the computation
phase that asked for it. Two counters are kept per phase: ``distinct`` counts a
coalition once per phase run (or every call when memoization is off) and
``raw`` counts every request.
"""

import threading
from dataclasses import dataclass
from typing import Dict, List, Union


@dataclass(frozen=True)
class LedgerSnapshot:
    """Totals at one point in time; subtract two snapshots to cost a computation."""

    distinct: int = 0
    raw: int = 0

    def __sub__(self, other: "LedgerSnapshot") -> "LedgerSnapshot":
        return LedgerSnapshot(self.distinct - other.distinct, self.raw - other.raw)


class OracleLedger:
    """Collects oracle-call counts per named phase. Safe to share between threads."""

    def __init__(self):
        """Initialize an empty ledger."""
        self._distinct: Dict[str, int] = {}
        self._raw: Dict[str, int] = {}
        self._lock = threading.Lock()

    def record(self, phase: str, *, distinct: bool = True, calls: int = 1) -> None:
        """
        Record oracle calls made on behalf of ``phase``.

        Args:
            phase: Label of the computation phase
            distinct: Whether the calls evaluate coalitions not yet seen in this phase run
            calls: Number of calls to record
        """
        if calls < 0:
            raise ValueError("calls must be nonnegative")
        with self._lock:
            self._raw[phase] = self._raw.get(phase, 0) + calls
            if distinct:
                self._distinct[phase] = self._distinct.get(phase, 0) + calls
            else:
                self._distinct.setdefault(phase, 0)

    def count(self, phase: str) -> int:
        """Distinct calls recorded for ``phase`` (0 if never seen)."""
        with self._lock:
            return self._distinct.get(phase, 0)

    def raw(self, phase: str) -> int:
        with self._lock:
            return self._raw.get(phase, 0)

    @property
    def phases(self) -> List[str]:
        with self._lock:
            return sorted(self._raw)

    def total(self, *, raw: bool = False) -> int:
        with self._lock:
            return sum((self._raw if raw else self._distinct).values())

    def snapshot(self) -> LedgerSnapshot:
        with self._lock:
            return LedgerSnapshot(sum(self._distinct.values()), sum(self._raw.values()))

    def since(self, before: LedgerSnapshot) -> LedgerSnapshot:
        """Calls recorded after ``before`` was taken."""
        return self.snapshot() - before

    def summary(self) -> Dict[str, Union[int, Dict[str, Dict[str, int]]]]:
        """
        Get summary of recorded calls.

        Returns:
            Dictionary with totals and a per-phase breakdown
        """
        with self._lock:
            phases = {
                phase: {"distinct": self._distinct.get(phase, 0), "raw": self._raw[phase]}
                for phase in sorted(self._raw)
            }
        return {
            "total_distinct": sum(entry["distinct"] for entry in phases.values()),
            "total_raw": sum(entry["raw"] for entry in phases.values()),
            "phases": phases,
        }

    def __repr__(self) -> str:
        summary = self.summary()
        return f"OracleLedger(distinct={summary['total_distinct']}, raw={summary['total_raw']})"

