"""
Complexity experiments: oracle-call counts and parallel completion time of the
direct and decomposed Shapley computations on generated decomposable games.
"""

from __future__ import annotations

import csv
import logging
import statistics
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from joblib import Parallel, delayed

from .coalition import Coalition
from .config import DEFAULT_MAX_EXHAUSTIVE_PLAYERS, DEFAULT_SEED, default_n_jobs
from .decomposition import direct_sum, shapley_decomposed
from .errors import RegressionError, ReportError
from .generator import GenSpec, GeneratedInstance, generate_decomposable
from .oracle import EntropyOracle
from .rates import RateVector
from .shapley import shapley_direct, shapley_from_table

logger = logging.getLogger(__name__)

CSV_HEADER = (
    "players",
    "clusterId",
    "directCalls",
    "decomposedCalls",
    "directTimeSec",
    "decomposedTimeSec",
    "maxBlockSize",
)

AGGREGATE_HEADER = (
    "players",
    "clusters",
    "directCallsMean",
    "decomposedCallsMean",
    "decomposedCallsRawMean",
    "algorithmCallsMean",
    "directTimeSecMedian",
    "decomposedTimeSecMedian",
    "maxBlockSizeMean",
    "skipped",
    "nJobs",
)


@dataclass(frozen=True)
class BenchConfig:
    """Sweep settings; defaults run |V| = 5..15 with 20 clusters at H(V) = 50."""

    sizes: Tuple[int, ...] = tuple(range(5, 16))
    clusters: int = 20
    total_entropy: Fraction = Fraction(50)
    seed: int = DEFAULT_SEED
    n_jobs: Optional[int] = None
    repetitions: int = 5
    block_count: Union[int, str] = "random"
    max_players: int = DEFAULT_MAX_EXHAUSTIVE_PLAYERS

    def __post_init__(self) -> None:
        if not self.sizes or min(self.sizes) < 1:
            raise ValueError("sizes must be a nonempty list of positive integers")
        if self.clusters < 1:
            raise ValueError("clusters must be at least 1")
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")
        object.__setattr__(self, "total_entropy", Fraction(self.total_entropy))

    @property
    def jobs(self) -> int:
        return self.n_jobs or default_n_jobs()

    def cell_seed(self, players: int, cluster: int) -> int:
        """Seed of one (size, cluster) cell, independent of scheduling order."""
        return int(np.random.SeedSequence([self.seed, players, cluster]).generate_state(1)[0])

    def instance(self, players: int, cluster: int) -> GeneratedInstance:
        return generate_decomposable(
            GenSpec(
                players=players,
                target_total_entropy=self.total_entropy,
                block_count=self.block_count,
                seed=self.cell_seed(players, cluster),
            )
        )


@dataclass(frozen=True)
class BenchRow:
    """
    One (size, cluster) measurement.

    ``decomposed_calls`` counts distinct coalitions over the decomposer search and
    the subgames together and includes the search; ``decomposed_calls_raw``
    counts a coalition each time either phase asks for it.
    """

    players: int
    cluster_id: int
    direct_calls: int
    decomposed_calls: int
    direct_time_sec: float
    decomposed_time_sec: float
    max_block_size: int
    decomposed_calls_raw: int = 0
    algorithm_calls: int = 0
    block_count: int = 0
    skipped: bool = False

    def csv_cells(self) -> List[str]:
        if self.skipped:
            return [str(self.players), str(self.cluster_id), "", "", "", "", ""]
        return [
            str(self.players),
            str(self.cluster_id),
            str(self.direct_calls),
            str(self.decomposed_calls),
            f"{self.direct_time_sec:.6f}",
            f"{self.decomposed_time_sec:.6f}",
            str(self.max_block_size),
        ]


def _skipped(players: int, cluster: int) -> BenchRow:
    return BenchRow(players, cluster, 0, 0, 0.0, 0.0, 0, skipped=True)


def _check_agreement(players: int, cluster: int, direct: RateVector, decomposed: RateVector) -> None:
    if direct != decomposed:
        raise RegressionError(
            f"Decomposed Shapley value differs from the direct one at |V|={players}, cluster {cluster}",
            error_code="SHAPLEY_MISMATCH",
            context={"players": players, "cluster": cluster, "direct": str(direct), "decomposed": str(decomposed)},
        )


def _count_cell(config: BenchConfig, players: int, cluster: int) -> BenchRow:
    if players > config.max_players:
        return _skipped(players, cluster)
    instance = config.instance(players, cluster)

    # Every coalition is evaluated once per request, so the count is 2^|V|.
    direct_oracle = EntropyOracle(instance.model, memoize=False)
    started = time.perf_counter()
    direct = shapley_direct(direct_oracle, max_players=config.max_players)
    direct_time = time.perf_counter() - started

    decomposed_oracle = EntropyOracle(instance.model)
    started = time.perf_counter()
    decomposed = shapley_decomposed(decomposed_oracle, max_players=config.max_players)
    decomposed_time = time.perf_counter() - started

    _check_agreement(players, cluster, direct.value, decomposed.value)
    finest = decomposed.decomposer.finest
    return BenchRow(
        players=players,
        cluster_id=cluster,
        direct_calls=direct.oracle_calls,
        decomposed_calls=decomposed.oracle_calls,
        direct_time_sec=direct_time,
        decomposed_time_sec=decomposed_time,
        max_block_size=finest.largest_block_size,
        decomposed_calls_raw=decomposed.raw_oracle_calls,
        algorithm_calls=decomposed.decomposer.oracle_calls,
        block_count=len(finest),
    )


def run_oracle_count_experiment(config: BenchConfig) -> List[BenchRow]:
    """
    Count oracle calls of both methods on every (size, cluster) cell.

    Cells run on a joblib pool; each cell's instance depends only on its seed.

    Raises:
        RegressionError: If the two methods disagree on any instance
    """
    cells = [(players, cluster) for players in config.sizes for cluster in range(config.clusters)]
    logger.info("Counting oracle calls on %s cells with %s workers", len(cells), config.jobs)
    with Parallel(n_jobs=config.jobs) as pool:
        rows = pool(delayed(_count_cell)(config, players, cluster) for players, cluster in cells)
    return sorted(rows, key=lambda row: (row.players, row.cluster_id))


def _median_time(task: Callable[[], object], repetitions: int) -> Tuple[float, object]:
    result = task()  # warmup, discarded
    samples = []
    for _ in range(repetitions):
        started = time.perf_counter()
        result = task()
        samples.append(time.perf_counter() - started)
    return statistics.median(samples), result


def _timed_block(players: int, table: Sequence[Fraction]) -> Tuple[RateVector, float]:
    """Shapley value of one block and the seconds its worker spent on it."""
    started = time.perf_counter()
    value = shapley_from_table(players, table)
    return value, time.perf_counter() - started


def _median_completion(
    pool: Parallel,
    blocks: Sequence[Coalition],
    block_tables: Sequence[Sequence[Fraction]],
    repetitions: int,
) -> Tuple[float, RateVector]:
    """
    Median completion time of the per-block formulas run side by side.

    Each worker times its own block, so a round completes when its slowest block
    does; dispatch to the pool is not part of the measurement.
    """

    def round_trip() -> Tuple[float, RateVector]:
        timed = pool(delayed(_timed_block)(len(block), table) for block, table in zip(blocks, block_tables))
        value = direct_sum([(block, part) for block, (part, _) in zip(blocks, timed)])
        return max(elapsed for _, elapsed in timed), value

    _, value = round_trip()  # warmup, discarded
    samples = []
    for _ in range(repetitions):
        elapsed, value = round_trip()
        samples.append(elapsed)
    return statistics.median(samples), value


def run_parallel_timing_experiment(config: BenchConfig) -> List[BenchRow]:
    """
    Time the Shapley arithmetic of both methods on prememoized entropy tables.

    Oracle evaluation is excluded. The direct formula runs in this process; the
    per-block formulas run on a process pool opened before timing starts, and the
    decomposed time of a round is its slowest block. Cells run one after another
    so they do not compete for workers.

    Raises:
        RegressionError: If the two methods disagree on any instance
    """
    rows: List[BenchRow] = []
    with Parallel(n_jobs=config.jobs) as pool:
        for players in config.sizes:
            for cluster in range(config.clusters):
                if players > config.max_players:
                    rows.append(_skipped(players, cluster))
                    continue
                instance = config.instance(players, cluster)
                oracle = EntropyOracle(instance.model)
                direct = shapley_direct(oracle, max_players=config.max_players)
                decomposed = shapley_decomposed(oracle, max_players=config.max_players)
                with oracle.phase("prememoize"):
                    table = oracle.table(max_players=config.max_players)
                    blocks = decomposed.decomposer.finest.blocks
                    block_tables = [oracle.restrict(block).table(force=True) for block in blocks]

                direct_time, direct_value = _median_time(
                    lambda: shapley_from_table(players, table), config.repetitions
                )
                decomposed_time, decomposed_value = _median_completion(
                    pool, blocks, block_tables, config.repetitions
                )
                _check_agreement(players, cluster, direct_value, decomposed_value)
                _check_agreement(players, cluster, direct.value, decomposed.value)

                rows.append(
                    BenchRow(
                        players=players,
                        cluster_id=cluster,
                        direct_calls=direct.oracle_calls,
                        decomposed_calls=decomposed.oracle_calls,
                        direct_time_sec=direct_time,
                        decomposed_time_sec=decomposed_time,
                        max_block_size=decomposed.decomposer.finest.largest_block_size,
                        decomposed_calls_raw=decomposed.raw_oracle_calls,
                        algorithm_calls=decomposed.decomposer.oracle_calls,
                        block_count=len(blocks),
                    )
                )
                logger.debug(
                    "|V|=%s cluster %s: direct %.6fs, decomposed %.6fs",
                    players,
                    cluster,
                    direct_time,
                    decomposed_time,
                )
    return rows


@dataclass(frozen=True)
class AggregateRow:
    """Per-size summary: exact means of the counts, medians of the times."""

    players: int
    clusters: int
    direct_calls_mean: Fraction
    decomposed_calls_mean: Fraction
    decomposed_calls_raw_mean: Fraction
    algorithm_calls_mean: Fraction
    direct_time_median: float
    decomposed_time_median: float
    max_block_size_mean: Fraction
    skipped: int = 0


def aggregate_rows(rows: Sequence[BenchRow]) -> List[AggregateRow]:
    by_size: Dict[int, List[BenchRow]] = {}
    for row in rows:
        by_size.setdefault(row.players, []).append(row)

    summaries = []
    for players in sorted(by_size):
        group = by_size[players]
        measured = [row for row in group if not row.skipped]

        def mean(values: List[int]) -> Fraction:
            return Fraction(sum(values), len(values)) if values else Fraction(0)

        def median(values: List[float]) -> float:
            return statistics.median(values) if values else 0.0

        summaries.append(
            AggregateRow(
                players=players,
                clusters=len(group),
                direct_calls_mean=mean([row.direct_calls for row in measured]),
                decomposed_calls_mean=mean([row.decomposed_calls for row in measured]),
                decomposed_calls_raw_mean=mean([row.decomposed_calls_raw for row in measured]),
                algorithm_calls_mean=mean([row.algorithm_calls for row in measured]),
                direct_time_median=median([row.direct_time_sec for row in measured]),
                decomposed_time_median=median([row.decomposed_time_sec for row in measured]),
                max_block_size_mean=mean([row.max_block_size for row in measured]),
                skipped=len(group) - len(measured),
            )
        )
    return summaries


def _format_mean(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{float(value):.2f}"


def default_aggregate_path(path: Path) -> Path:
    return path.with_name(f"{path.stem}_means{path.suffix or '.csv'}")


def emit_report(
    rows: Sequence[BenchRow],
    path: Union[str, Path],
    *,
    aggregate_path: Optional[Union[str, Path]] = None,
    n_jobs: Optional[int] = None,
) -> Tuple[Path, Path]:
    """
    Write the per-cell CSV and the per-size means file.

    Args:
        rows: Benchmark rows
        path: Destination of the per-cell CSV
        aggregate_path: Destination of the means file; ``<stem>_means.csv`` beside ``path`` when omitted
        n_jobs: Parallelism degree recorded in the means file

    Returns:
        The two paths written

    Raises:
        ReportError: If ``rows`` is empty or a file cannot be written
    """
    if not rows:
        raise ReportError("No benchmark rows to report", error_code="EMPTY_REPORT")
    path = Path(path)
    aggregate_path = Path(aggregate_path) if aggregate_path is not None else default_aggregate_path(path)
    jobs = n_jobs or default_n_jobs()

    try:
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(CSV_HEADER)
            for row in rows:
                writer.writerow(row.csv_cells())

        with aggregate_path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(AGGREGATE_HEADER)
            for summary in aggregate_rows(rows):
                writer.writerow(
                    [
                        summary.players,
                        summary.clusters,
                        _format_mean(summary.direct_calls_mean),
                        _format_mean(summary.decomposed_calls_mean),
                        _format_mean(summary.decomposed_calls_raw_mean),
                        _format_mean(summary.algorithm_calls_mean),
                        f"{summary.direct_time_median:.6f}",
                        f"{summary.decomposed_time_median:.6f}",
                        _format_mean(summary.max_block_size_mean),
                        summary.skipped,
                        jobs,
                    ]
                )
    except OSError as exc:
        raise ReportError(
            f"Cannot write benchmark report: {exc}",
            error_code="UNWRITABLE_REPORT",
            context={"path": str(path)},
            cause=exc,
        ) from exc

    logger.info("Wrote %s rows to %s and means to %s", len(rows), path, aggregate_path)
    return path, aggregate_path
