"""
fairrate: fair rate allocation for distributed lossless source coding.

Players observe correlated sources and split the total compression rate among
themselves. This package treats the split as a cooperative game on the joint
entropy function: it checks rate vectors against the Slepian-Wolf region and
its core, enumerates extreme points, and computes Shapley allocations directly
or through the finest decomposition of the game.
"""

import logging

from .config import Config, check_enumeration_limit, load_config
from .errors import (
    EnumerationLimitError,
    FairRateError,
    GenerationError,
    InstanceFormatError,
    ModelError,
    PartitionError,
    PermutationError,
    RegressionError,
    ReportError,
)
from .coalition import (
    Coalition,
    Partition,
    identity_permutation,
    iter_coalitions,
    validate_permutation,
)
from .model import (
    Bit,
    BitSourceModel,
    EntropyModel,
    Instance,
    load_instance,
    save_instance,
)
from .metrics import LedgerSnapshot, OracleLedger
from .oracle import (
    EntropyOracle,
    PolymatroidReport,
    conditional_entropy,
    dual_entropy,
    entropy,
    mutual_information,
    verify_polymatroid,
)
from .rates import RateVector, mean_vector
from .polyhedron import (
    ExtremePointSet,
    MembershipReport,
    Violation,
    check_core,
    check_dual_base,
    check_slepian_wolf,
    edmonds_greedy,
    enumerate_extreme_points,
)
from .shapley import (
    ShapleyMethod,
    ShapleyResult,
    shapley_by_permutations,
    shapley_direct,
    shapley_from_table,
    shapley_sampled,
)
from .decomposition import (
    DecomposerResult,
    core_dimension,
    direct_sum,
    finest_decomposer,
    is_decomposer,
    partition_cost,
    restrict_model,
    shapley_decomposed,
)
from .generator import GeneratedInstance, GenSpec, generate_decomposable, generate_indecomposable
from .bench import (
    BenchConfig,
    BenchRow,
    emit_report,
    run_oracle_count_experiment,
    run_parallel_timing_experiment,
)
from .logging_config import setup_logging

_root_logger = logging.getLogger("fairrate")
if not any(isinstance(handler, logging.NullHandler) for handler in _root_logger.handlers):
    _root_logger.addHandler(logging.NullHandler())

__version__ = "0.1.0"

__all__ = [
    # Configuration
    "Config",
    "load_config",
    "check_enumeration_limit",

    # Errors
    "FairRateError",
    "ModelError",
    "InstanceFormatError",
    "EnumerationLimitError",
    "PermutationError",
    "PartitionError",
    "GenerationError",
    "ReportError",
    "RegressionError",

    # Coalitions
    "Coalition",
    "Partition",
    "iter_coalitions",
    "identity_permutation",
    "validate_permutation",

    # Models
    "Bit",
    "BitSourceModel",
    "EntropyModel",
    "Instance",
    "load_instance",
    "save_instance",

    # Oracle
    "EntropyOracle",
    "OracleLedger",
    "LedgerSnapshot",
    "PolymatroidReport",
    "entropy",
    "conditional_entropy",
    "mutual_information",
    "dual_entropy",
    "verify_polymatroid",

    # Rate regions
    "RateVector",
    "mean_vector",
    "Violation",
    "MembershipReport",
    "ExtremePointSet",
    "check_slepian_wolf",
    "check_core",
    "check_dual_base",
    "edmonds_greedy",
    "enumerate_extreme_points",

    # Shapley value
    "ShapleyMethod",
    "ShapleyResult",
    "shapley_from_table",
    "shapley_direct",
    "shapley_by_permutations",
    "shapley_sampled",

    # Decomposition
    "DecomposerResult",
    "restrict_model",
    "partition_cost",
    "is_decomposer",
    "finest_decomposer",
    "direct_sum",
    "shapley_decomposed",
    "core_dimension",

    # Experiments
    "GenSpec",
    "GeneratedInstance",
    "generate_decomposable",
    "generate_indecomposable",
    "BenchConfig",
    "BenchRow",
    "run_oracle_count_experiment",
    "run_parallel_timing_experiment",
    "emit_report",

    # Logging
    "setup_logging",
]
