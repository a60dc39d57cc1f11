"""
Configuration management for fairrate.
"""

import logging
import os
from pathlib import Path
from typing import Dict, Optional

import psutil
from dotenv import load_dotenv

from .errors import EnumerationLimitError

logger = logging.getLogger(__name__)

DEFAULT_MAX_EXHAUSTIVE_PLAYERS = 24
DEFAULT_MAX_PERMUTATION_PLAYERS = 9
DEFAULT_SAMPLED_SAMPLES = 6000
DEFAULT_SEED = 0

# Coalitions are machine-word bitmasks.
MAX_GROUND_SIZE = 64

_TRUTHY = {"1", "true", "yes", "y", "on"}
_FALSY = {"0", "false", "no", "n", "off"}


def default_n_jobs() -> int:
    """Number of hardware threads available to worker pools."""
    return psutil.cpu_count(logical=True) or 1


class Config:
    """Configuration class for fairrate."""

    def __init__(
        self,
        max_exhaustive_players: Optional[int] = None,
        max_permutation_players: Optional[int] = None,
        memoize: Optional[bool] = None,
        n_jobs: Optional[int] = None,
        default_seed: Optional[int] = None,
        sampled_samples: Optional[int] = None,
    ):
        """
        Initialize the configuration.

        Args:
            max_exhaustive_players: Cap on |V| for operations touching all 2^|V| coalitions
            max_permutation_players: Cap on |V| for operations touching all |V|! permutations
            memoize: Whether entropy oracles deduplicate repeated coalitions per phase
            n_jobs: Worker count for parallel phases
            default_seed: Seed used when a command is not given one
            sampled_samples: Default number of permutations for sampled Shapley

        Raises:
            ValueError: If a numeric setting is out of range
        """
        self.max_exhaustive_players = (
            max_exhaustive_players
            if max_exhaustive_players is not None
            else DEFAULT_MAX_EXHAUSTIVE_PLAYERS
        )
        self.max_permutation_players = (
            max_permutation_players
            if max_permutation_players is not None
            else DEFAULT_MAX_PERMUTATION_PLAYERS
        )
        self.memoize = memoize if memoize is not None else True
        self.n_jobs = n_jobs if n_jobs is not None else default_n_jobs()
        self.default_seed = default_seed if default_seed is not None else DEFAULT_SEED
        self.sampled_samples = (
            sampled_samples if sampled_samples is not None else DEFAULT_SAMPLED_SAMPLES
        )

        if not 1 <= self.max_exhaustive_players <= MAX_GROUND_SIZE:
            raise ValueError(
                f"max_exhaustive_players must be between 1 and {MAX_GROUND_SIZE}"
            )
        if not 1 <= self.max_permutation_players <= MAX_GROUND_SIZE:
            raise ValueError(
                f"max_permutation_players must be between 1 and {MAX_GROUND_SIZE}"
            )
        if self.n_jobs < 1:
            raise ValueError("n_jobs must be at least 1")
        if self.sampled_samples < 1:
            raise ValueError("sampled_samples must be at least 1")

    def as_dict(self) -> Dict[str, object]:
        """Plain mapping of every setting, in display order."""
        return {
            "max_exhaustive_players": self.max_exhaustive_players,
            "max_permutation_players": self.max_permutation_players,
            "memoize": self.memoize,
            "n_jobs": self.n_jobs,
            "default_seed": self.default_seed,
            "sampled_samples": self.sampled_samples,
        }

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Config):
            return False
        return self.as_dict() == other.as_dict()

    def __repr__(self) -> str:
        fields = ", ".join(f"{key}={value!r}" for key, value in self.as_dict().items())
        return f"Config({fields})"

    __str__ = __repr__


ENV_VARIABLES = {
    "max_exhaustive_players": "FAIRRATE_MAX_EXHAUSTIVE_PLAYERS",
    "max_permutation_players": "FAIRRATE_MAX_PERMUTATION_PLAYERS",
    "memoize": "FAIRRATE_MEMOIZE",
    "n_jobs": "FAIRRATE_N_JOBS",
    "default_seed": "FAIRRATE_SEED",
    "sampled_samples": "FAIRRATE_SAMPLED_SAMPLES",
}


def get_global_config_path() -> Path:
    """Get the path to the global configuration file.

    This function reads from the current environment (not cached values)
    to ensure test isolation works correctly.
    """
    if os.name == "nt":  # Windows
        appdata = os.getenv("APPDATA", "")
        config_dir = Path(appdata) / "fairrate" if appdata else Path.home() / ".config" / "fairrate"
    else:
        xdg_config_home = os.getenv("XDG_CONFIG_HOME")
        if xdg_config_home:
            config_dir = Path(xdg_config_home) / "fairrate"
        else:
            config_dir = Path.home() / ".config" / "fairrate"

    return config_dir / ".env"


def _read_int(name: str) -> Optional[int]:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return None
    try:
        return int(raw.strip())
    except ValueError as exc:
        raise ValueError(f"{name} must be an integer, got {raw!r}") from exc


def _read_bool(name: str) -> Optional[bool]:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return None
    lowered = raw.strip().lower()
    if lowered in _TRUTHY:
        return True
    if lowered in _FALSY:
        return False
    raise ValueError(f"{name} must be a boolean flag, got {raw!r}")


def load_config(
    *,
    max_exhaustive_players: Optional[int] = None,
    max_permutation_players: Optional[int] = None,
    memoize: Optional[bool] = None,
    n_jobs: Optional[int] = None,
    default_seed: Optional[int] = None,
    sampled_samples: Optional[int] = None,
) -> Config:
    """
    Load configuration from explicit values, environment variables or .env files.

    Configuration is loaded in the following priority order:
    1. Explicit keyword arguments
    2. Environment variables
    3. Local .env file (current directory)
    4. Global .env file (~/.config/fairrate/.env) - opt-in via FAIRRATE_USE_GLOBAL_CONFIG=1
    5. Built-in defaults

    Returns:
        Config: The loaded configuration.

    Raises:
        ValueError: If an environment variable is malformed.
    """
    local_env_path = Path(".env")
    if local_env_path.exists():
        load_dotenv(local_env_path, override=False)

    if (os.getenv("FAIRRATE_USE_GLOBAL_CONFIG") or "").strip().lower() in _TRUTHY:
        global_env_path = get_global_config_path()
        if global_env_path.exists():
            load_dotenv(global_env_path, override=False)

    def pick_int(value: Optional[int], key: str) -> Optional[int]:
        return value if value is not None else _read_int(ENV_VARIABLES[key])

    return Config(
        max_exhaustive_players=pick_int(max_exhaustive_players, "max_exhaustive_players"),
        max_permutation_players=pick_int(max_permutation_players, "max_permutation_players"),
        memoize=memoize if memoize is not None else _read_bool(ENV_VARIABLES["memoize"]),
        n_jobs=pick_int(n_jobs, "n_jobs"),
        default_seed=pick_int(default_seed, "default_seed"),
        sampled_samples=pick_int(sampled_samples, "sampled_samples"),
    )


def check_enumeration_limit(
    players: int,
    limit: Optional[int],
    *,
    operation: str,
    force: bool = False,
    default: int = DEFAULT_MAX_EXHAUSTIVE_PLAYERS,
) -> None:
    """
    Refuse exhaustive work on ground sets larger than ``limit``.

    Args:
        players: Ground-set size |V|
        limit: Cap to apply; ``default`` when None
        operation: Name reported in the error and log
        force: Proceed anyway, logging a warning

    Raises:
        EnumerationLimitError: If ``players`` exceeds the cap and ``force`` is False
    """
    cap = default if limit is None else limit
    if players <= cap:
        return
    if force:
        logger.warning(
            "%s on %s players exceeds the cap of %s; proceeding because force=True",
            operation,
            players,
            cap,
        )
        return
    raise EnumerationLimitError(
        f"{operation} refuses {players} players (cap is {cap})",
        players=players,
        limit=cap,
        operation=operation,
    )
