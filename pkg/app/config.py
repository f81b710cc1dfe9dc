import os
from dataclasses import dataclass
from pathlib import Path

from dotenv import load_dotenv

from .errors import InvalidConfig

DATA_DIR = Path(__file__).parent / "data"

VOCABULARY_FILE = DATA_DIR / "umr_vocabulary.tsv"
UD_RULES_FILE = DATA_DIR / "ud_rules.tsv"
ROLE_MAPPINGS_FILE = DATA_DIR / "role_mappings.tsv"
SPLIT_ROLES_FILE = DATA_DIR / "split_roles.tsv"
ANIMACY_FILE = DATA_DIR / "animacy.tsv"
REPORT_SCHEMA_FILE = DATA_DIR / "report_schema.json"

LOG_LEVELS = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}


@dataclass(frozen=True)
class Settings:
    log_level: str = "INFO"
    log_file: str | None = None
    restarts: int = 4
    seed: int = 0
    exact_threshold: int = 8
    jobs: int = 1


def _int_env(name: str, default: int, minimum: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        value = int(raw)
    except ValueError as e:
        raise InvalidConfig(f"{name} must be an integer, got {raw!r}") from e
    if value < minimum:
        raise InvalidConfig(f"{name} must be >= {minimum}, got {value}")
    return value


def load_settings() -> Settings:
    """Read settings from the environment (and a .env file if present)."""
    load_dotenv()

    log_level = os.getenv("UMR_LOG_LEVEL", "INFO").upper()
    if log_level not in LOG_LEVELS:
        raise InvalidConfig(f"UMR_LOG_LEVEL must be one of {sorted(LOG_LEVELS)}, got {log_level!r}")

    return Settings(
        log_level=log_level,
        log_file=os.getenv("UMR_LOG_FILE") or None,
        restarts=_int_env("UMR_RESTARTS", 4, 1),
        seed=_int_env("UMR_SEED", 0, 0),
        exact_threshold=_int_env("UMR_EXACT_THRESHOLD", 8, 1),
        jobs=_int_env("UMR_JOBS", 1, 1),
    )
