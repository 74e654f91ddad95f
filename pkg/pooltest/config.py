import logging
import os
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from pooltest.errors import DomainError
from pooltest.models import MAX_SEED


DEFAULT_SEED = 20211
DEFAULT_WORKERS = 1
DEFAULT_LOG_LEVEL = "WARNING"


class Settings(BaseModel):
    model_config = ConfigDict(frozen=True)

    seed: int = Field(default=DEFAULT_SEED, ge=0, le=MAX_SEED)
    workers: int = Field(default=DEFAULT_WORKERS, ge=1)
    log_level: str = DEFAULT_LOG_LEVEL


def get_env_seed() -> Optional[str]:
    return os.getenv("POOLTEST_SEED")


def get_env_workers() -> Optional[str]:
    return os.getenv("POOLTEST_WORKERS")


def get_env_log_level() -> Optional[str]:
    return os.getenv("POOLTEST_LOG_LEVEL")


def _parse_int(name: str, raw: Optional[str], default: int, low: int, high: Optional[int] = None) -> int:
    if raw is None or not raw.strip():
        return default
    try:
        value = int(raw.strip(), 0)
    except ValueError as exc:
        raise DomainError(f"{name} must be an integer, got {raw!r}") from exc
    if value < low or (high is not None and value > high):
        raise DomainError(f"{name}={value} is out of range")
    return value


def _parse_level(raw: Optional[str]) -> str:
    if raw is None or not raw.strip():
        return DEFAULT_LOG_LEVEL
    level = raw.strip().upper()
    if not isinstance(logging.getLevelName(level), int):
        raise DomainError(f"POOLTEST_LOG_LEVEL={raw!r} is not a logging level")
    return level


def load_settings() -> Settings:
    return Settings(
        seed=_parse_int("POOLTEST_SEED", get_env_seed(), DEFAULT_SEED, 0, MAX_SEED),
        workers=_parse_int("POOLTEST_WORKERS", get_env_workers(), DEFAULT_WORKERS, 1),
        log_level=_parse_level(get_env_log_level()),
    )


def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
