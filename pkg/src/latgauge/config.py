# Location: src/latgauge/config.py
import logging
import os
from dataclasses import dataclass
from pathlib import Path

from dotenv import load_dotenv

from latgauge.errors import ConfigError

load_dotenv()

LOG_LEVELS = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}


@dataclass(frozen=True)
class Settings:
    cache_dir: Path
    log_level: str
    seed: int


def get_setting(key, default=None):
    """Get a setting from the environment (a local .env is loaded at import)."""
    value = os.getenv(key)
    if value is None or not value.strip():
        return default
    return value.strip()


def default_cache_dir() -> Path:
    base = get_setting("XDG_CACHE_HOME")
    if base:
        return Path(base) / "latgauge"
    return Path.home() / ".cache" / "latgauge"


def load_settings(
    cache_dir: str | Path | None = None,
    log_level: str | None = None,
    seed: int | None = None,
) -> Settings:
    """Resolve settings: explicit arguments, then LATGAUGE_* variables, then defaults."""
    raw_cache = cache_dir or get_setting("LATGAUGE_CACHE")
    resolved_cache = Path(raw_cache).expanduser() if raw_cache else default_cache_dir()

    level = (log_level or get_setting("LATGAUGE_LOG_LEVEL", "INFO")).upper()
    if level not in LOG_LEVELS:
        raise ConfigError(f"Unsupported log level: {level}. Use one of {sorted(LOG_LEVELS)}")

    if seed is None:
        raw_seed = get_setting("LATGAUGE_SEED", "0")
        try:
            seed = int(raw_seed)
        except ValueError:
            raise ConfigError(f"LATGAUGE_SEED must be an integer, got {raw_seed!r}") from None
    if not 0 <= seed < 2**64:
        raise ConfigError(f"Seed must fit in 64 bits, got {seed}")

    return Settings(cache_dir=resolved_cache, log_level=level, seed=seed)


def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
