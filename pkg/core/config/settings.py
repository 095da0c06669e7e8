"""Lab settings from a TOML file and SOFTCOVER_* environment variables."""

import os
from pathlib import Path
from typing import Optional

import toml
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from ..errors import ConfigError


LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class LabSettings(BaseSettings):
    """Process-wide knobs; environment variables win over the TOML file."""

    model_config = SettingsConfigDict(
        env_prefix="SOFTCOVER_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        env_nested_delimiter="__",
        extra="ignore",
    )

    threads: Optional[int] = Field(default=None, ge=1, description="Concurrent workers; CPU count when unset")
    log_level: str = Field(default="WARNING")
    results_dir: str = Field(default="results")
    codebook_budget: int = Field(default=2 ** 26, ge=1, description="Maximum stored codebook symbols")
    codebooks_per_experiment: int = Field(default=10, ge=1)

    @property
    def worker_count(self) -> int:
        return self.threads or os.cpu_count() or 1


def load_settings_from_toml(config_path: str = "softcover.toml") -> dict:
    """Read the [lab] table of a TOML file; a missing file yields no overrides."""
    config_file = Path(config_path)
    if not config_file.exists():
        return {}
    try:
        with open(config_file, "r", encoding="utf-8") as f:
            data = toml.load(f)
    except (toml.TomlDecodeError, IOError) as e:
        raise ConfigError(f"Failed to load settings from {config_path}: {e}")
    return data.get("lab", {})


def load_lab_settings(config_path: str = "softcover.toml") -> LabSettings:
    """Settings with TOML values applied only where no environment variable is set."""
    toml_settings = load_settings_from_toml(config_path)
    settings = LabSettings()
    overrides = {
        key: value
        for key, value in toml_settings.items()
        if key in LabSettings.model_fields and not os.getenv(f"SOFTCOVER_{key.upper()}")
    }
    if not overrides:
        return settings
    return LabSettings.model_validate({**settings.model_dump(), **overrides})


def validate_settings(settings: LabSettings) -> list[str]:
    """Human-readable problems with a settings object; empty when usable."""
    errors = []
    if settings.log_level.upper() not in LOG_LEVELS:
        errors.append(f"Unknown log level {settings.log_level!r}; use one of {', '.join(LOG_LEVELS)}")
    results_dir = Path(settings.results_dir)
    if results_dir.exists() and not results_dir.is_dir():
        errors.append(f"Results path exists but is not a directory: {settings.results_dir}")
    return errors
