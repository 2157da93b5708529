"""
Runtime configuration loaded from the environment (.env supported)
"""
import os
from typing import Dict

from dotenv import load_dotenv, dotenv_values
from pydantic import BaseModel, Field, ValidationError, field_validator

from errors import ConfigError

load_dotenv()

BACKEND_DIR = os.path.dirname(os.path.abspath(__file__))
ROOT_DIR = os.path.dirname(BACKEND_DIR)


class Settings(BaseModel):
    """Validated settings; every field maps to a TURAN_* environment variable"""
    enum_cap: int = Field(default=7, ge=2, le=8)
    enum_workers: int = Field(default=1, ge=1)
    chain_workers: int = Field(default=1, ge=1)
    store_path: str = os.path.join(BACKEND_DIR, "turan_store.db")
    log_level: str = "INFO"
    seed: int = Field(default=20240101, ge=0, lt=2 ** 64)
    presets_path: str = os.path.join(ROOT_DIR, "presets.env")

    @field_validator("log_level")
    @classmethod
    def _upper_level(cls, value: str) -> str:
        value = value.upper()
        if value not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"unknown log level {value!r}")
        return value


_ENV_NAMES = {
    "enum_cap": "TURAN_ENUM_CAP",
    "enum_workers": "TURAN_ENUM_WORKERS",
    "chain_workers": "TURAN_CHAIN_WORKERS",
    "store_path": "TURAN_STORE_PATH",
    "log_level": "TURAN_LOG_LEVEL",
    "seed": "TURAN_SEED",
    "presets_path": "TURAN_PRESETS",
}


def get_settings() -> Settings:
    """
    Read settings from the process environment

    Returns:
        Settings with defaults for every unset variable

    Raises:
        ConfigError: if a variable is set to an invalid value
    """
    values = {}
    for field, env_name in _ENV_NAMES.items():
        raw = os.getenv(env_name)
        if raw is not None and raw != "":
            values[field] = raw
    try:
        return Settings(**values)
    except ValidationError as exc:
        raise ConfigError(f"invalid environment configuration: {exc}") from exc


def load_presets(path: str) -> Dict[str, str]:
    """
    Load CLI presets (preset name -> flag string) from a dotenv-style file

    Args:
        path: preset file path

    Returns:
        Mapping of lower-cased preset names to flag strings
    """
    if not os.path.exists(path):
        raise ConfigError(f"preset file not found: {path}")
    return {key.lower(): value for key, value in dotenv_values(path).items() if value}
