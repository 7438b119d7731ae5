"""
Settings Module

Loads brute-force bounds and default search parameters from
config/qpk_defaults.json, overridden by config/.env and the process
environment (QPK_* variables).
"""

import os
import json
import logging
from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger("Settings")

CONFIG_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "config")
DEFAULTS_FILE = os.path.join(CONFIG_DIR, "qpk_defaults.json")
ENV_FILE = os.path.join(CONFIG_DIR, ".env")

DEFAULTS = {
    "max_carrier": 20,
    "max_generators": 16,
    "max_rank": 4,
    "default_depth": 8,
    "default_precision": 16,
    "default_samples": 100,
    "default_seed": 0,
    "log_level": "INFO",
    "log_dir": "logs",
}

_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class Settings(BaseModel):
    max_carrier: int = Field(20, ge=0)
    max_generators: int = Field(16, ge=0)
    max_rank: int = Field(4, ge=1)
    default_depth: int = Field(8, ge=1)
    default_precision: int = Field(16, ge=1)
    default_samples: int = Field(100, ge=1)
    default_seed: int = 0
    log_level: str = "INFO"
    log_dir: str = "logs"

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value):
        value = value.upper()
        if value not in _LEVELS:
            raise ValueError(f"unknown log level {value}")
        return value


def _initialize_defaults():
    """Create the defaults file if it doesn't exist."""
    if not os.path.exists(DEFAULTS_FILE):
        try:
            os.makedirs(CONFIG_DIR, exist_ok=True)
            with open(DEFAULTS_FILE, "w") as f:
                json.dump(DEFAULTS, f, indent=2)
            logger.info(f"Created default settings file at {DEFAULTS_FILE}")
        except OSError as e:
            logger.error(f"Error creating defaults file: {e}")


def load_settings():
    """
    Merge the JSON defaults with QPK_* environment variables.

    Returns:
        Settings: validated settings
    """
    load_dotenv(ENV_FILE)
    _initialize_defaults()

    values = dict(DEFAULTS)
    try:
        with open(DEFAULTS_FILE, "r") as f:
            values.update(json.load(f))
    except (OSError, ValueError) as e:
        logger.error(f"Error reading defaults file: {e}")

    for key in DEFAULTS:
        env_value = os.getenv(f"QPK_{key.upper()}")
        if env_value is not None:
            values[key] = env_value

    return Settings(**values)


_settings = None


def get_settings():
    global _settings
    if _settings is None:
        _settings = load_settings()
    return _settings


def reload_settings():
    global _settings
    _settings = None
    return get_settings()
