import os
import toml
from pathlib import Path
import logging

from helpers.errors import ConfigError

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_FILE = Path("mixmult.toml")

DEFAULT_SETTINGS = {
    "seed": 0,
    "retries": 32,
    "coefficient_bound": 1000,
    "window": 3,
    "grid_offset": 2,
    "grid_attempts": 3,
    "superficial_offset_factor": 3,
    "superficial_span": 3,
    "jobs": 1,
    "log_file": "mixmult.log",
    "log_level": "INFO",
}

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def config_file() -> Path:
    """mixmult.toml in the working directory unless MIXMULT_CONFIG points elsewhere."""
    override = os.environ.get("MIXMULT_CONFIG")
    return Path(override) if override else DEFAULT_CONFIG_FILE


def validate_settings(settings: dict) -> dict:
    """Checks types and ranges; unknown keys are an error."""
    out = {}
    for key, value in settings.items():
        if key not in DEFAULT_SETTINGS:
            raise ConfigError(f"unknown setting '{key}'")
        default = DEFAULT_SETTINGS[key]
        if isinstance(default, int):
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"setting '{key}' must be an integer, got {value!r}")
            if key != "seed" and value < (0 if key in ("grid_offset", "window") else 1):
                raise ConfigError(f"setting '{key}' is out of range: {value}")
        elif not isinstance(value, str):
            raise ConfigError(f"setting '{key}' must be a string, got {value!r}")
        if key == "log_level" and value.upper() not in LOG_LEVELS:
            raise ConfigError(f"unknown log level '{value}'")
        out[key] = value
    return out


def load_settings(path: Path = None) -> dict:
    """Built-in defaults overlaid with the [defaults] table of the config file."""
    path = config_file() if path is None else Path(path)
    settings = dict(DEFAULT_SETTINGS)
    if not path.exists():
        logger.info(f"{path} not found, using built-in defaults.")
        return settings
    try:
        with open(path, "r") as f:
            config_data = toml.load(f)
    except Exception as e:
        logger.error(f"Error loading settings from {path}: {e}")
        return settings
    settings.update(validate_settings(config_data.get("defaults", {})))
    logger.info(f"Loaded settings from {path}")
    return settings


def save_settings(settings: dict, path: Path = None) -> bool:
    """Writes the [defaults] table back to the config file."""
    path = config_file() if path is None else Path(path)
    config_data = {"defaults": validate_settings(settings)}
    try:
        with open(path, "w") as f:
            toml.dump(config_data, f)
        logger.info(f"Saved settings to {path}")
        return True
    except Exception as e:
        logger.error(f"Error saving settings to {path}: {e}")
        return False


def merge_settings(*layers: dict) -> dict:
    """Later layers win; None values in a layer are ignored."""
    out = dict(DEFAULT_SETTINGS)
    for layer in layers:
        out.update(validate_settings({k: v for k, v in layer.items() if v is not None}))
    return out
