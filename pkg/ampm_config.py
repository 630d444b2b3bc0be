"""
AMPM Toolkit Configuration
==========================
Defines the size bounds and defaults used by the simulator, the circuit
builder and the command-line front end.

This file controls:
- Maximum query-register size for the dense statevector simulator
- Maximum total qubits for gate-level simulation
- Maximum query-register size for oracle synthesis
- Default sampling seed and CLI log level

To modify settings:
1. Edit DEFAULT_SETTINGS below, OR
2. Create a config/ampm.json file (path override: AMPM_CONFIG_FILE), OR
3. Set environment variables (or a .env file) - these win over the JSON file
"""

import os
import json
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from dotenv import load_dotenv

from ampm_errors import ConfigurationError

load_dotenv()

# =============================================================================
# DEFAULTS
# =============================================================================
# 2^24 amplitudes at 16 bytes each is 256 MB.

DEFAULT_SETTINGS = {
    "max_qubits": 24,
    "max_gate_qubits": 12,
    "max_synthesis_qubits": 6,
    "default_seed": 1234,
    "log_level": "WARNING",
}

DEFAULT_CONFIG_FILE = "config/ampm.json"

# JSON key -> environment variable
ENV_VARS = {
    "max_qubits": "AMPM_MAX_QUBITS",
    "max_gate_qubits": "AMPM_MAX_GATE_QUBITS",
    "max_synthesis_qubits": "AMPM_MAX_SYNTHESIS_QUBITS",
    "default_seed": "AMPM_DEFAULT_SEED",
    "log_level": "AMPM_LOG_LEVEL",
}

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass(frozen=True)
class Settings:
    max_qubits: int
    max_gate_qubits: int
    max_synthesis_qubits: int
    default_seed: int
    log_level: str


# =============================================================================
# CONFIGURATION LOADER
# =============================================================================

def _config_file(path, environ):
    return Path(path or environ.get("AMPM_CONFIG_FILE") or DEFAULT_CONFIG_FILE)


def load_config_file(path=None, environ=None):
    """
    Load overrides from the JSON config file.

    Priority of the path:
    1. explicit argument
    2. AMPM_CONFIG_FILE environment variable
    3. config/ampm.json

    Returns:
        Dict of overrides (empty if the file does not exist)
    """
    config_file = _config_file(path, os.environ if environ is None else environ)

    if not config_file.exists():
        return {}

    try:
        with open(config_file, 'r', encoding='utf-8') as f:
            config = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"{config_file}: invalid JSON ({e})") from e

    if not isinstance(config, dict):
        raise ConfigurationError(f"{config_file}: expected a JSON object")

    # Keys starting with "_" are comments
    return {k: v for k, v in config.items() if not k.startswith("_")}


def _coerce(key, value):
    if key == "log_level":
        level = str(value).upper()
        if level not in LOG_LEVELS:
            raise ConfigurationError(f"{key}: expected one of {LOG_LEVELS}, got {value!r}")
        return level

    try:
        number = int(value)
    except (TypeError, ValueError) as e:
        raise ConfigurationError(f"{key}: expected an integer, got {value!r}") from e

    if key != "default_seed" and number < 1:
        raise ConfigurationError(f"{key}: must be positive, got {number}")
    if key == "default_seed" and number < 0:
        raise ConfigurationError(f"{key}: must be non-negative, got {number}")
    return number


def _file_stamp(config_file):
    try:
        stat = config_file.stat()
    except OSError:
        return None
    return stat.st_mtime_ns, stat.st_size


@lru_cache(maxsize=32)
def _build_settings(config_file, stamp, env_values):
    values = dict(DEFAULT_SETTINGS)
    for key, value in load_config_file(config_file).items():
        if key not in DEFAULT_SETTINGS:
            raise ConfigurationError(f"unknown configuration key: {key}")
        values[key] = value

    for key, value in zip(ENV_VARS, env_values):
        if value not in (None, ""):
            values[key] = value

    return Settings(**{key: _coerce(key, value) for key, value in values.items()})


def get_settings(config_path=None, environ=None):
    """
    Build the effective settings: defaults <- JSON file <- environment.

    Results are cached per (config file, file stamp, AMPM_* values), so
    editing the file or the environment is picked up on the next call.

    Args:
        config_path: Optional path to a JSON config file
        environ: Mapping used instead of os.environ (tests)

    Returns:
        Settings
    """
    environ = os.environ if environ is None else environ
    config_file = _config_file(config_path, environ)
    env_values = tuple(environ.get(name) for name in ENV_VARS.values())
    return _build_settings(str(config_file), _file_stamp(config_file), env_values)


# =============================================================================
# CLI FOR CHECKING
# =============================================================================

if __name__ == "__main__":
    print("\n" + "=" * 60)
    print("AMPM TOOLKIT CONFIGURATION")
    print("=" * 60)

    settings = get_settings()
    for key in DEFAULT_SETTINGS:
        print(f"  {key:<22} {getattr(settings, key)}  ({ENV_VARS[key]})")

    print("=" * 60)
