"""
Experiment Configuration Loading and Management

This module provides the run configuration shared by all commands:
- ExperimentConfig with defaults, YAML files and CLI overrides layered in that order
- YAML load/save and validation returning human-readable errors
- Seed fallback to OVERLAP_LAB_SEED (process environment or a .env file)
"""

import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml
from dotenv import load_dotenv

from ..errors import ConfigError
from ..sampling.ensembles import EnsembleKind
from .experiment_types import Command, Experiment

logger = logging.getLogger(__name__)

SEED_ENV_VAR = 'OVERLAP_LAB_SEED'
DEFAULT_SEED = 0
# Used when no ensemble is configured; schur and identities then cover every ensemble
DEFAULT_ENSEMBLE = 'sph'

DEFAULTS: Dict[str, Any] = {
    'command': 'verify',
    'experiment': None,
    'ensemble': None,
    'n': None,
    'm': None,
    'replicas': None,
    'seed': None,
    'alpha': 0.001,
    'threads': 1,
    'out': 'results',
    'format': 'json',
    'sphere': False,
    'window': None,
    'max_n': 256,
    'block_size': 1000,
}

FORMATS = ('csv', 'json')


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def validate_config(config: Dict[str, Any]) -> List[str]:
    """
    Validate a configuration dictionary.

    Args:
        config: Configuration dictionary (possibly partial)

    Returns:
        List of validation errors (empty if valid)
    """
    errors = []

    if not isinstance(config, dict):
        return [f"Configuration must be a mapping, got {type(config).__name__}"]

    for key in sorted(set(config) - set(DEFAULTS)):
        errors.append(f"Unknown key: '{key}'")

    command = config.get('command')
    if command is not None:
        try:
            Command.from_string(str(command))
        except ValueError as e:
            errors.append(f"Invalid command: {e}")

    experiment = config.get('experiment')
    if experiment is not None:
        try:
            Experiment.from_string(str(experiment))
        except ValueError as e:
            errors.append(f"Invalid experiment: {e}")

    ensemble = config.get('ensemble')
    if ensemble is not None:
        try:
            EnsembleKind.from_string(str(ensemble))
        except ValueError as e:
            errors.append(f"Invalid ensemble: {e}")

    for key in ('n', 'm', 'replicas', 'threads', 'max_n', 'block_size'):
        value = config.get(key)
        if value is not None and (not _is_int(value) or value < 1):
            errors.append(f"'{key}' must be a positive integer, got {value!r}")

    n, m = config.get('n'), config.get('m')
    if _is_int(n) and _is_int(m) and m < n:
        errors.append(f"'m' must be >= 'n' (got n={n}, m={m})")

    seed = config.get('seed')
    if seed is not None and not _is_int(seed):
        errors.append(f"'seed' must be an integer, got {seed!r}")

    alpha = config.get('alpha')
    if alpha is not None and (not _is_number(alpha) or not 0.0 < alpha < 1.0):
        errors.append(f"'alpha' must lie in (0, 1), got {alpha!r}")

    window = config.get('window')
    if window is not None and (not _is_number(window) or window <= 0):
        errors.append(f"'window' must be a positive radius, got {window!r}")

    fmt = config.get('format')
    if fmt is not None and fmt not in FORMATS:
        errors.append(f"Invalid format: {fmt}. Must be 'csv' or 'json'")

    sphere = config.get('sphere')
    if sphere is not None and not isinstance(sphere, bool):
        errors.append(f"'sphere' must be true or false, got {sphere!r}")

    out = config.get('out')
    if out is not None and not isinstance(out, str):
        errors.append(f"'out' must be a path string, got {out!r}")

    return errors


def load_config(yaml_file: str) -> Dict[str, Any]:
    """
    Load configuration from YAML file.

    Args:
        yaml_file: Path to YAML configuration file

    Returns:
        Configuration dictionary (empty for an empty file)
    """
    with open(yaml_file, 'r') as f:
        config = yaml.safe_load(f)

    return config if config is not None else {}


def save_config(config: Dict[str, Any], yaml_file: str):
    """
    Save configuration to YAML file.

    Args:
        config: Configuration dictionary
        yaml_file: Path to output YAML file
    """
    with open(yaml_file, 'w') as f:
        yaml.safe_dump(config, f, default_flow_style=False, sort_keys=False)


def seed_from_environment(env_file: Optional[str] = None) -> Optional[int]:
    """
    Seed from OVERLAP_LAB_SEED.

    A .env file (env_file, or ./.env) is loaded first without overriding
    variables already set in the process environment.

    Returns:
        Integer seed or None when the variable is unset
    """
    env_path = Path(env_file) if env_file else Path.cwd() / '.env'
    if env_path.exists():
        load_dotenv(env_path, override=False)
        logger.debug(f"Loaded environment variables from {env_path}")

    raw = os.getenv(SEED_ENV_VAR)
    if raw is None or raw.strip() == '':
        return None
    try:
        return int(raw.strip(), 0)
    except ValueError:
        raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}")


class ExperimentConfig:
    """Effective configuration of one run."""

    def __init__(self, values: Dict[str, Any]):
        """
        Initialize configuration.

        Args:
            values: Complete or partial configuration; missing keys take defaults

        Raises:
            ConfigError: If validation fails
        """
        errors = validate_config(values)
        if errors:
            raise ConfigError("Invalid configuration: " + "; ".join(errors))
        self._values = dict(DEFAULTS)
        self._values.update({k: v for k, v in values.items() if v is not None})

    @classmethod
    def from_sources(cls, file_values: Optional[Dict[str, Any]] = None,
                     overrides: Optional[Dict[str, Any]] = None,
                     env_file: Optional[str] = None) -> 'ExperimentConfig':
        """
        Layer defaults, a YAML file and explicit overrides; fill the seed from the environment.

        Args:
            file_values: Values loaded from a YAML file
            overrides: Explicit values (None entries are ignored)
            env_file: Optional .env path for the seed fallback

        Returns:
            ExperimentConfig
        """
        merged: Dict[str, Any] = {}
        for source in (file_values or {}, overrides or {}):
            errors = validate_config(source)
            if errors:
                raise ConfigError("Invalid configuration: " + "; ".join(errors))
            merged.update({k: v for k, v in source.items() if v is not None})

        if merged.get('seed') is None:
            seed = seed_from_environment(env_file)
            if seed is None:
                logger.debug(f"No seed given and {SEED_ENV_VAR} unset; using {DEFAULT_SEED}")
                seed = DEFAULT_SEED
            merged['seed'] = seed
        return cls(merged)

    def get(self, key: str, default: Any = None) -> Any:
        value = self._values.get(key)
        return default if value is None else value

    def __getattr__(self, key: str) -> Any:
        values = self.__dict__.get('_values')
        if values is not None and key in values:
            return values[key]
        raise AttributeError(key)

    @property
    def command(self) -> Command:
        return Command.from_string(self._values['command'])

    @property
    def experiment_type(self) -> Optional[Experiment]:
        experiment = self._values['experiment']
        return Experiment.from_string(experiment) if experiment is not None else None

    def with_values(self, **changes: Any) -> 'ExperimentConfig':
        values = dict(self._values)
        values.update(changes)
        return ExperimentConfig(values)

    def to_dict(self) -> Dict[str, Any]:
        return dict(self._values)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExperimentConfig):
            return NotImplemented
        return self._values == other._values

    def __repr__(self) -> str:
        return f"ExperimentConfig({self._values})"
