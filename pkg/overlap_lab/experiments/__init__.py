"""
Run configuration, verification suites, CLI commands and reports.
"""

from .experiment_types import Command, Experiment
from .experiment_config import (
    DEFAULTS,
    DEFAULT_ENSEMBLE,
    SEED_ENV_VAR,
    ExperimentConfig,
    validate_config,
    load_config,
    save_config,
    seed_from_environment,
)
from .reporting import (
    SCHEMA_VERSION,
    TestRecord,
    ExperimentReport,
    write_json,
    write_table,
)
from .suites import SUITES, SuiteContext, reference_spectrum, run_experiment
from .commands import (
    sample_table,
    overlap_histogram,
    cmd_sample,
    cmd_overlap_hist,
    cmd_verify,
)

__all__ = [
    # Types
    'Command',
    'Experiment',
    # Configuration
    'DEFAULTS',
    'DEFAULT_ENSEMBLE',
    'SEED_ENV_VAR',
    'ExperimentConfig',
    'validate_config',
    'load_config',
    'save_config',
    'seed_from_environment',
    # Reports
    'SCHEMA_VERSION',
    'TestRecord',
    'ExperimentReport',
    'write_json',
    'write_table',
    # Suites
    'SUITES',
    'SuiteContext',
    'reference_spectrum',
    'run_experiment',
    # Commands
    'sample_table',
    'overlap_histogram',
    'cmd_sample',
    'cmd_overlap_hist',
    'cmd_verify',
]
