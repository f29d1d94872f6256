"""
CLI Commands

This module provides the three commands behind `main.py`:
- cmd_sample: eigenvalue point clouds, optionally lifted to the sphere
- cmd_overlap_hist: scaled diagonal overlaps inside a bulk window
- cmd_verify: one verification suite and its report
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from ..errors import DegenerateSpectrum, EmptyInputError, ParameterError
from ..analysis.formulas import inv_gamma2_cdf, inv_gamma2_median
from ..analysis.overlaps import overlap_matrix
from ..analysis.statistical_analysis import describe_sample, ks_one_sample
from ..sampling.ensembles import EnsembleKind, sample_matrix, stereo_project_many
from .experiment_config import ExperimentConfig
from .reporting import SCHEMA_VERSION, ExperimentReport, write_json, write_table
from .suites import SuiteContext, run_experiment

logger = logging.getLogger(__name__)

SAMPLE_DEFAULT_N = 100
SAMPLE_DEFAULT_REPLICAS = 1
HIST_DEFAULT_N = 100
HIST_DEFAULT_REPLICAS = 30
HIST_DEFAULT_WINDOW = 0.8

SAMPLES_FILE = 'samples.csv'
OVERLAPS_FILE = 'overlaps.csv'
OVERLAPS_SUMMARY_FILE = 'overlaps_summary.json'


def sample_table(config: ExperimentConfig) -> pd.DataFrame:
    """
    Eigenvalues of `replicas` direct draws, one row per eigenvalue.

    Columns: replica, index, re, im, plus sx, sy, sz (stereographic preimage) when `sphere` is set.
    """
    ctx = SuiteContext(config)
    spec = ctx.spec(SAMPLE_DEFAULT_N)
    replicas = ctx.replicas(SAMPLE_DEFAULT_REPLICAS)
    logger.info(f"Sampling {replicas} spectra of {spec.short_name}")

    spectra = ctx.runner.sample_spectra(spec, replicas)
    values = np.concatenate([s.values for s in spectra])
    columns: Dict[str, Any] = {
        'replica': np.repeat(np.arange(replicas), spec.n),
        'index': np.tile(np.arange(spec.n), replicas),
        're': values.real,
        'im': values.imag,
    }
    if config.sphere:
        points = stereo_project_many(values)
        columns.update({'sx': points[:, 0], 'sy': points[:, 1], 'sz': points[:, 2]})
    return pd.DataFrame(columns)


def _replica_overlaps(spec, rng) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    g = sample_matrix(spec, rng)
    try:
        o = overlap_matrix(g)
    except DegenerateSpectrum as e:
        logger.warning(f"Skipping replica with nearly repeated eigenvalues: {e}")
        return None
    return o.spectrum.values, o.diagonal()


def overlap_histogram(config: ExperimentConfig) -> Tuple[pd.DataFrame, Dict[str, Any]]:
    """
    Diagonal overlaps O_ii/N of direct draws whose eigenvalue lies in |z| < window.

    Args:
        config: Run configuration (ensemble, n, m, replicas, window, max_n)

    Returns:
        (table with replica, re, im, o_scaled; summary dictionary)

    Raises:
        ParameterError: N above the max_n guard
        EmptyInputError: No eigenvalue fell inside the window
    """
    ctx = SuiteContext(config)
    spec = ctx.spec(HIST_DEFAULT_N)
    if spec.n > config.max_n:
        raise ParameterError(f"overlap-hist is limited to N <= {config.max_n} (got {spec.n}); raise --max-n")
    replicas = ctx.replicas(HIST_DEFAULT_REPLICAS)
    window = float(config.get('window', HIST_DEFAULT_WINDOW))
    logger.info(f"Computing overlaps of {replicas} draws of {spec.short_name} inside |z| < {window}")

    results = ctx.runner.map_replicas(lambda rng: _replica_overlaps(spec, rng), replicas)
    rows = []
    skipped = 0
    for replica, result in enumerate(results):
        if result is None:
            skipped += spec.n
            continue
        values, diagonal = result
        inside = np.abs(values) < window
        for z, o in zip(values[inside], diagonal[inside]):
            rows.append((replica, z.real, z.imag, o / spec.n))
    if not rows:
        raise EmptyInputError(f"No eigenvalues inside |z| < {window}")

    table = pd.DataFrame(rows, columns=['replica', 're', 'im', 'o_scaled'])
    scaled = table['o_scaled'].to_numpy()
    summary: Dict[str, Any] = {
        'schema': SCHEMA_VERSION,
        'ensemble': spec.to_dict(),
        'replicas': replicas,
        'window': window,
        'count': len(table),
        'skipped': skipped,
        'median': float(np.median(scaled)),
        'limit_median': inv_gamma2_median(),
        'statistics': describe_sample(scaled),
    }
    if spec.kind == EnsembleKind.TRUNCATED_UNITARY:
        summary['ks'] = None
    else:
        if spec.kind == EnsembleKind.GINIBRE:
            # Ginibre bulk overlaps scale with 1 - |z|^2
            radius_sq = table['re'].to_numpy() ** 2 + table['im'].to_numpy() ** 2
            bulk = radius_sq < 1.0
            scaled = scaled[bulk] / (1.0 - radius_sq[bulk])
        summary['ks'] = ks_one_sample(scaled, inv_gamma2_cdf, config.alpha).to_dict()
    return table, summary


def cmd_sample(config: ExperimentConfig) -> List[Path]:
    out = Path(config.out)
    return [write_table(sample_table(config), out / SAMPLES_FILE)]


def cmd_overlap_hist(config: ExperimentConfig) -> Tuple[List[Path], Dict[str, Any]]:
    table, summary = overlap_histogram(config)
    out = Path(config.out)
    paths = [write_table(table, out / OVERLAPS_FILE), write_json(summary, out / OVERLAPS_SUMMARY_FILE)]
    return paths, summary


def cmd_verify(config: ExperimentConfig) -> Tuple[ExperimentReport, List[Path]]:
    report = run_experiment(config)
    return report, report.write(config.out, config.format)
