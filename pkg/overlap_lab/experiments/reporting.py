"""
Experiment Reports and Output Files

This module provides the result containers and writers:
- TestRecord for a single check (mean, ks, residual, exact, discrepancy)
- ExperimentReport with a versioned, deterministic JSON form
- CSV tables through pandas
"""

import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
import pandas as pd

from ..errors import EXIT_PASS, EXIT_STATISTICAL_FAILURE, ParameterError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

RECORD_KINDS = ('mean', 'ks', 'residual', 'exact', 'discrepancy')


def to_jsonable(value: Any) -> Any:
    """Convert numpy scalars, complex numbers and non-finite floats to JSON-safe values."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {'re': to_jsonable(float(value.real)), 'im': to_jsonable(float(value.imag))}
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def dumps(data: Dict[str, Any]) -> str:
    """Deterministic JSON text: sorted keys, repr floats, trailing newline."""
    return json.dumps(to_jsonable(data), sort_keys=True, indent=2, allow_nan=False) + '\n'


class TestRecord:
    """Outcome of one check inside an experiment."""

    # Not a pytest test class
    __test__ = False

    def __init__(self, name: str, kind: str, estimate: Any = None,
                 standard_error: Any = None, reference: Any = None,
                 statistic: Optional[float] = None, threshold: Optional[float] = None,
                 passed: bool = True, flagged: bool = False,
                 details: Optional[Dict[str, Any]] = None):
        """
        Initialize test record.

        Args:
            name: Check name, unique within the experiment
            kind: One of 'mean', 'ks', 'residual', 'exact', 'discrepancy'
            estimate: Measured value
            standard_error: Standard error of the estimate (Monte Carlo checks)
            reference: Value the estimate is compared with
            statistic: Test statistic (KS D, deviation in SE, residual)
            threshold: Pass threshold for the statistic
            passed: Verdict; ignored for the run verdict when kind is 'discrepancy'
            flagged: Set when a discrepancy is large enough to report
            details: Extra JSON-serializable information
        """
        if kind not in RECORD_KINDS:
            raise ParameterError(f"Unknown record kind: {kind}")
        self.name = name
        self.kind = kind
        self.estimate = estimate
        self.standard_error = standard_error
        self.reference = reference
        self.statistic = statistic
        self.threshold = threshold
        self.passed = bool(passed)
        self.flagged = bool(flagged)
        self.details = details or {}

    @property
    def counts_toward_verdict(self) -> bool:
        return self.kind != 'discrepancy'

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'kind': self.kind,
            'estimate': self.estimate,
            'standard_error': self.standard_error,
            'reference': self.reference,
            'statistic': self.statistic,
            'threshold': self.threshold,
            'passed': self.passed,
            'flagged': self.flagged,
            'details': self.details,
        }

    def __repr__(self) -> str:
        verdict = "pass" if self.passed else "FAIL"
        flag = " flagged" if self.flagged else ""
        return f"TestRecord({self.name}, {self.kind}, {verdict}{flag})"


class ExperimentReport:
    """Versioned report of one verification experiment."""

    def __init__(self, experiment: str, config: Dict[str, Any], tests: Optional[List[TestRecord]] = None):
        self._experiment = experiment
        self._config = dict(config)
        self._tests: List[TestRecord] = list(tests or [])

    @property
    def experiment(self) -> str:
        return self._experiment

    @property
    def config(self) -> Dict[str, Any]:
        return dict(self._config)

    @property
    def tests(self) -> List[TestRecord]:
        return list(self._tests)

    def add(self, record: TestRecord):
        self._tests.append(record)

    def extend(self, records: List[TestRecord]):
        self._tests.extend(records)

    @property
    def passed(self) -> bool:
        """True when every non-discrepancy record passed."""
        return all(t.passed for t in self._tests if t.counts_toward_verdict)

    def failures(self) -> List[TestRecord]:
        return [t for t in self._tests if t.counts_toward_verdict and not t.passed]

    def flagged(self) -> List[TestRecord]:
        return [t for t in self._tests if t.flagged]

    def exit_code(self) -> int:
        return EXIT_PASS if self.passed else EXIT_STATISTICAL_FAILURE

    def to_dict(self) -> Dict[str, Any]:
        return {
            'schema': SCHEMA_VERSION,
            'experiment': self._experiment,
            'config': self._config,
            'tests': [t.to_dict() for t in self._tests],
            'passed': self.passed,
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())

    def to_frame(self) -> pd.DataFrame:
        """One row per record; complex values split into _re/_im columns."""
        rows = []
        for t in self._tests:
            row: Dict[str, Any] = {'experiment': self._experiment, 'name': t.name, 'kind': t.kind}
            for key in ('estimate', 'standard_error', 'reference'):
                value = getattr(t, key)
                if isinstance(value, (complex, np.complexfloating)):
                    row[f'{key}_re'], row[f'{key}_im'] = float(value.real), float(value.imag)
                else:
                    row[f'{key}_re'] = None if value is None else float(value)
                    row[f'{key}_im'] = None
            row.update({'statistic': t.statistic, 'threshold': t.threshold,
                        'passed': t.passed, 'flagged': t.flagged})
            rows.append(row)
        columns = ['experiment', 'name', 'kind', 'estimate_re', 'estimate_im', 'standard_error_re',
                   'standard_error_im', 'reference_re', 'reference_im', 'statistic', 'threshold',
                   'passed', 'flagged']
        return pd.DataFrame(rows, columns=columns)

    def write(self, out_dir: Union[str, Path], fmt: str = 'json') -> List[Path]:
        """
        Write report_<experiment>.json (always) and report_<experiment>.csv (fmt == 'csv').

        Returns:
            Paths written
        """
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        stem = f"report_{self._experiment}"
        written = [write_json(self.to_dict(), out / f"{stem}.json")]
        if fmt == 'csv':
            written.append(write_table(self.to_frame(), out / f"{stem}.csv"))
        return written


def write_json(data: Dict[str, Any], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='\n') as f:
        f.write(dumps(data))
    logger.debug(f"Wrote {path}")
    return path


def write_table(frame: Union[pd.DataFrame, Dict[str, Any]], path: Union[str, Path]) -> Path:
    """CSV with header, '.' decimal and '\\n' line endings, floats at full precision."""
    if not isinstance(frame, pd.DataFrame):
        frame = pd.DataFrame(frame)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, lineterminator='\n', float_format='%.17g')
    logger.debug(f"Wrote {len(frame)} rows to {path}")
    return path
