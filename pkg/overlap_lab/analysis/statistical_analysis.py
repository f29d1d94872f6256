"""
Statistical Analysis and Verdicts

This module provides the statistics the verification suites are judged by:
- Streaming moments with parallel (Chan/Welford) merging, real or complex
- Empirical CDFs
- One- and two-sample Kolmogorov-Smirnov tests (scipy statistics, asymptotic critical values)
- Descriptive sample summaries
"""

import logging
import math
from typing import Any, Callable, Dict, Iterable, List, Optional, Tuple, Union

import numpy as np
from scipy import stats

from ..errors import EmptyInputError, ParameterError

logger = logging.getLogger(__name__)

DEFAULT_ALPHA = 0.001

Number = Union[float, complex]


class MomentAccumulator:
    """
    Streaming count, mean and sum of squared deviations.

    Complex values keep separate real and imaginary M2 so standard errors
    are componentwise.
    """

    def __init__(self, is_complex: bool = False, keep_values: bool = False):
        """
        Initialize accumulator.

        Args:
            is_complex: Accept complex observations
            keep_values: Store observations for median/quantile queries
        """
        self._complex = is_complex
        self._count = 0
        self._mean = 0j if is_complex else 0.0
        self._m2 = np.zeros(2)
        self._keep_values = keep_values
        self._chunks: List[np.ndarray] = []

    @property
    def count(self) -> int:
        return self._count

    @property
    def mean(self) -> Number:
        return self._mean

    @property
    def m2(self) -> Number:
        """Sum of squared deviations (componentwise for complex values)."""
        if self._complex:
            return complex(self._m2[0], self._m2[1])
        return float(self._m2[0])

    @property
    def is_complex(self) -> bool:
        return self._complex

    @property
    def keep_values(self) -> bool:
        return self._keep_values

    def _parts(self, values: np.ndarray) -> np.ndarray:
        if self._complex:
            return np.stack([values.real, values.imag])
        if np.iscomplexobj(values):
            raise ParameterError("Complex observation added to a real accumulator")
        return np.stack([values, np.zeros_like(values)])

    def add(self, x: Number):
        """Add one observation (Welford update)."""
        value = np.asarray([x], dtype=np.complex128 if self._complex else None)
        parts = self._parts(value)[:, 0]
        mean_parts = np.array([np.real(self._mean), np.imag(self._mean)])
        self._count += 1
        delta = parts - mean_parts
        mean_parts = mean_parts + delta / self._count
        self._m2 = self._m2 + delta * (parts - mean_parts)
        self._set_mean(mean_parts)
        if self._keep_values:
            self._chunks.append(value)

    def add_many(self, values: Iterable[Number]):
        """Add a batch of observations by merging its exact batch moments."""
        values = np.asarray(values, dtype=np.complex128 if self._complex else None).ravel()
        if values.size == 0:
            return
        batch = MomentAccumulator(self._complex, self._keep_values)
        parts = self._parts(values)
        mean_parts = parts.mean(axis=1)
        batch._count = values.size
        batch._m2 = np.sum((parts - mean_parts[:, None]) ** 2, axis=1)
        batch._set_mean(mean_parts)
        if self._keep_values:
            batch._chunks.append(values.copy())
        self.merge(batch)

    def merge(self, other: 'MomentAccumulator') -> 'MomentAccumulator':
        """
        Fold another accumulator into this one (Chan et al. parallel merge).

        Returns:
            self
        """
        if other._complex != self._complex:
            raise ParameterError("Cannot merge real and complex accumulators")
        if other._count == 0:
            return self
        if self._count == 0:
            self._count = other._count
            self._mean = other._mean
            self._m2 = other._m2.copy()
        else:
            count = self._count + other._count
            a = np.array([np.real(self._mean), np.imag(self._mean)])
            b = np.array([np.real(other._mean), np.imag(other._mean)])
            delta = b - a
            weight = other._count / count
            self._m2 = self._m2 + other._m2 + delta ** 2 * self._count * weight
            self._set_mean(a + delta * weight)
            self._count = count
        if self._keep_values:
            self._chunks.extend(other._chunks)
        return self

    def _set_mean(self, parts: np.ndarray):
        self._mean = complex(parts[0], parts[1]) if self._complex else float(parts[0])

    def variance(self) -> Number:
        """Unbiased sample variance; nan below two observations."""
        if self._count < 2:
            return complex(np.nan, np.nan) if self._complex else float('nan')
        var = self._m2 / (self._count - 1)
        return complex(var[0], var[1]) if self._complex else float(var[0])

    def standard_error(self) -> Number:
        """sqrt(M2 / (count (count - 1))), componentwise for complex values."""
        if self._count < 2:
            return complex(np.nan, np.nan) if self._complex else float('nan')
        se = np.sqrt(self._m2 / (self._count * (self._count - 1)))
        return complex(se[0], se[1]) if self._complex else float(se[0])

    def values(self) -> np.ndarray:
        """Stored observations in insertion order."""
        if not self._keep_values:
            raise ParameterError("Accumulator was created without keep_values")
        if not self._chunks:
            return np.empty(0, dtype=np.complex128 if self._complex else float)
        return np.concatenate(self._chunks)

    def quantile(self, q: float) -> float:
        values = self.values()
        if values.size == 0:
            raise EmptyInputError("No observations stored")
        if self._complex:
            raise ParameterError("Quantiles of complex observations are undefined")
        return float(np.quantile(values, q))

    def median(self) -> float:
        return self.quantile(0.5)

    def copy(self) -> 'MomentAccumulator':
        clone = MomentAccumulator(self._complex, self._keep_values)
        clone.merge(self)
        return clone

    def to_dict(self) -> Dict[str, Any]:
        mean, se = self._mean, self.standard_error()
        if self._complex:
            return {'count': self._count, 'mean_re': mean.real, 'mean_im': mean.imag,
                    'se_re': se.real, 'se_im': se.imag}
        return {'count': self._count, 'mean': mean, 'se': se}

    def __repr__(self) -> str:
        return f"MomentAccumulator(count={self._count}, mean={self._mean})"


def merge_moments(a: MomentAccumulator, b: MomentAccumulator) -> MomentAccumulator:
    """Combined moments of a and b; neither input is modified."""
    return a.copy().merge(b)


class KsVerdict:
    """Outcome of a Kolmogorov-Smirnov test."""

    def __init__(self, statistic: float, n: int, m: Optional[int], alpha: float,
                 critical: float, p_value: float):
        self._statistic = statistic
        self._n = n
        self._m = m
        self._alpha = alpha
        self._critical = critical
        self._p_value = p_value

    @property
    def statistic(self) -> float:
        return self._statistic

    @property
    def n(self) -> int:
        return self._n

    @property
    def m(self) -> Optional[int]:
        """Second sample size (None for one-sample tests)."""
        return self._m

    @property
    def alpha(self) -> float:
        return self._alpha

    @property
    def critical(self) -> float:
        return self._critical

    @property
    def p_value(self) -> float:
        return self._p_value

    @property
    def passed(self) -> bool:
        return self._statistic <= self._critical

    def to_dict(self) -> Dict[str, Any]:
        return {
            'statistic': self._statistic,
            'n': self._n,
            'm': self._m,
            'alpha': self._alpha,
            'critical': self._critical,
            'p_value': self._p_value,
            'passed': self.passed,
        }

    def __repr__(self) -> str:
        verdict = "pass" if self.passed else "fail"
        return f"KsVerdict(D={self._statistic:.5f}, critical={self._critical:.5f}, {verdict})"


def ks_coefficient(alpha: float) -> float:
    """Asymptotic coefficient c(alpha) = sqrt(-ln(alpha/2)/2)."""
    if not 0.0 < alpha < 1.0:
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")
    return math.sqrt(-math.log(alpha / 2.0) / 2.0)


def ks_critical_value(alpha: float, n: int, m: Optional[int] = None) -> float:
    """
    Asymptotic KS critical value.

    Args:
        alpha: Significance level
        n: First sample size
        m: Second sample size for two-sample tests

    Returns:
        c(alpha)/sqrt(n), or c(alpha) sqrt((n+m)/(n m))
    """
    c = ks_coefficient(alpha)
    if m is None:
        return c / math.sqrt(n)
    return c * math.sqrt((n + m) / (n * m))


def ks_noise_scale(n: int) -> float:
    """Standard deviation of a one-sample KS statistic over n draws under the null, kstwobign.std()/sqrt(n)."""
    if int(n) < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    return float(stats.kstwobign.std()) / math.sqrt(int(n))


def _as_sample(samples, name: str) -> np.ndarray:
    values = np.asarray(samples, dtype=float).ravel()
    if values.size == 0:
        raise EmptyInputError(f"{name} is empty")
    if not np.all(np.isfinite(values)):
        raise ParameterError(f"{name} contains non-finite values")
    return values


def ecdf(samples) -> Tuple[np.ndarray, np.ndarray]:
    """
    Empirical CDF.

    Returns:
        (sorted samples, levels i/n for i = 1..n)
    """
    values = np.sort(_as_sample(samples, 'samples'))
    levels = np.arange(1, values.size + 1) / values.size
    return values, levels


def ks_one_sample(samples, cdf: Callable[[np.ndarray], np.ndarray],
                  alpha: float = DEFAULT_ALPHA) -> KsVerdict:
    """
    One-sample KS test of samples against a continuous CDF.

    Args:
        samples: Observations
        cdf: Vectorised CDF
        alpha: Significance level

    Returns:
        KsVerdict
    """
    x = _as_sample(samples, 'samples')
    n = x.size
    result = stats.kstest(x, lambda v: np.clip(np.asarray(cdf(v), dtype=float), 0.0, 1.0))
    return KsVerdict(float(result.statistic), n, None, alpha, ks_critical_value(alpha, n),
                     float(result.pvalue))


def ks_two_sample(a, b, alpha: float = DEFAULT_ALPHA) -> KsVerdict:
    """
    Two-sample KS test.

    Args:
        a: First sample
        b: Second sample
        alpha: Significance level

    Returns:
        KsVerdict
    """
    a = _as_sample(a, 'first sample')
    b = _as_sample(b, 'second sample')
    n, m = a.size, b.size
    result = stats.ks_2samp(a, b)
    return KsVerdict(float(result.statistic), n, m, alpha, ks_critical_value(alpha, n, m),
                     float(result.pvalue))


def describe_sample(values, confidence_level: float = 0.95) -> Dict[str, Any]:
    """
    Descriptive statistics of a real sample.

    Args:
        values: Observations
        confidence_level: Level of the normal confidence interval for the mean

    Returns:
        Dictionary with mean, median, std, percentiles and CI bounds
    """
    values = _as_sample(values, 'values')
    n = values.size
    summary = {
        'n_samples': int(n),
        'mean': float(np.mean(values)),
        'median': float(np.median(values)),
        'std': float(np.std(values, ddof=1)) if n > 1 else 0.0,
        'min': float(np.min(values)),
        'max': float(np.max(values)),
    }
    for p in [1, 5, 25, 75, 95, 99]:
        summary[f'p{p}'] = float(np.percentile(values, p))
    if n > 2:
        summary['skewness'] = float(stats.skew(values))
        summary['kurtosis'] = float(stats.kurtosis(values))

    alpha = 1.0 - confidence_level
    se = summary['std'] / math.sqrt(n)
    # t-distribution for small samples, normal for large
    if n < 30:
        critical = float(stats.t.ppf(1 - alpha / 2, df=max(n - 1, 1)))
    else:
        critical = float(stats.norm.ppf(1 - alpha / 2))
    summary['ci_lower'] = summary['mean'] - critical * se
    summary['ci_upper'] = summary['mean'] + critical * se
    return summary
