"""
Closed-Form Quenched Expectations

This module provides the closed-form evaluators the Monte Carlo suites test against:
- Quenched expectations of O_11, O_12 and (1/N) tr G G* given the spectrum
- The inverse-gamma_2 limit law (CDF, density, quantiles)
- Exact origin-conditioned factor moments in rationals
- The radius-band invariance probe over sampled spectra
"""

import logging
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Sequence, Union

import numpy as np
from scipy.optimize import brentq

from ..errors import DegenerateSpectrum, EmptyInputError, NonPositiveArgument, ParameterError
from ..linalg import Spectrum
from ..sampling.ensembles import EnsembleKind, EnsembleSpec

logger = logging.getLogger(__name__)

COLLISION_TOL = 1e-14
LOG_SPACE_TERMS = 64
LOG_SPACE_FACTOR = 1e8

SpectrumLike = Union[Spectrum, np.ndarray, Sequence[complex]]


class QuantityKind(Enum):
    """Quenched quantities with closed forms."""
    OV11 = "ov11"
    OV12 = "ov12"
    MIXED_TRACE = "mixed_trace"

    @classmethod
    def from_string(cls, value: str) -> 'QuantityKind':
        """Create QuantityKind from string."""
        normalized = value.lower().replace('-', '_')
        for kind in cls:
            if kind.value == normalized:
                return kind
        raise ValueError(f"Unknown quantity: {value}")


class QuenchedResult:
    """Value of a quenched formula together with what it was evaluated for."""

    def __init__(self, value: complex, ensemble: EnsembleSpec, quantity: QuantityKind,
                 printed: bool = False):
        self._value = value
        self._ensemble = ensemble
        self._quantity = quantity
        self._printed = printed

    @property
    def value(self) -> complex:
        return self._value

    @property
    def ensemble(self) -> EnsembleSpec:
        return self._ensemble

    @property
    def quantity(self) -> QuantityKind:
        return self._quantity

    @property
    def printed(self) -> bool:
        """True when the value comes from the literal printed variant."""
        return self._printed

    def to_dict(self) -> Dict[str, object]:
        value = complex(self._value)
        return {
            'quantity': self._quantity.value,
            'ensemble': self._ensemble.to_dict(),
            're': value.real,
            'im': value.imag,
            'printed': self._printed,
        }

    def __repr__(self) -> str:
        return f"QuenchedResult({self._quantity.value}, {self._ensemble.short_name}, {self._value})"


def _values_for(spectrum: SpectrumLike, spec: EnsembleSpec) -> np.ndarray:
    values = spectrum.values if isinstance(spectrum, Spectrum) else Spectrum(spectrum).values
    if len(values) != spec.n:
        raise ParameterError(f"Spectrum has {len(values)} values but the ensemble has N={spec.n}")
    return values


def _check_gaps(gaps: np.ndarray, what: str):
    if gaps.size and np.min(gaps) <= COLLISION_TOL:
        raise DegenerateSpectrum(f"{what} collides with another eigenvalue (gap {np.min(gaps):.3e})",
                                 gap=float(np.min(gaps)))


def _product(factors: np.ndarray) -> complex:
    """Product of the factors, accumulated in log space for long or stiff products."""
    factors = np.asarray(factors)
    if factors.size == 0:
        return 1.0
    if factors.size <= LOG_SPACE_TERMS and np.max(np.abs(factors)) <= LOG_SPACE_FACTOR:
        return np.prod(factors)
    if np.any(factors == 0):
        return 0.0 * factors[0]
    magnitude = np.exp(np.sum(np.log(np.abs(factors))))
    if np.iscomplexobj(factors):
        return magnitude * np.exp(1j * np.sum(np.angle(factors)))
    sign = -1.0 if np.count_nonzero(factors < 0) % 2 else 1.0
    return sign * magnitude


def quenched_ov11(spectrum: SpectrumLike, spec: EnsembleSpec) -> float:
    """
    E[O_11 | Lambda] for the conditioned eigenvalue lambda_1 = Lambda[0].

    Args:
        spectrum: Spectrum with the conditioned eigenvalue first
        spec: Ensemble with N = len(Lambda)

    Returns:
        Quenched diagonal overlap (>= 1)
    """
    lam = _values_for(spectrum, spec)
    if len(lam) == 1:
        return 1.0
    gaps = np.abs(lam[0] - lam[1:])
    _check_gaps(gaps, "lambda_1")
    if spec.kind == EnsembleKind.GINIBRE:
        factors = 1.0 + 1.0 / (spec.n * gaps ** 2)
    else:
        sign = spec.sign
        factors = 1.0 + ((1.0 + sign * abs(lam[0]) ** 2) * (1.0 + sign * np.abs(lam[1:]) ** 2)
                         / (spec.scale * gaps ** 2))
    return float(_product(factors))


def quenched_ov11_all(spectrum: SpectrumLike, spec: EnsembleSpec) -> np.ndarray:
    """
    quenched_ov11 with each eigenvalue in turn placed first.

    Returns:
        Array of N values; entry i conditions on Lambda[i]
    """
    lam = _values_for(spectrum, spec)
    n = len(lam)
    if n == 1:
        return np.ones(1)
    diff2 = np.abs(lam[:, None] - lam[None, :]) ** 2
    off = ~np.eye(n, dtype=bool)
    _check_gaps(np.sqrt(diff2[off]), "an eigenvalue")
    np.fill_diagonal(diff2, 1.0)
    if spec.kind == EnsembleKind.GINIBRE:
        terms = 1.0 / (spec.n * diff2)
    else:
        weights = 1.0 + spec.sign * np.abs(lam) ** 2
        terms = weights[:, None] * weights[None, :] / (spec.scale * diff2)
    logs = np.where(off, np.log1p(terms), 0.0)
    return np.exp(np.sum(logs, axis=1))


def quenched_ov12(spectrum: SpectrumLike, spec: EnsembleSpec, use_printed: bool = False) -> complex:
    """
    E[O_12 | Lambda] for the ordered pair (Lambda[0], Lambda[1]).

    The default leading factor is -(1 +/- |l_1|^2)(1 +/- |l_2|^2)/(s |l_1-l_2|^2), which is
    what the column-by-column expectation of the recurrence gives; use_printed=True swaps it
    for -1/(s |l_1-l_2|^2). The two agree for Ginibre.

    Args:
        spectrum: Spectrum with the ordered pair first
        spec: Ensemble with N = len(Lambda) >= 2
        use_printed: Evaluate the literal printed leading factor instead

    Returns:
        Complex quenched off-diagonal overlap
    """
    lam = _values_for(spectrum, spec)
    if len(lam) < 2:
        raise ParameterError("O_12 needs at least two eigenvalues")
    l1, l2, rest = lam[0], lam[1], lam[2:]
    _check_gaps(np.array([abs(l1 - l2)]), "lambda_1")
    _check_gaps(np.abs(l1 - rest), "lambda_1")
    _check_gaps(np.abs(l2 - rest), "lambda_2")

    pair_gap2 = abs(l1 - l2) ** 2
    cross = (l1 - rest) * np.conj(l2 - rest)
    scale = spec.scale
    if spec.kind == EnsembleKind.GINIBRE:
        lead = -1.0 / (scale * pair_gap2)
        factors = 1.0 + 1.0 / (scale * cross)
    else:
        sign = spec.sign
        if use_printed:
            lead = -1.0 / (scale * pair_gap2)
        else:
            lead = -(1.0 + sign * abs(l1) ** 2) * (1.0 + sign * abs(l2) ** 2) / (scale * pair_gap2)
        factors = 1.0 + (1.0 + sign * l1 * np.conj(l2)) * (1.0 + sign * np.abs(rest) ** 2) / (scale * cross)
    return complex(lead * _product(factors.astype(np.complex128)))


def quenched_trace(spectrum: SpectrumLike, spec: EnsembleSpec, use_printed_tue: bool = False) -> float:
    """
    E[(1/N) tr G G* | Lambda].

    Args:
        spectrum: Spectrum (order irrelevant)
        spec: Ensemble with N = len(Lambda)
        use_printed_tue: For TUE, evaluate the literal printed product instead of the
            re-derived one; the printed form can be negative

    Returns:
        Quenched mixed trace
    """
    lam = _values_for(spectrum, spec)
    r = np.abs(lam) ** 2
    n = spec.n
    if spec.kind == EnsembleKind.GINIBRE:
        return float(np.mean(r) + (n - 1) / (2.0 * n))
    if spec.kind == EnsembleKind.SPHERICAL:
        return float(_product(1.0 + (1.0 + r) / n) - 2.0)
    m = spec.m
    if use_printed_tue:
        return float(_product(1.0 + (1.0 - r) / m) - (1.0 + n / m))
    return float((m / n) * _product(1.0 - (1.0 - r) / m) - m / n + 1.0)


def evaluate_quenched(quantity: Union[QuantityKind, str], spectrum: SpectrumLike, spec: EnsembleSpec,
                      printed: bool = False) -> QuenchedResult:
    """Evaluate one quenched cell and wrap it in a QuenchedResult."""
    if isinstance(quantity, str):
        quantity = QuantityKind.from_string(quantity)
    if quantity == QuantityKind.OV11:
        value = quenched_ov11(spectrum, spec)
    elif quantity == QuantityKind.OV12:
        value = quenched_ov12(spectrum, spec, use_printed=printed)
    else:
        value = quenched_trace(spectrum, spec, use_printed_tue=printed)
    return QuenchedResult(value, spec, quantity, printed)


# Inverse-gamma_2 law: 1/g with g ~ Gamma(2)

def _check_positive(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise NonPositiveArgument("Inverse-gamma_2 law is supported on x > 0")
    return arr


def inv_gamma2_cdf(x):
    """CDF (1 + 1/x) exp(-1/x); accepts scalars or arrays."""
    arr = _check_positive(x)
    s = 1.0 / arr
    values = (1.0 + s) * np.exp(-s)
    return float(values) if values.ndim == 0 else values


def inv_gamma2_pdf(x):
    """Density x^-3 exp(-1/x)."""
    arr = _check_positive(x)
    s = 1.0 / arr
    values = s ** 3 * np.exp(-s)
    return float(values) if values.ndim == 0 else values


def inv_gamma2_quantile(q: float) -> float:
    """
    Quantile of the inverse-gamma_2 law.

    Solves (1 + s) exp(-s) = q for s = 1/x with brentq.

    Args:
        q: Probability level in (0, 1)

    Returns:
        x with inv_gamma2_cdf(x) = q
    """
    if not 0.0 < q < 1.0:
        raise ParameterError(f"Quantile level must lie in (0, 1), got {q}")
    s = brentq(lambda t: (1.0 + t) * np.exp(-t) - q, 1e-12, 800.0, xtol=1e-15)
    return 1.0 / s


def inv_gamma2_median() -> float:
    return inv_gamma2_quantile(0.5)


# Exact factor moments at the origin

def _inverse_beta_mean(a: int, b: int) -> Fraction:
    """E[1/Beta(a, b)] for a > 1."""
    return Fraction(a + b - 1, a - 1)


def _inverse_beta_second_moment(a: int, b: int) -> Fraction:
    """E[1/Beta(a, b)^2] for a > 2."""
    return Fraction((a + b - 1) * (a + b - 2), (a - 1) * (a - 2))


def _check_factor_index(spec: EnsembleSpec, k: int, minimum: int):
    if k < minimum or k > spec.n:
        raise ParameterError(f"Factor index must satisfy {minimum} <= k <= N={spec.n}, got {k}")


def origin_factor_mean(spec: EnsembleSpec, k: int) -> Fraction:
    """
    Exact mean of the k-th origin factor.

    Spherical: 1 + E[X_N] E[1/Beta(k, N+1-k)]. Truncated unitary: 1 + (E[1/Beta(k, M)] - 1) E[Y_M].
    Ginibre: 1 + E[g_1] E[1/g_k]. All equal k/(k-1).
    """
    _check_factor_index(spec, k, 2)
    if spec.kind == EnsembleKind.SPHERICAL:
        return 1 + Fraction(1, spec.n) * _inverse_beta_mean(k, spec.n + 1 - k)
    if spec.kind == EnsembleKind.TRUNCATED_UNITARY:
        return 1 + (_inverse_beta_mean(k, spec.m) - 1) * Fraction(1, spec.m)
    return 1 + Fraction(1, k - 1)


def origin_factor_second_moment(spec: EnsembleSpec, k: int) -> Fraction:
    """
    Exact second moment of the k-th origin factor; finite only for k >= 3.

    Raises:
        ParameterError: k = 2 (infinite second moment) or k > N
    """
    if k == 2:
        raise ParameterError("The k=2 origin factor has infinite second moment")
    _check_factor_index(spec, k, 3)
    if spec.kind == EnsembleKind.SPHERICAL:
        n = spec.n
        mean_x, second_x = Fraction(1, n), Fraction(2, n * (n - 1))
        return (1 + 2 * mean_x * _inverse_beta_mean(k, n + 1 - k)
                + second_x * _inverse_beta_second_moment(k, n + 1 - k))
    if spec.kind == EnsembleKind.TRUNCATED_UNITARY:
        m = spec.m
        mean_y, second_y = Fraction(1, m), Fraction(2, m * (m + 1))
        inv_mean = _inverse_beta_mean(k, m)
        inv_second = _inverse_beta_second_moment(k, m)
        centred_second = inv_second - 2 * inv_mean + 1
        return 1 + 2 * (inv_mean - 1) * mean_y + centred_second * second_y
    # Gamma(1) second moment is 2; E[1/g_k^2] = 1/((k-1)(k-2))
    return 1 + Fraction(2, k - 1) + Fraction(2, (k - 1) * (k - 2))


def origin_expectation(spec: EnsembleSpec) -> Fraction:
    """Exact E[O_11 | lambda_1 = 0] as the product of the factor means; equals N."""
    total = Fraction(1)
    for k in range(2, spec.n + 1):
        total *= origin_factor_mean(spec, k)
    return total


# Invariance probe

class RadiusBand:
    """Annulus inner <= |z| < outer in the complex plane."""

    def __init__(self, inner: float, outer: float):
        if inner < 0 or outer <= inner:
            raise ParameterError(f"Invalid radius band [{inner}, {outer})")
        self._inner = float(inner)
        self._outer = float(outer)

    @property
    def inner(self) -> float:
        return self._inner

    @property
    def outer(self) -> float:
        return self._outer

    @property
    def label(self) -> str:
        return f"{self._inner:g}<=|z|<{self._outer:g}"

    def contains(self, z):
        """Membership test; vectorised over arrays."""
        radius = np.abs(z)
        return (radius >= self._inner) & (radius < self._outer)

    def __repr__(self) -> str:
        return f"RadiusBand({self._inner}, {self._outer})"


def collect_band_values(spectra: Sequence[SpectrumLike], bands: Sequence[RadiusBand],
                        spec: EnsembleSpec) -> List[np.ndarray]:
    """
    Quenched O_11 values for every eigenvalue falling in each band.

    Spectra with an eigenvalue collision are skipped with a warning.

    Returns:
        One array per band, in band order
    """
    collected: List[List[np.ndarray]] = [[] for _ in bands]
    skipped = 0
    for spectrum in spectra:
        lam = _values_for(spectrum, spec)
        try:
            values = quenched_ov11_all(lam, spec)
        except DegenerateSpectrum:
            skipped += 1
            continue
        for i, band in enumerate(bands):
            mask = band.contains(lam)
            if np.any(mask):
                collected[i].append(values[mask])
    if skipped:
        logger.warning(f"Skipped {skipped} spectra with colliding eigenvalues")
    return [np.concatenate(parts) if parts else np.empty(0) for parts in collected]


def quenched_invariance_probe(spectra: Sequence[SpectrumLike], bands: Sequence[RadiusBand],
                              spec: EnsembleSpec) -> Dict[str, float]:
    """
    Per-band medians of quenched O_11 over sampled spectra.

    Args:
        spectra: Sampled spectra of the ensemble
        bands: Radius bands to compare
        spec: Ensemble the spectra were drawn from

    Returns:
        Mapping band label -> median

    Raises:
        EmptyInputError: A band received no eigenvalues
    """
    medians: Dict[str, float] = {}
    for band, values in zip(bands, collect_band_values(spectra, bands, spec)):
        if values.size == 0:
            raise EmptyInputError(f"No eigenvalues fell in band {band.label}")
        medians[band.label] = float(np.median(values))
        logger.debug(f"Band {band.label}: {values.size} values, median {medians[band.label]:.6g}")
    return medians
