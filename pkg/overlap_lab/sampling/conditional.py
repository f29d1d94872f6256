"""
Conditional Schur Sampling

This module samples quantities conditionally on a prescribed spectrum:
- Triangular Schur factors T with diag(T) = Lambda, built column by column
- Diagonal overlaps as products of independent factors
- Origin-conditioned scaled overlaps O_11 / N and their individual factors
"""

import logging
from typing import Union

import numpy as np

from ..errors import DegenerateSpectrum, NotPositiveDefinite, ParameterError
from ..linalg import Spectrum, cholesky
from .distributions import Size, _check_count, sample_beta, sample_v, sample_w, sample_x, sample_y
from .ensembles import EnsembleKind, EnsembleSpec
from .rng import RngStream

logger = logging.getLogger(__name__)

DECOMPOSITION_GAP_TOL = 1e-14


def _as_spectrum(spectrum: Union[Spectrum, np.ndarray, list]) -> Spectrum:
    return spectrum if isinstance(spectrum, Spectrum) else Spectrum(spectrum)


def _check_spectrum_for(spectrum: Spectrum, spec: EnsembleSpec):
    """The spectrum must have spec.n values; TUE spectra must lie in the open unit disk."""
    if spectrum.n != spec.n:
        raise ParameterError(f"Spectrum has {spectrum.n} values but the ensemble has N={spec.n}")
    if spec.kind == EnsembleKind.TRUNCATED_UNITARY and np.any(np.abs(spectrum.values) >= 1.0):
        raise ParameterError("Truncated unitary spectra must lie in the open unit disk")


class ConditionalSchurDraw:
    """Upper-triangular Schur factor drawn conditionally on its diagonal."""

    def __init__(self, t: np.ndarray, ensemble: EnsembleSpec):
        """
        Initialize conditional draw.

        Args:
            t: Upper-triangular N x N matrix
            ensemble: Ensemble the draw belongs to
        """
        self._t = t
        self._ensemble = ensemble

    @property
    def t(self) -> np.ndarray:
        """Get triangular factor."""
        return self._t

    @property
    def ensemble(self) -> EnsembleSpec:
        """Get ensemble."""
        return self._ensemble

    @property
    def spectrum(self) -> Spectrum:
        return Spectrum(np.diag(self._t))

    def is_contraction(self) -> bool:
        """True when I - T T* is positive definite (spectral norm below 1)."""
        n = self._t.shape[0]
        try:
            cholesky(np.eye(n) - self._t @ self._t.conj().T)
        except NotPositiveDefinite:
            return False
        return True


def conditional_schur_batch(spectrum: Union[Spectrum, np.ndarray, list], spec: EnsembleSpec,
                            rng: RngStream, size: int) -> np.ndarray:
    """
    Draw `size` triangular Schur factors with prescribed diagonal.

    Column n (n = 2..N) above the diagonal is u_n = A v where A is the
    Cholesky factor of S^2 = (1 +/- |lambda_n|^2)(I +/- T_{n-1} T_{n-1}^*)
    and v ~ V_{N+n}^{(n-1)} (spherical) or W_{M-n}^{(n-1)} (truncated unitary).
    Any factor with A A* = S^2 gives the same law because v is rotation invariant.

    Args:
        spectrum: Prescribed diagonal Lambda (pairwise distinct)
        spec: Spherical or truncated unitary ensemble with N = len(Lambda)
        rng: Random stream
        size: Number of draws

    Returns:
        Array of shape (size, N, N)
    """
    spectrum = _as_spectrum(spectrum)
    if spec.kind == EnsembleKind.GINIBRE:
        raise ParameterError("Conditional Schur sampling covers the spherical and truncated unitary ensembles")
    _check_spectrum_for(spectrum, spec)
    if spectrum.min_gap() <= 0.0:
        raise DegenerateSpectrum("Prescribed spectrum has repeated eigenvalues", gap=0.0)
    size = _check_count('size', size, 1)

    lam = spectrum.values
    n_total = spectrum.n
    sign = spec.sign
    t = np.zeros((size, n_total, n_total), dtype=np.complex128)
    t[:, np.arange(n_total), np.arange(n_total)] = lam

    for n in range(2, n_total + 1):
        k = n - 1
        block = t[:, :k, :k]
        gram = block @ np.conj(np.swapaxes(block, -1, -2))
        s2 = (1.0 + sign * abs(lam[k]) ** 2) * (np.eye(k) + sign * gram)
        factor = cholesky(s2)
        if spec.kind == EnsembleKind.SPHERICAL:
            v = sample_v(k, spec.n + n, rng, size)
        else:
            v = sample_w(k, spec.m - n, rng, size)
        t[:, :k, k] = np.einsum('bij,bj->bi', factor, v)

    return t


def conditional_schur(spectrum: Union[Spectrum, np.ndarray, list], spec: EnsembleSpec,
                      rng: RngStream) -> ConditionalSchurDraw:
    """
    Draw one triangular Schur factor with prescribed diagonal.

    Args:
        spectrum: Prescribed diagonal Lambda, in the order it should appear
        spec: Spherical or truncated unitary ensemble
        rng: Random stream

    Returns:
        ConditionalSchurDraw with diag(t) = Lambda exactly
    """
    t = conditional_schur_batch(spectrum, spec, rng, 1)[0]
    return ConditionalSchurDraw(t, spec)


def decompose_ov11_sample(spectrum: Union[Spectrum, np.ndarray, list], spec: EnsembleSpec,
                          rng: RngStream, size: Size = None):
    """
    Draw O_11 from its product-of-independent-factors representation.

    O_11 = prod_{k>=2} (1 + c_k xi_k) with
    spherical: c_k = (1+|l_1|^2)(1+|l_k|^2)/|l_1-l_k|^2, xi_k ~ X_N;
    truncated unitary: c_k = (1-|l_1|^2)(1-|l_k|^2)/|l_1-l_k|^2, xi_k ~ Y_M;
    Ginibre: c_k = 1/(N |l_1-l_k|^2), xi_k = |Z_k|^2 ~ Exp(1).

    Args:
        spectrum: Spectrum with the conditioned eigenvalue first
        spec: Ensemble with N = len(Lambda)
        rng: Random stream
        size: Number of draws (None for a scalar)

    Returns:
        Draw(s) >= 1
    """
    spectrum = _as_spectrum(spectrum)
    _check_spectrum_for(spectrum, spec)
    n = spectrum.n
    if n == 1:
        return 1.0 if size is None else np.ones(size)

    lam = spectrum.values
    gaps = np.abs(lam[1:] - lam[0])
    if np.min(gaps) <= DECOMPOSITION_GAP_TOL:
        raise DegenerateSpectrum(f"lambda_1 collides with another eigenvalue (gap {np.min(gaps):.3e})",
                                 gap=float(np.min(gaps)))

    shape = (n - 1,) if size is None else (int(size), n - 1)
    r1 = abs(lam[0]) ** 2
    rk = np.abs(lam[1:]) ** 2
    if spec.kind == EnsembleKind.SPHERICAL:
        coeff = (1.0 + r1) * (1.0 + rk) / gaps ** 2
        xi = sample_x(spec.n, rng, shape)
    elif spec.kind == EnsembleKind.TRUNCATED_UNITARY:
        coeff = (1.0 - r1) * (1.0 - rk) / gaps ** 2
        xi = sample_y(spec.m, rng, shape)
    else:
        coeff = 1.0 / (spec.n * gaps ** 2)
        xi = rng.generator.standard_exponential(shape)

    values = np.exp(np.sum(np.log1p(coeff * xi), axis=-1))
    if size is None:
        return float(values)
    return values


def origin_factor_sample(spec: EnsembleSpec, k: int, rng: RngStream, size: Size = None):
    """
    Draw the k-th factor of O_11 conditioned on lambda_1 = 0.

    Spherical: 1 + X_N / Beta(k, N+1-k). Truncated unitary: 1 + (1/Beta(k, M) - 1) Y_M.
    Ginibre: 1 + g_1 / g_k with g_j ~ Gamma(j). Each has mean k/(k-1).

    Args:
        spec: Ensemble
        k: Factor index, 2 <= k <= N
        rng: Random stream
        size: Number of draws (None for a scalar)

    Returns:
        Draw(s) > 1
    """
    k = _check_count('k', k, 2)
    if k > spec.n:
        raise ParameterError(f"Factor index k={k} exceeds N={spec.n}")

    if spec.kind == EnsembleKind.SPHERICAL:
        beta = np.asarray(sample_beta(k, spec.n + 1 - k, rng, size))
        values = 1.0 + np.asarray(sample_x(spec.n, rng, size)) / beta
    elif spec.kind == EnsembleKind.TRUNCATED_UNITARY:
        beta = np.asarray(sample_beta(k, spec.m, rng, size))
        values = 1.0 + (1.0 / beta - 1.0) * np.asarray(sample_y(spec.m, rng, size))
    else:
        values = 1.0 + rng.standard_gamma(1.0, size) / rng.standard_gamma(k, size)

    if size is None:
        return float(values)
    return values


def origin_limit_sample(spec: EnsembleSpec, rng: RngStream, size: Size = None):
    """
    Draw O_11 / N conditioned on lambda_1 = 0.

    The product of the independent factors k = 2..N divided by N; as N grows
    the law approaches the inverse-gamma_2 law.

    Args:
        spec: Ensemble
        rng: Random stream
        size: Number of draws (None for a scalar)

    Returns:
        Draw(s) of the scaled overlap
    """
    shape = () if size is None else (int(size),)
    log_total = np.zeros(shape)
    for k in range(2, spec.n + 1):
        log_total = log_total + np.log(origin_factor_sample(spec, k, rng, None if size is None else shape))
    values = np.exp(log_total) / spec.n
    if size is None:
        return float(values)
    return values
