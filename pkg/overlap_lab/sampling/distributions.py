"""
Scalar and Vector Laws

This module provides samplers and reference distributions for the factor laws:
- X_m (density (m+1)/(1+x)^(m+2) on [0, inf)) and Y_m (Beta(1, m-1))
- gamma_V for the spherical and truncated unitary potentials
- Rotation-invariant vector laws V_p^(n) on C^n and W_p^(n) on the unit ball
- Normalization constants C_{n,p}, D_{n,p} and Monte Carlo integration oracles
"""

import math
from enum import Enum
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np
from scipy import stats
from scipy.special import gammaln

from ..errors import ParameterError
from .rng import RngStream

Size = Optional[Union[int, Tuple[int, ...]]]

# Chunk length for the Monte Carlo integration oracles
_MC_CHUNK = 200_000


class LawKind(Enum):
    """Tags of the scalar laws."""
    XM = "xm"
    YM = "ym"
    GAMMA_V_SPHERICAL = "gamma_v_spherical"
    GAMMA_V_TUE = "gamma_v_tue"
    BETA = "beta"
    GAMMA = "gamma"
    COMPLEX_GAUSSIAN = "complex_gaussian"

    @classmethod
    def from_string(cls, value: str) -> 'LawKind':
        """Create LawKind from string."""
        try:
            return cls(value.lower())
        except ValueError:
            raise ParameterError(f"Unknown scalar law: {value}")


def _check_count(name: str, value: Any, minimum: int) -> int:
    """Validate an integer parameter with a lower bound."""
    if isinstance(value, bool) or int(value) != value:
        raise ParameterError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise ParameterError(f"{name} must be >= {minimum}, got {value}")
    return value


class ScalarLaw:
    """
    Tagged scalar law with validated parameters.

    Use the named constructors (ScalarLaw.x_m(10), ScalarLaw.gamma_v_tue(3, 5), ...)
    rather than the raw initializer.
    """

    def __init__(self, kind: LawKind, params: Dict[str, float]):
        """
        Initialize scalar law.

        Args:
            kind: Law tag
            params: Law parameters (validated per tag)
        """
        self._kind = kind
        self._params = dict(params)
        self._validate()

    def _validate(self):
        p = self._params
        if self._kind == LawKind.XM:
            _check_count('m', p['m'], 1)
        elif self._kind == LawKind.YM:
            _check_count('m', p['m'], 2)
        elif self._kind == LawKind.GAMMA_V_SPHERICAL:
            n = _check_count('n', p['n'], 1)
            alpha = _check_count('alpha', p['alpha'], 1)
            if alpha > n:
                raise ParameterError(f"alpha must be <= n for the spherical gamma_V, got alpha={alpha}, n={n}")
        elif self._kind == LawKind.GAMMA_V_TUE:
            _check_count('alpha', p['alpha'], 1)
            _check_count('m', p['m'], 1)
        elif self._kind == LawKind.BETA:
            if not (p['a'] > 0 and p['b'] > 0):
                raise ParameterError(f"Beta parameters must be positive, got a={p['a']}, b={p['b']}")
        elif self._kind == LawKind.GAMMA:
            if not p['k'] > 0:
                raise ParameterError(f"Gamma shape must be positive, got {p['k']}")
        elif self._kind == LawKind.COMPLEX_GAUSSIAN:
            if not p['variance'] > 0:
                raise ParameterError(f"Variance must be positive, got {p['variance']}")

    @classmethod
    def x_m(cls, m: int) -> 'ScalarLaw':
        return cls(LawKind.XM, {'m': m})

    @classmethod
    def y_m(cls, m: int) -> 'ScalarLaw':
        return cls(LawKind.YM, {'m': m})

    @classmethod
    def gamma_v_spherical(cls, alpha: int, n: int) -> 'ScalarLaw':
        return cls(LawKind.GAMMA_V_SPHERICAL, {'alpha': alpha, 'n': n})

    @classmethod
    def gamma_v_tue(cls, alpha: int, m: int) -> 'ScalarLaw':
        return cls(LawKind.GAMMA_V_TUE, {'alpha': alpha, 'm': m})

    @classmethod
    def beta(cls, a: float, b: float) -> 'ScalarLaw':
        return cls(LawKind.BETA, {'a': a, 'b': b})

    @classmethod
    def gamma(cls, k: float) -> 'ScalarLaw':
        return cls(LawKind.GAMMA, {'k': k})

    @classmethod
    def complex_gaussian(cls, variance: float = 1.0) -> 'ScalarLaw':
        return cls(LawKind.COMPLEX_GAUSSIAN, {'variance': variance})

    @property
    def kind(self) -> LawKind:
        """Get law tag."""
        return self._kind

    @property
    def params(self) -> Dict[str, float]:
        """Get law parameters (copy)."""
        return dict(self._params)

    def frozen(self):
        """
        Matching scipy.stats frozen distribution.

        Returns:
            Frozen continuous distribution (for the complex Gaussian: the
            exponential law of its squared modulus)
        """
        p = self._params
        if self._kind == LawKind.XM:
            return stats.betaprime(1, p['m'] + 1)
        if self._kind == LawKind.YM:
            return stats.beta(1, p['m'] - 1)
        if self._kind == LawKind.GAMMA_V_SPHERICAL:
            return stats.betaprime(p['alpha'], p['n'] + 1 - p['alpha'])
        if self._kind == LawKind.GAMMA_V_TUE:
            return stats.beta(p['alpha'], p['m'])
        if self._kind == LawKind.BETA:
            return stats.beta(p['a'], p['b'])
        if self._kind == LawKind.GAMMA:
            return stats.gamma(p['k'])
        return stats.expon(scale=p['variance'])

    def cdf(self, x):
        return self.frozen().cdf(x)

    def mean(self) -> float:
        """Mean of the law (complex Gaussian: 0)."""
        if self._kind == LawKind.COMPLEX_GAUSSIAN:
            return 0.0
        return float(self.frozen().mean())

    def __repr__(self) -> str:
        args = ', '.join(f"{k}={v}" for k, v in self._params.items())
        return f"ScalarLaw({self._kind.value}, {args})"


def _nonzero_gamma(shape: float, rng: RngStream, size: Size) -> np.ndarray:
    """Gamma(shape) draws with exact zeros (underflow) re-drawn."""
    g = np.asarray(rng.standard_gamma(shape, size), dtype=float)
    zeros = g == 0.0
    while np.any(zeros):
        g[zeros] = rng.standard_gamma(shape, int(np.count_nonzero(zeros)))
        zeros = g == 0.0
    return g


def _unwrap(values: np.ndarray, size: Size):
    """Return a Python float when no size was requested."""
    if size is None:
        return float(values)
    return values


def sample_beta(a: float, b: float, rng: RngStream, size: Size = None):
    """
    Beta(a, b) draws as a gamma ratio g_a / (g_a + g_b).

    Args:
        a: First shape parameter (> 0)
        b: Second shape parameter (> 0)
        rng: Random stream
        size: Output shape (None for a scalar)

    Returns:
        Draw(s) in (0, 1)
    """
    if not (a > 0 and b > 0):
        raise ParameterError(f"Beta parameters must be positive, got a={a}, b={b}")
    ga = _nonzero_gamma(a, rng, size)
    gb = _nonzero_gamma(b, rng, size)
    return _unwrap(ga / (ga + gb), size)


def _beta_prime(a: float, b: float, rng: RngStream, size: Size) -> np.ndarray:
    """BetaPrime(a, b) draws as g_a / g_b (same law as B/(1-B), B ~ Beta(a, b))."""
    return _nonzero_gamma(a, rng, size) / _nonzero_gamma(b, rng, size)


def sample_x(m: int, rng: RngStream, size: Size = None):
    """
    Draw from X_m by inverse CDF: x = u^(-1/(m+1)) - 1, u uniform on (0, 1].

    Args:
        m: Law index (>= 1)
        rng: Random stream
        size: Output shape (None for a scalar)

    Returns:
        Draw(s) >= 0 with mean 1/m
    """
    m = _check_count('m', m, 1)
    u = rng.uniform_open_closed(size)
    return _unwrap(np.power(u, -1.0 / (m + 1)) - 1.0, size)


def sample_y(m: int, rng: RngStream, size: Size = None):
    """
    Draw from Y_m = Beta(1, m-1) by inverse CDF: y = 1 - u^(1/(m-1)).

    Args:
        m: Law index (>= 2)
        rng: Random stream
        size: Output shape (None for a scalar)

    Returns:
        Draw(s) in [0, 1) with mean 1/m
    """
    m = _check_count('m', m, 2)
    u = rng.uniform_open_closed(size)
    return _unwrap(1.0 - np.power(u, 1.0 / (m - 1)), size)


def sample_gamma_v(law: ScalarLaw, rng: RngStream, size: Size = None):
    """
    Draw gamma_V(alpha) for the spherical or truncated unitary potential.

    Spherical: 1/b - 1 with b ~ Beta(N+1-alpha, alpha), drawn as the gamma
    ratio g_alpha / g_(N+1-alpha). Truncated unitary: Beta(alpha, M).

    Args:
        law: GAMMA_V_SPHERICAL or GAMMA_V_TUE law
        rng: Random stream
        size: Output shape (None for a scalar)

    Returns:
        Draw(s): positive (spherical) or in (0, 1) (truncated unitary)
    """
    p = law.params
    if law.kind == LawKind.GAMMA_V_SPHERICAL:
        values = _beta_prime(p['alpha'], p['n'] + 1 - p['alpha'], rng, size)
        return _unwrap(values, size)
    if law.kind == LawKind.GAMMA_V_TUE:
        return sample_beta(p['alpha'], p['m'], rng, size)
    raise ParameterError(f"sample_gamma_v needs a gamma_V law, got {law}")


def sample_complex_gaussian(rng: RngStream, shape: Size = None, variance: float = 1.0):
    """Complex Gaussian draws with E|z|^2 = variance (independent real and imaginary parts)."""
    scale = math.sqrt(variance / 2.0)
    z = scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    if shape is None:
        return complex(z)
    return z


def sample_scalar(law: ScalarLaw, rng: RngStream, size: Size = None):
    """Draw from any scalar law."""
    p = law.params
    if law.kind == LawKind.XM:
        return sample_x(p['m'], rng, size)
    if law.kind == LawKind.YM:
        return sample_y(p['m'], rng, size)
    if law.kind in (LawKind.GAMMA_V_SPHERICAL, LawKind.GAMMA_V_TUE):
        return sample_gamma_v(law, rng, size)
    if law.kind == LawKind.BETA:
        return sample_beta(p['a'], p['b'], rng, size)
    if law.kind == LawKind.GAMMA:
        return _unwrap(_nonzero_gamma(p['k'], rng, size), size)
    return sample_complex_gaussian(rng, size, p['variance'])


def _uniform_directions(n: int, rng: RngStream, size: Size) -> np.ndarray:
    """Uniform points on the complex unit sphere of C^n (normalized Gaussians)."""
    shape = (n,) if size is None else tuple(np.atleast_1d(size)) + (n,)
    z = sample_complex_gaussian(rng, shape)
    norms = np.linalg.norm(z, axis=-1, keepdims=True)
    while np.any(norms == 0.0):
        bad = norms[..., 0] == 0.0
        z[bad] = sample_complex_gaussian(rng, (int(np.count_nonzero(bad)), n))
        norms = np.linalg.norm(z, axis=-1, keepdims=True)
    return z / norms


def sample_v(n: int, p: int, rng: RngStream, size: Size = None) -> np.ndarray:
    """
    Draw from V_p^(n), density proportional to (1 + |v|^2)^(-p) on C^n.

    The squared norm is BetaPrime(n, p-n) and the direction is uniform.

    Args:
        n: Dimension (>= 1)
        p: Exponent (> n + 1)
        rng: Random stream
        size: Number of vectors (None for one vector)

    Returns:
        Complex array of shape (n,) or (size, n)
    """
    n = _check_count('n', n, 1)
    p = _check_count('p', p, 1)
    if p <= n + 1:
        raise ParameterError(f"V_p^(n) needs p > n + 1, got n={n}, p={p}")
    radius_sq = _beta_prime(n, p - n, rng, size)
    directions = _uniform_directions(n, rng, size)
    return np.sqrt(np.asarray(radius_sq))[..., None] * directions


def sample_w(n: int, p: int, rng: RngStream, size: Size = None) -> np.ndarray:
    """
    Draw from W_p^(n), density proportional to (1 - |w|^2)^p on the unit ball of C^n.

    The squared norm is Beta(n, p+1) and the direction is uniform.

    Args:
        n: Dimension (>= 1)
        p: Exponent (>= 0)
        rng: Random stream
        size: Number of vectors (None for one vector)

    Returns:
        Complex array of shape (n,) or (size, n), every norm < 1
    """
    n = _check_count('n', n, 1)
    p = _check_count('p', p, 0)
    radius_sq = np.asarray(sample_beta(n, p + 1, rng, size))
    directions = _uniform_directions(n, rng, size)
    return np.sqrt(np.asarray(radius_sq))[..., None] * directions


def log_constant_c(n: int, p: int) -> float:
    """log C_{n,p} = n log(pi) + log((p-n-1)!) - log((p-1)!)."""
    n = _check_count('n', n, 1)
    p = _check_count('p', p, 1)
    if p <= n:
        raise ParameterError(f"C_(n,p) needs p > n, got n={n}, p={p}")
    return n * math.log(math.pi) + float(gammaln(p - n)) - float(gammaln(p))


def constant_c(n: int, p: int) -> float:
    """
    Normalization C_{n,p} = integral over C^n of (1 + |z|^2)^(-p) = pi^n (p-n-1)! / (p-1)!.

    Args:
        n: Dimension (>= 1)
        p: Exponent (> n)

    Returns:
        C_{n,p}
    """
    return math.exp(log_constant_c(n, p))


def log_constant_d(n: int, p: int) -> float:
    """log D_{n,p} = n log(pi) + log(p!) - log((p+n)!)."""
    n = _check_count('n', n, 1)
    p = _check_count('p', p, 0)
    return n * math.log(math.pi) + float(gammaln(p + 1)) - float(gammaln(p + n + 1))


def constant_d(n: int, p: int) -> float:
    """
    Normalization D_{n,p} = integral over the unit ball of C^n of (1 - |z|^2)^p = pi^n p! / (p+n)!.

    Args:
        n: Dimension (>= 1)
        p: Exponent (>= 0)

    Returns:
        D_{n,p}
    """
    return math.exp(log_constant_d(n, p))


def constant_c1(n: int, p: int) -> float:
    """Integral of |z_1|^2 (1 + |z|^2)^(-p) over C^n: C_{n,p} / (p-n-1), needs p > n + 1."""
    if p <= n + 1:
        raise ParameterError(f"C^(1)_(n,p) needs p > n + 1, got n={n}, p={p}")
    return constant_c(n, p) / (p - n - 1)


def constant_d1(n: int, p: int) -> float:
    """Integral of |z_1|^2 (1 - |z|^2)^p over the unit ball of C^n: D_{n,p} / (p+n+1)."""
    return constant_d(n, p) / (p + n + 1)


def _ball_integral_mc(n: int, q: int, rng: RngStream, samples: int) -> Tuple[float, float]:
    """Hit-or-miss estimate of the integral of (1 - |w|^2)^q over the unit ball of C^n."""
    samples = _check_count('samples', samples, 2)
    volume = 4.0 ** n
    total = 0.0
    total_sq = 0.0
    remaining = samples
    while remaining > 0:
        chunk = min(remaining, _MC_CHUNK)
        points = 2.0 * rng.generator.random((chunk, 2 * n)) - 1.0
        radius_sq = np.sum(points ** 2, axis=1)
        values = np.where(radius_sq < 1.0, np.power(np.clip(1.0 - radius_sq, 0.0, None), q), 0.0)
        total += float(np.sum(values))
        total_sq += float(np.sum(values ** 2))
        remaining -= chunk
    mean = total / samples
    var = max(total_sq / samples - mean ** 2, 0.0) * samples / (samples - 1)
    return volume * mean, volume * math.sqrt(var / samples)


def integrate_c_mc(n: int, p: int, rng: RngStream, samples: int = 1_000_000) -> Tuple[float, float]:
    """
    Monte Carlo estimate of C_{n,p}.

    The substitution z = w / sqrt(1 - |w|^2) maps the unit ball onto C^n and
    turns (1 + |z|^2)^(-p) dm(z) into (1 - |w|^2)^(p-n-1) dm(w).

    Args:
        n: Dimension (>= 1)
        p: Exponent (> n)
        rng: Random stream
        samples: Number of uniform points in the bounding cube

    Returns:
        Tuple (estimate, standard error)
    """
    n = _check_count('n', n, 1)
    p = _check_count('p', p, 1)
    if p <= n:
        raise ParameterError(f"C_(n,p) needs p > n, got n={n}, p={p}")
    return _ball_integral_mc(n, p - n - 1, rng, samples)


def integrate_d_mc(n: int, p: int, rng: RngStream, samples: int = 1_000_000) -> Tuple[float, float]:
    """Monte Carlo estimate of D_{n,p} over the unit ball; returns (estimate, standard error)."""
    n = _check_count('n', n, 1)
    p = _check_count('p', p, 0)
    return _ball_integral_mc(n, p, rng, samples)
