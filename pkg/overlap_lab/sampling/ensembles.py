"""
Random Matrix Ensembles

This module provides the direct matrix samplers and the geometry used with them:
- EnsembleSpec for Ginibre CGE(N), spherical Sph(N) and truncated unitary TUE(N, M)
- Haar unitary matrices by QR with R's diagonal phases absorbed
- Kostlan reference radii (independent gamma_V variables)
- Stereographic projection between the plane and the unit sphere
"""

import logging
from enum import Enum
from typing import Optional, Union

import numpy as np

from ..errors import ParameterError, PoleSingularity, SingularMatrix
from ..linalg import qr, solve
from .distributions import ScalarLaw, Size, _check_count, sample_complex_gaussian, sample_gamma_v
from .rng import RngStream

logger = logging.getLogger(__name__)

# Bounded resampling when G2 is numerically singular
SPHERICAL_RETRIES = 3
POLE_MARGIN = 1e-12


class EnsembleKind(Enum):
    """Matrix ensembles."""
    GINIBRE = "cge"
    SPHERICAL = "sph"
    TRUNCATED_UNITARY = "tue"

    @property
    def description(self) -> str:
        """Get human-readable ensemble name."""
        names = {
            EnsembleKind.GINIBRE: 'complex Ginibre',
            EnsembleKind.SPHERICAL: 'spherical',
            EnsembleKind.TRUNCATED_UNITARY: 'truncated unitary',
        }
        return names[self]

    @classmethod
    def from_string(cls, value: str) -> 'EnsembleKind':
        """Create EnsembleKind from string ('cge', 'sph', 'tue' or the long names)."""
        aliases = {
            'ginibre': cls.GINIBRE,
            'spherical': cls.SPHERICAL,
            'truncated_unitary': cls.TRUNCATED_UNITARY,
        }
        key = value.lower().strip()
        try:
            return cls(key)
        except ValueError:
            if key in aliases:
                return aliases[key]
            raise ParameterError(f"Unknown ensemble: {value}")


class EnsembleSpec:
    """
    Ensemble choice with its size parameters.

    Ginibre(n) | Spherical(n) | TruncatedUnitary(n, m) with m >= n.
    """

    def __init__(self, kind: EnsembleKind, n: int, m: Optional[int] = None):
        """
        Initialize ensemble specification.

        Args:
            kind: Ensemble kind
            n: Matrix size (>= 1)
            m: Truncation complement for TUE (>= n); ignored otherwise
        """
        self._kind = kind
        self._n = _check_count('n', n, 1)
        if kind == EnsembleKind.TRUNCATED_UNITARY:
            if m is None:
                raise ParameterError("Truncated unitary ensemble needs m")
            self._m = _check_count('m', m, 1)
            if self._m < self._n:
                raise ParameterError(f"Truncated unitary ensemble needs m >= n, got n={self._n}, m={self._m}")
        else:
            self._m = None

    @classmethod
    def ginibre(cls, n: int) -> 'EnsembleSpec':
        return cls(EnsembleKind.GINIBRE, n)

    @classmethod
    def spherical(cls, n: int) -> 'EnsembleSpec':
        return cls(EnsembleKind.SPHERICAL, n)

    @classmethod
    def truncated_unitary(cls, n: int, m: int) -> 'EnsembleSpec':
        return cls(EnsembleKind.TRUNCATED_UNITARY, n, m)

    @classmethod
    def from_string(cls, tag: str, n: int, m: Optional[int] = None) -> 'EnsembleSpec':
        """Build from a CLI tag ('cge', 'sph', 'tue'); TUE defaults m to n."""
        kind = EnsembleKind.from_string(tag)
        if kind == EnsembleKind.TRUNCATED_UNITARY and m is None:
            m = n
        return cls(kind, n, m)

    @property
    def kind(self) -> EnsembleKind:
        """Get ensemble kind."""
        return self._kind

    @property
    def n(self) -> int:
        """Get matrix size N."""
        return self._n

    @property
    def m(self) -> Optional[int]:
        """Get truncation complement M (TUE only)."""
        return self._m

    @property
    def sign(self) -> int:
        """+1 for spherical (1 + |z|^2 factors), -1 for TUE (1 - |z|^2), 0 for Ginibre."""
        return {EnsembleKind.GINIBRE: 0,
                EnsembleKind.SPHERICAL: 1,
                EnsembleKind.TRUNCATED_UNITARY: -1}[self._kind]

    @property
    def scale(self) -> int:
        """Denominator of the quenched factors: M for TUE, N otherwise."""
        return self._m if self._kind == EnsembleKind.TRUNCATED_UNITARY else self._n

    @property
    def short_name(self) -> str:
        return self._kind.value

    def with_n(self, n: int) -> 'EnsembleSpec':
        """Same ensemble with another N (TUE keeps M, raised to N if needed)."""
        if self._kind == EnsembleKind.TRUNCATED_UNITARY:
            return EnsembleSpec(self._kind, n, max(self._m, n))
        return EnsembleSpec(self._kind, n)

    def to_dict(self) -> dict:
        data = {'ensemble': self.short_name, 'n': self._n}
        if self._m is not None:
            data['m'] = self._m
        return data

    def __eq__(self, other) -> bool:
        if not isinstance(other, EnsembleSpec):
            return NotImplemented
        return (self._kind, self._n, self._m) == (other._kind, other._n, other._m)

    def __hash__(self) -> int:
        return hash((self._kind, self._n, self._m))

    def __repr__(self) -> str:
        if self._m is not None:
            return f"EnsembleSpec({self.short_name}, n={self._n}, m={self._m})"
        return f"EnsembleSpec({self.short_name}, n={self._n})"


def sample_ginibre(n: int, rng: RngStream) -> np.ndarray:
    """
    Complex Ginibre matrix with i.i.d. entries, mean 0 and E|g|^2 = 1/n.

    Args:
        n: Matrix size
        rng: Random stream

    Returns:
        n x n complex matrix
    """
    n = _check_count('n', n, 1)
    return sample_complex_gaussian(rng, (n, n), variance=1.0 / n)


def sample_haar_unitary(n: int, rng: RngStream) -> np.ndarray:
    """
    Haar-distributed unitary matrix.

    QR of a complex Gaussian matrix with R's diagonal made real positive;
    the resulting Q is Haar distributed.

    Args:
        n: Matrix size
        rng: Random stream

    Returns:
        n x n unitary matrix
    """
    n = _check_count('n', n, 1)
    z = sample_complex_gaussian(rng, (n, n))
    q, _ = qr(z)
    return q


def sample_tue(n: int, m: int, rng: RngStream) -> np.ndarray:
    """
    Truncated unitary matrix: top-left n x n block of a Haar unitary of size n + m.

    Only the first n columns of the Haar unitary are built (reduced QR of an
    (n + m) x n Gaussian matrix); they have the same law.

    Args:
        n: Block size (>= 1)
        m: Truncation complement (>= n)
        rng: Random stream

    Returns:
        n x n complex contraction
    """
    spec = EnsembleSpec.truncated_unitary(n, m)
    z = sample_complex_gaussian(rng, (spec.n + spec.m, spec.n))
    columns, _ = qr(z)
    return columns[:spec.n, :].copy()


def sample_spherical(n: int, rng: RngStream) -> np.ndarray:
    """
    Spherical ensemble matrix G1 G2^{-1} for independent Ginibre G1, G2.

    G2^{-1} is applied through an LU solve; a numerically singular G2 is
    resampled up to SPHERICAL_RETRIES times.

    Args:
        n: Matrix size
        rng: Random stream

    Returns:
        n x n complex matrix
    """
    n = _check_count('n', n, 1)
    last_error = None
    for attempt in range(SPHERICAL_RETRIES + 1):
        g1 = sample_ginibre(n, rng)
        g2 = sample_ginibre(n, rng)
        try:
            # X G2 = G1  <=>  G2^T X^T = G1^T
            return solve(g2.T, g1.T).T
        except SingularMatrix as e:
            last_error = e
            logger.warning(f"Singular G2 in spherical draw (attempt {attempt + 1}), resampling")
    raise last_error


def sample_matrix(spec: EnsembleSpec, rng: RngStream) -> np.ndarray:
    """Draw one matrix from the ensemble described by spec."""
    if spec.kind == EnsembleKind.GINIBRE:
        return sample_ginibre(spec.n, rng)
    if spec.kind == EnsembleKind.SPHERICAL:
        return sample_spherical(spec.n, rng)
    return sample_tue(spec.n, spec.m, rng)


def kostlan_radii(spec: EnsembleSpec, conditioned_at_origin: bool, rng: RngStream,
                  size: Size = None) -> np.ndarray:
    """
    Independent reference radii {gamma_V(k)} whose unordered set matches the
    squared eigenvalue moduli.

    Spherical: gamma_V(k) = 1/Beta(N+1-k, k) - 1. TUE: Beta(k, M).
    Ginibre: Gamma(k)/N. Conditioned at the origin, k runs over 2..N instead of 1..N.

    Args:
        spec: Ensemble
        conditioned_at_origin: Drop k = 1 (one eigenvalue pinned at 0)
        rng: Random stream
        size: Number of independent radius sets (None for one)

    Returns:
        Array of shape (K,) or (size, K) with K = N or N - 1
    """
    first = 2 if conditioned_at_origin else 1
    ks = range(first, spec.n + 1)
    shape = None if size is None else (int(size),)
    columns = []
    for k in ks:
        if spec.kind == EnsembleKind.SPHERICAL:
            draws = sample_gamma_v(ScalarLaw.gamma_v_spherical(k, spec.n), rng, shape)
        elif spec.kind == EnsembleKind.TRUNCATED_UNITARY:
            draws = sample_gamma_v(ScalarLaw.gamma_v_tue(k, spec.m), rng, shape)
        else:
            draws = rng.standard_gamma(k, shape) / spec.n
        columns.append(np.asarray(draws, dtype=float))

    if not columns:
        return np.zeros((0,) if size is None else (int(size), 0))
    return np.stack(columns, axis=-1)


class SpherePoint:
    """Point (x, y, z) on the unit sphere."""

    def __init__(self, x: float, y: float, z: float):
        self._coords = np.array([x, y, z], dtype=float)
        if not self.on_sphere():
            raise ParameterError(f"Point ({x}, {y}, {z}) is not on the unit sphere")

    @property
    def x(self) -> float:
        return float(self._coords[0])

    @property
    def y(self) -> float:
        return float(self._coords[1])

    @property
    def z(self) -> float:
        return float(self._coords[2])

    def as_array(self) -> np.ndarray:
        return self._coords.copy()

    def on_sphere(self, tol: float = 1e-12) -> bool:
        return abs(float(np.dot(self._coords, self._coords)) - 1.0) <= tol

    def __repr__(self) -> str:
        return f"SpherePoint({self.x:.6g}, {self.y:.6g}, {self.z:.6g})"


def stereo_project(lam: complex) -> SpherePoint:
    """
    Map a complex number to the unit sphere.

    p(lambda) = (2 Re lambda, 2 Im lambda, |lambda|^2 - 1) / (1 + |lambda|^2);
    0 goes to the south pole and the unit circle to the equator.
    """
    x, y, z = stereo_project_many([complex(lam)])[0]
    return SpherePoint(float(x), float(y), float(z))


def stereo_project_many(values) -> np.ndarray:
    """
    Vectorized stereo_project; returns an array of shape (K, 3).

    Points with |lambda| > 1 are mapped through w = 1/lambda:
    p = (2 conj(w), 1 - |w|^2) / (1 + |w|^2), so |lambda|^2 is never formed.
    """
    lam = np.asarray(values, dtype=np.complex128).reshape(-1)
    outer = np.abs(lam) > 1.0
    w = np.where(outer, 1.0 / np.where(outer, lam, 1.0), lam)
    s = np.abs(w) ** 2
    denom = 1.0 + s
    planar = 2.0 * np.where(outer, np.conj(w), w) / denom
    height = np.where(outer, 1.0 - s, s - 1.0) / denom
    return np.stack([planar.real, planar.imag, height], axis=-1)


def stereo_unproject(w: Union[SpherePoint, np.ndarray]) -> complex:
    """
    Inverse of stereo_project: (x + iy) / (1 - z).

    Raises:
        PoleSingularity: If w is within 1e-12 of the north pole
    """
    coords = w.as_array() if isinstance(w, SpherePoint) else np.asarray(w, dtype=float)
    x, y, z = (float(c) for c in coords)
    if z >= 1.0 - POLE_MARGIN:
        raise PoleSingularity(f"Point with z={z} is at the north pole")
    return complex(x, y) / (1.0 - z)


def chordal_distance_sq(lam: complex, mu: complex) -> float:
    """4 |lambda - mu|^2 / ((1 + |lambda|^2)(1 + |mu|^2)), the squared chordal distance."""
    return 4.0 * abs(lam - mu) ** 2 / ((1.0 + abs(lam) ** 2) * (1.0 + abs(mu) ** 2))
