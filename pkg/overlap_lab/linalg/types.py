"""
Linear Algebra Value Types

This module defines the value types passed between the numerical kernels:
- ComplexMatrix validation (dense complex128 ndarray, finite entries)
- Spectrum (ordered eigenvalue list)
- SchurForm (A = U T U*)
"""

from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import ParameterError

# A ComplexMatrix is a 2-D complex128 ndarray; the alias documents intent in signatures.
ComplexMatrix = np.ndarray


def as_complex_matrix(obj, name: str = 'matrix', square: bool = False) -> ComplexMatrix:
    """
    Validate and convert input to a dense complex matrix.

    Args:
        obj: Array-like input
        name: Name used in error messages
        square: Require a square matrix

    Returns:
        2-D complex128 array (a copy when conversion was needed)
    """
    a = np.asarray(obj, dtype=np.complex128)
    if a.ndim != 2:
        raise ParameterError(f"{name} must be 2-D, got shape {a.shape}")
    if square and a.shape[0] != a.shape[1]:
        raise ParameterError(f"{name} must be square, got shape {a.shape}")
    if a.size == 0:
        raise ParameterError(f"{name} must be non-empty")
    if not np.all(np.isfinite(a)):
        raise ParameterError(f"{name} has non-finite entries")
    return a


class Spectrum:
    """
    Ordered list of complex eigenvalues lambda_1..lambda_N.

    The order is meaningful: quenched formulas and the conditional sampler
    treat values[0] (and values[1] for off-diagonal overlaps) as the
    conditioned eigenvalues.
    """

    def __init__(self, values: Union[Sequence[complex], np.ndarray]):
        """
        Initialize spectrum.

        Args:
            values: Eigenvalues in the order they should be used
        """
        arr = np.array(values, dtype=np.complex128).reshape(-1)
        if arr.size < 1:
            raise ParameterError("Spectrum needs at least one eigenvalue")
        if not np.all(np.isfinite(arr)):
            raise ParameterError("Spectrum has non-finite eigenvalues")
        arr.setflags(write=False)
        self._values = arr

    @property
    def values(self) -> np.ndarray:
        """Get eigenvalues (read-only array)."""
        return self._values

    @property
    def n(self) -> int:
        """Number of eigenvalues."""
        return int(self._values.size)

    def __len__(self) -> int:
        return self.n

    def __iter__(self):
        return iter(self._values)

    def __getitem__(self, index):
        return self._values[index]

    def __repr__(self) -> str:
        return f"Spectrum(n={self.n})"

    def moduli_squared(self) -> np.ndarray:
        """Squared moduli |lambda_k|^2."""
        return np.abs(self._values) ** 2

    def min_gap(self) -> float:
        """Smallest pairwise distance between eigenvalues (inf for N = 1)."""
        if self.n < 2:
            return float('inf')
        diff = np.abs(self._values[:, None] - self._values[None, :])
        diff[np.diag_indices(self.n)] = np.inf
        return float(np.min(diff))

    def gaps_from(self, index: int) -> np.ndarray:
        """Distances |lambda_index - lambda_k| for k != index."""
        others = np.delete(self._values, index)
        return np.abs(others - self._values[index])

    def with_first(self, index: int) -> 'Spectrum':
        """Move eigenvalue `index` to the front, keeping the order of the rest."""
        return self.with_order([index])

    def with_pair(self, i: int, j: int) -> 'Spectrum':
        """Move the ordered pair (i, j) to the front."""
        if i == j:
            raise ParameterError("Pair indices must differ")
        return self.with_order([i, j])

    def with_order(self, leading: Iterable[int]) -> 'Spectrum':
        """Put the listed indices first, in the listed order."""
        leading = [int(k) for k in leading]
        for k in leading:
            if not 0 <= k < self.n:
                raise ParameterError(f"Eigenvalue index {k} out of range for N={self.n}")
        rest = [k for k in range(self.n) if k not in leading]
        return Spectrum(self._values[leading + rest])


class SchurForm:
    """
    Complex Schur decomposition A = U T U*.

    T is upper triangular with exact zeros below the diagonal; the
    eigenvalues are the diagonal of T in the order deflation produced.
    """

    def __init__(self, u: np.ndarray, t: np.ndarray, sweeps: int = 0):
        """
        Initialize Schur form.

        Args:
            u: Unitary factor (N x N)
            t: Upper-triangular factor (N x N)
            sweeps: Number of QR sweeps the decomposition needed
        """
        self._u = u
        self._t = t
        self._sweeps = sweeps
        self._eigenvalues = Spectrum(np.diag(t).copy())

    @property
    def u(self) -> np.ndarray:
        """Get unitary factor."""
        return self._u

    @property
    def t(self) -> np.ndarray:
        """Get triangular factor."""
        return self._t

    @property
    def eigenvalues(self) -> Spectrum:
        """Get eigenvalues in diagonal order."""
        return self._eigenvalues

    @property
    def sweeps(self) -> int:
        """Number of shifted QR sweeps performed."""
        return self._sweeps

    @property
    def n(self) -> int:
        return int(self._t.shape[0])

    def reconstruct(self) -> np.ndarray:
        """Return U T U*."""
        return self._u @ self._t @ self._u.conj().T

    def residuals(self, a: Optional[np.ndarray] = None) -> Tuple[float, float]:
        """
        Compute reconstruction and unitarity residuals.

        Args:
            a: Original matrix; if None only unitarity is meaningful and the
               reconstruction residual is returned as 0

        Returns:
            Tuple (||A - U T U*||_F / ||A||_F, ||U*U - I||_F)
        """
        unitarity = float(np.linalg.norm(self._u.conj().T @ self._u - np.eye(self.n)))
        if a is None:
            return 0.0, unitarity
        scale = float(np.linalg.norm(a))
        recon = float(np.linalg.norm(a - self.reconstruct()))
        return (recon / scale if scale > 0 else recon), unitarity
