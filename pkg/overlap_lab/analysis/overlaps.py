"""
Eigenvector Overlaps

This module computes overlaps O_ij = (L_i L_j*)(R_j* R_i) between left and right eigenvectors:
- Full overlap matrix of a dense matrix (Schur form + triangular eigenvectors)
- O_11 and O_12 of an upper-triangular matrix by the column recurrence
- Mixed trace identity tr(G G*) = sum_ij lambda_i conj(lambda_j) O_ij
"""

import logging
from typing import Dict, Tuple, Union

import numpy as np

from ..errors import DegenerateSpectrum, ParameterError
from ..linalg import Spectrum, as_complex_matrix, schur, solve, triangular_eigenvectors

logger = logging.getLogger(__name__)

OVERLAP_GAP_TOL = 1e-10
RECURRENCE_GAP_TOL = 1e-12


class OverlapMatrix:
    """
    Matrix of overlaps with the spectrum its rows and columns refer to.

    Row i and column i belong to spectrum[i].
    """

    def __init__(self, entries: np.ndarray, spectrum: Spectrum):
        """
        Initialize overlap matrix.

        Args:
            entries: N x N complex overlaps
            spectrum: Eigenvalues in row order
        """
        if entries.shape != (spectrum.n, spectrum.n):
            raise ParameterError(f"Overlap entries {entries.shape} do not match spectrum size {spectrum.n}")
        self._entries = entries
        self._spectrum = spectrum

    @property
    def entries(self) -> np.ndarray:
        """Get overlap entries."""
        return self._entries

    @property
    def spectrum(self) -> Spectrum:
        """Get spectrum in row order."""
        return self._spectrum

    @property
    def n(self) -> int:
        return self._spectrum.n

    def diagonal(self) -> np.ndarray:
        """Diagonal overlaps O_ii (real)."""
        return np.diag(self._entries).real.copy()

    def min_diagonal(self) -> float:
        return float(np.min(self.diagonal()))

    def row_sums(self) -> np.ndarray:
        return np.sum(self._entries, axis=1)

    def row_sum_residuals(self) -> np.ndarray:
        """|sum_j O_ij - 1| divided by the row's largest |O_ij|."""
        kappa = np.max(np.abs(self._entries), axis=1)
        return np.abs(self.row_sums() - 1.0) / kappa

    def pairing_residual(self) -> float:
        """max |O_ij - conj(O_ji)| / max(|O_ij|, 1)."""
        o = self._entries
        diff = np.abs(o - o.conj().T)
        return float(np.max(diff / np.maximum(np.abs(o), 1.0)))


def overlap_matrix(g) -> OverlapMatrix:
    """
    Full overlap matrix of a square matrix with simple spectrum.

    P = U Y (U from the Schur form, Y the triangular eigenvectors) holds the
    right eigenvectors R_i as columns and P^{-1} the left eigenvectors L_i as
    rows, so O_ij = (P^{-1} P^{-*})_ij (P* P)_ji.

    Args:
        g: Square complex matrix

    Returns:
        OverlapMatrix in Schur eigenvalue order

    Raises:
        DegenerateSpectrum: If two eigenvalues are within 1e-10 * ||g||_F
    """
    g = as_complex_matrix(g, 'g', square=True)
    n = g.shape[0]
    form = schur(g)
    spectrum = form.eigenvalues
    if n == 1:
        return OverlapMatrix(np.ones((1, 1), dtype=np.complex128), spectrum)

    gap = spectrum.min_gap()
    threshold = OVERLAP_GAP_TOL * float(np.linalg.norm(g))
    if gap <= threshold:
        raise DegenerateSpectrum(f"Eigenvalue gap {gap:.3e} below {threshold:.3e}", gap=gap)

    p = form.u @ triangular_eigenvectors(form.t)
    p_inv = solve(p, np.eye(n, dtype=np.complex128))
    left_gram = p_inv @ p_inv.conj().T
    right_gram = p.conj().T @ p
    entries = left_gram * right_gram.T

    idx = np.diag_indices(n)
    entries[idx] = entries[idx].real
    return OverlapMatrix(entries, spectrum)


class RecurrenceState:
    """
    Running state of the overlap recurrence over the columns of a triangular matrix.

    Works on a batch of B matrices at once. After k steps b and d hold
    b_1..b_k and d_1..d_k with b_1 = 1, d_1 = 0, d_2 = 1 and
    b_{k+1} = (B_k . u_{k+1}) / (lambda_1 - lambda_{k+1}),
    d_{k+1} = (D_k . u_{k+1}) / (lambda_2 - lambda_{k+1}),
    where u_{k+1} is the part of column k+1 above the diagonal.
    """

    def __init__(self, lam1: np.ndarray, lam2: np.ndarray, capacity: int):
        """
        Initialize recurrence state.

        Args:
            lam1: First eigenvalue per matrix, shape (B,)
            lam2: Second eigenvalue per matrix, shape (B,)
            capacity: Number of columns N
        """
        lam1 = np.asarray(lam1, dtype=np.complex128).reshape(-1)
        batch = lam1.shape[0]
        self._lam1 = lam1
        self._lam2 = np.asarray(lam2, dtype=np.complex128).reshape(-1)
        self._b = np.zeros((batch, capacity), dtype=np.complex128)
        self._d = np.zeros((batch, capacity), dtype=np.complex128)
        self._b[:, 0] = 1.0
        self._k = 1
        self._o11 = np.ones(batch)
        self._bd = np.zeros(batch, dtype=np.complex128)
        self._history = [self._o11.copy()]

    @property
    def k(self) -> int:
        """Number of columns processed."""
        return self._k

    @property
    def b(self) -> np.ndarray:
        return self._b[:, :self._k]

    @property
    def d(self) -> np.ndarray:
        return self._d[:, :self._k]

    @property
    def o11(self) -> np.ndarray:
        """Partial sums sum_i |b_i|^2 (>= 1)."""
        return self._o11.copy()

    @property
    def o12(self) -> np.ndarray:
        """Partial sums -conj(b_2) sum_i b_i conj(d_i) (nan before the second column)."""
        if self._k < 2:
            return np.full(self._o11.shape, np.nan + 1j * np.nan)
        return -np.conj(self._b[:, 1]) * self._bd

    @property
    def history_o11(self) -> np.ndarray:
        """O_11 partial sums after each step, shape (k, B)."""
        return np.stack(self._history)

    def advance(self, column: np.ndarray, eigenvalue: np.ndarray):
        """
        Consume the next column.

        Args:
            column: Entries above the diagonal, shape (B, k)
            eigenvalue: Diagonal entry of the column, shape (B,)
        """
        k = self._k
        if k >= self._b.shape[1]:
            raise ParameterError("Recurrence already consumed every column")
        column = np.asarray(column, dtype=np.complex128).reshape(self._b.shape[0], k)
        eigenvalue = np.asarray(eigenvalue, dtype=np.complex128).reshape(-1)

        b_new = np.sum(self._b[:, :k] * column, axis=1) / (self._lam1 - eigenvalue)
        if k == 1:
            d_new = np.ones_like(b_new)
        else:
            d_new = np.sum(self._d[:, :k] * column, axis=1) / (self._lam2 - eigenvalue)

        self._b[:, k] = b_new
        self._d[:, k] = d_new
        self._o11 = self._o11 + np.abs(b_new) ** 2
        self._bd = self._bd + b_new * np.conj(d_new)
        self._k = k + 1
        self._history.append(self._o11.copy())


def _check_recurrence_gaps(t: np.ndarray):
    """Raise DegenerateSpectrum when lambda_1 or lambda_2 nearly collides with a later eigenvalue."""
    n = t.shape[-1]
    lam = np.diagonal(t, axis1=-2, axis2=-1)
    scale = RECURRENCE_GAP_TOL * np.linalg.norm(t, axis=(-2, -1))
    gap1 = np.min(np.abs(lam[:, 1:] - lam[:, :1]), axis=1)
    if np.any(gap1 <= scale):
        raise DegenerateSpectrum(f"lambda_1 collides with a later eigenvalue (gap {float(np.min(gap1)):.3e})",
                                 gap=float(np.min(gap1)))
    if n >= 3:
        gap2 = np.min(np.abs(lam[:, 2:] - lam[:, 1:2]), axis=1)
        if np.any(gap2 <= scale):
            raise DegenerateSpectrum(f"lambda_2 collides with a later eigenvalue (gap {float(np.min(gap2)):.3e})",
                                     gap=float(np.min(gap2)))


def run_recurrence(t) -> RecurrenceState:
    """
    Run the overlap recurrence over every column of one or more triangular matrices.

    Args:
        t: Upper-triangular matrix (N, N) or stack (B, N, N)

    Returns:
        Final RecurrenceState (batch dimension always present)
    """
    t = np.asarray(t, dtype=np.complex128)
    if t.ndim == 2:
        t = t[None]
    if t.ndim != 3 or t.shape[-1] != t.shape[-2]:
        raise ParameterError(f"Expected square triangular matrices, got shape {t.shape}")
    if not np.all(np.isfinite(t)):
        raise ParameterError("Triangular input has non-finite entries")
    if np.any(np.tril(t, -1) != 0):
        raise ParameterError("Recurrence input must be upper triangular")

    n = t.shape[-1]
    lam = np.diagonal(t, axis1=-2, axis2=-1)
    if n >= 2:
        _check_recurrence_gaps(t)
    state = RecurrenceState(lam[:, 0], lam[:, 1] if n >= 2 else lam[:, 0], n)
    for k in range(1, n):
        state.advance(t[:, :k, k], lam[:, k])
    return state


def overlap_pair_recurrence(t) -> Union[Tuple[float, complex], Tuple[np.ndarray, np.ndarray]]:
    """
    O_11 and O_12 of an upper-triangular matrix.

    O_11 = sum |b_i|^2 and O_12 = -conj(b_2) sum b_i conj(d_i), with the
    recurrence of RecurrenceState. For N = 1, O_11 = 1 and O_12 is nan.

    Args:
        t: Upper-triangular matrix (N, N) or stack (B, N, N)

    Returns:
        (o11, o12) as (float, complex) for a single matrix or arrays of shape (B,)

    Raises:
        DegenerateSpectrum: If lambda_1 or lambda_2 is within 1e-12 * ||t|| of a later eigenvalue
    """
    single = np.ndim(t) == 2
    state = run_recurrence(t)
    o11, o12 = state.o11, state.o12
    if single:
        return float(o11[0]), complex(o12[0])
    return o11, o12


def mixed_trace(g, o: OverlapMatrix) -> Tuple[float, float]:
    """
    Both sides of tr(G G*) = sum_ij lambda_i conj(lambda_j) O_ij.

    Args:
        g: Square matrix
        o: Its overlap matrix

    Returns:
        Tuple (lhs, rhs) with rhs the real part of the eigenvalue sum
    """
    lhs, rhs = _mixed_trace_sides(g, o)
    return lhs, float(rhs.real)


def _mixed_trace_sides(g, o: OverlapMatrix) -> Tuple[float, complex]:
    g = as_complex_matrix(g, 'g', square=True)
    lam = o.spectrum.values
    lhs = float(np.sum(np.abs(g) ** 2))
    rhs = complex(lam @ o.entries @ np.conj(lam))
    return lhs, rhs


def mixed_trace_residuals(g, o: OverlapMatrix) -> Dict[str, float]:
    """
    Residuals of the mixed trace identity.

    The real residual is scaled by max(lhs, sum_ij |lambda_i lambda_j O_ij|),
    which bounds the cancellation in the eigenvalue sum.

    Returns:
        Dictionary with lhs, rhs and the relative real and imaginary residuals
    """
    lhs, rhs = _mixed_trace_sides(g, o)
    lam = np.abs(o.spectrum.values)
    magnitude = float(lam @ np.abs(o.entries) @ lam)
    scale = max(lhs, magnitude, np.finfo(float).tiny)
    return {
        'lhs': lhs,
        'rhs': float(rhs.real),
        'relative': abs(lhs - rhs.real) / scale,
        'imaginary': abs(rhs.imag) / scale,
    }


def match_spectra(reference, other) -> np.ndarray:
    """
    Greedy nearest-neighbour matching of two spectra.

    Returns:
        Index array perm with other[perm[i]] closest to reference[i]
    """
    ref = np.asarray(reference.values if isinstance(reference, Spectrum) else reference, dtype=np.complex128)
    oth = np.asarray(other.values if isinstance(other, Spectrum) else other, dtype=np.complex128)
    if ref.shape != oth.shape:
        raise ParameterError(f"Spectra sizes differ: {ref.shape} vs {oth.shape}")
    dist = np.abs(ref[:, None] - oth[None, :])
    perm = np.full(ref.size, -1)
    used = np.zeros(ref.size, dtype=bool)
    # Resolve the tightest pairs first
    for flat in np.argsort(dist, axis=None):
        i, j = divmod(int(flat), ref.size)
        if perm[i] < 0 and not used[j]:
            perm[i] = j
            used[j] = True
    return perm
