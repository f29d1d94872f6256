"""
Dense Complex Decompositions

This module provides the numerical kernels used by every sampler and overlap computation:
- Householder QR with non-negative real R diagonal
- Householder Hessenberg reduction
- Complex Schur form by Wilkinson-shifted QR with deflation
- Eigenvectors of an upper-triangular matrix by back-substitution
- Partially pivoted LU solve and determinant
- Cholesky factorization (single or stacked matrices)
"""

import cmath
import logging
from typing import Optional, Tuple

import numpy as np

from ..errors import (
    DegenerateSpectrum,
    NonConvergence,
    NotPositiveDefinite,
    ParameterError,
    SingularMatrix,
)
from .types import ComplexMatrix, SchurForm, Spectrum, as_complex_matrix

logger = logging.getLogger(__name__)

# Relative deflation factor; the absolute floor is DEFAULT_SCHUR_TOL * ||a||_F
DEFAULT_SCHUR_TOL = 1e-13
SWEEPS_PER_ROW = 30
PIVOT_TOL = 1e-14
EIGENVECTOR_GAP_TOL = 1e-12
# Window iteration count at which an exceptional shift replaces Wilkinson's
EXCEPTIONAL_SHIFT_EVERY = 10


def _householder_vector(x: np.ndarray) -> Tuple[Optional[np.ndarray], complex]:
    """
    Build a unit Householder vector v with (I - 2vv*)x = beta*e1.

    Args:
        x: Column to annihilate below its first entry

    Returns:
        Tuple (v or None when x is already zero, beta)
    """
    norm_x = float(np.linalg.norm(x))
    if norm_x == 0.0:
        return None, 0j
    x0 = x[0]
    phase = x0 / abs(x0) if x0 != 0 else 1.0 + 0j
    v = x.astype(np.complex128, copy=True)
    v[0] += phase * norm_x
    v /= np.linalg.norm(v)
    return v, -phase * norm_x


def qr(a: ComplexMatrix) -> Tuple[ComplexMatrix, ComplexMatrix]:
    """
    Householder QR factorization.

    A tall M x N input (M > N) gives the reduced factorization: q is M x N
    with orthonormal columns and r is N x N.

    Args:
        a: N x N (or tall M x N) matrix

    Returns:
        Tuple (q, r) with a = q r, q unitary (orthonormal columns) and r
        upper triangular with real non-negative diagonal
    """
    a = as_complex_matrix(a, 'a')
    m, n = a.shape
    if m < n:
        raise ParameterError(f"qr needs rows >= columns, got shape {a.shape}")
    r = a.copy()

    reflectors = []
    for k in range(min(n, m - 1)):
        v, beta = _householder_vector(r[k:, k])
        reflectors.append(v)
        if v is None:
            continue
        r[k:, k:] -= 2.0 * np.outer(v, v.conj() @ r[k:, k:])
        r[k, k] = beta
        r[k + 1:, k] = 0.0

    # Q = H_1 ... H_K applied to the first n columns of the identity
    q = np.eye(m, n, dtype=np.complex128)
    for k in range(len(reflectors) - 1, -1, -1):
        v = reflectors[k]
        if v is None:
            continue
        q[k:, :] -= 2.0 * np.outer(v, v.conj() @ q[k:, :])
    r = r[:n, :]

    # Absorb the diagonal phases of R into Q
    diag = np.diag(r)
    mag = np.abs(diag)
    phases = np.where(mag > 0, diag / np.where(mag > 0, mag, 1.0), 1.0)
    r = np.triu(phases.conj()[:, None] * r)
    r[np.diag_indices(n)] = mag
    q = q * phases[None, :]
    return q, r


def hessenberg(a: ComplexMatrix) -> Tuple[ComplexMatrix, ComplexMatrix]:
    """
    Reduce a square matrix to upper Hessenberg form by Householder similarities.

    Args:
        a: N x N matrix

    Returns:
        Tuple (q, h) with a = q h q*, h zero below the first subdiagonal
    """
    a = as_complex_matrix(a, 'a', square=True)
    n = a.shape[0]
    h = a.copy()
    q = np.eye(n, dtype=np.complex128)

    for k in range(n - 2):
        v, beta = _householder_vector(h[k + 1:, k])
        if v is None:
            continue
        h[k + 1:, :] -= 2.0 * np.outer(v, v.conj() @ h[k + 1:, :])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ v, v.conj())
        q[:, k + 1:] -= 2.0 * np.outer(q[:, k + 1:] @ v, v.conj())
        h[k + 1, k] = beta
        h[k + 2:, k] = 0.0

    return q, h


def _givens(a: complex, b: complex) -> Tuple[float, complex]:
    """Rotation (c, s) with [[c, s], [-conj(s), c]] @ [a, b] = [r, 0]."""
    if b == 0:
        return 1.0, 0j
    if a == 0:
        return 0.0, 1.0 + 0j
    abs_a = abs(a)
    nrm = float(np.hypot(abs_a, abs(b)))
    return abs_a / nrm, (a / abs_a) * np.conj(b) / nrm


def _wilkinson_shift(block: np.ndarray) -> complex:
    """Eigenvalue of the trailing 2 x 2 block closest to its last diagonal entry."""
    a, b = block[0, 0], block[0, 1]
    c, d = block[1, 0], block[1, 1]
    mean = 0.5 * (a + d)
    disc = cmath.sqrt(0.25 * (a - d) ** 2 + b * c)
    e1, e2 = mean + disc, mean - disc
    return e1 if abs(e1 - d) <= abs(e2 - d) else e2


def _qr_sweep(h: np.ndarray, q: np.ndarray, lo: int, hi: int, shift: complex):
    """One explicitly shifted QR step on the active window h[lo:hi+1, lo:hi+1], in place."""
    idx = np.arange(lo, hi + 1)
    h[idx, idx] -= shift

    rotations = []
    for k in range(lo, hi):
        c, s = _givens(h[k, k], h[k + 1, k])
        g = np.array([[c, s], [-np.conj(s), c]], dtype=np.complex128)
        h[k:k + 2, k:] = g @ h[k:k + 2, k:]
        h[k + 1, k] = 0.0
        rotations.append(g)

    for k, g in zip(range(lo, hi), rotations):
        gh = g.conj().T
        h[:k + 2, k:k + 2] = h[:k + 2, k:k + 2] @ gh
        q[:, k:k + 2] = q[:, k:k + 2] @ gh

    h[idx, idx] += shift


def schur(a: ComplexMatrix, tol: float = DEFAULT_SCHUR_TOL,
          max_sweeps: Optional[int] = None) -> SchurForm:
    """
    Complex Schur decomposition a = U T U*.

    A subdiagonal entry is deflated (set to exact zero) when
    |h[i+1, i]| <= tol * (|h[i, i]| + |h[i+1, i+1]|) or |h[i+1, i]| <= tol * ||a||_F.

    Args:
        a: N x N matrix
        tol: Relative deflation factor (must be > 0)
        max_sweeps: Sweep budget (default 30 * N)

    Returns:
        SchurForm with eigenvalues in deflation order

    Raises:
        NonConvergence: If deflation stalls after max_sweeps sweeps
    """
    a = as_complex_matrix(a, 'a', square=True)
    if tol <= 0:
        raise ParameterError(f"tol must be > 0, got {tol}")
    n = a.shape[0]
    if max_sweeps is None:
        max_sweeps = SWEEPS_PER_ROW * n

    if n == 1:
        return SchurForm(np.eye(1, dtype=np.complex128), a.copy(), 0)

    q, h = hessenberg(a)
    norm_a = float(np.linalg.norm(a))
    if norm_a == 0.0:
        return SchurForm(q, np.triu(h), 0)
    abs_floor = tol * norm_a

    hi = n - 1
    sweeps = 0
    window_iter = 0
    while hi > 0:
        # Find the start of the unreduced block ending at hi
        lo = hi
        while lo > 0:
            sub = abs(h[lo, lo - 1])
            if sub <= abs_floor or sub <= tol * (abs(h[lo - 1, lo - 1]) + abs(h[lo, lo])):
                h[lo, lo - 1] = 0.0
                break
            lo -= 1

        if lo == hi:
            hi -= 1
            window_iter = 0
            continue

        if sweeps >= max_sweeps:
            raise NonConvergence(
                f"Schur iteration did not converge after {sweeps} sweeps (N={n}, active row {hi})",
                sweeps=sweeps)

        sweeps += 1
        window_iter += 1
        if window_iter % EXCEPTIONAL_SHIFT_EVERY == 0:
            shift = h[hi, hi] + 0.75 * abs(h[hi, hi - 1])
            logger.debug(f"Exceptional shift at row {hi} after {window_iter} sweeps")
        else:
            shift = _wilkinson_shift(h[hi - 1:hi + 1, hi - 1:hi + 1])
        _qr_sweep(h, q, lo, hi, shift)

    return SchurForm(q, np.triu(h), sweeps)


def eigenvalues(a: ComplexMatrix) -> Spectrum:
    """Eigenvalues of a, in Schur deflation order."""
    return schur(a).eigenvalues


def _hessenberg_stack(h: np.ndarray) -> np.ndarray:
    """Householder Hessenberg reduction of every matrix in a (B, N, N) stack, in place."""
    n = h.shape[-1]
    for k in range(n - 2):
        x = h[:, k + 1:, k]
        norm_x = np.linalg.norm(x, axis=1)
        x0 = x[:, 0]
        mag0 = np.abs(x0)
        phase = np.where(mag0 > 0, x0 / np.where(mag0 > 0, mag0, 1.0), 1.0)
        v = x.copy()
        v[:, 0] += phase * norm_x
        v_norm = np.linalg.norm(v, axis=1)
        # Zero columns leave v = 0, which makes the reflection a no-op
        v /= np.where(v_norm > 0, v_norm, 1.0)[:, None]
        rows = h[:, k + 1:, :]
        rows -= 2.0 * v[:, :, None] * np.einsum('bi,bij->bj', v.conj(), rows)[:, None, :]
        cols = h[:, :, k + 1:]
        cols -= 2.0 * np.einsum('bij,bj->bi', cols, v)[:, :, None] * v.conj()[:, None, :]
        h[:, k + 2:, k] = 0.0
    return h


def _givens_stack(a: np.ndarray, b: np.ndarray, active: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorized _givens; inactive entries get the identity rotation."""
    abs_a = np.abs(a)
    nrm = np.hypot(abs_a, np.abs(b))
    safe = np.where(nrm > 0, nrm, 1.0)
    phase = np.where(abs_a > 0, a / np.where(abs_a > 0, abs_a, 1.0), 1.0)
    c = np.where(nrm > 0, abs_a / safe, 1.0)
    s = phase * np.conj(b) / safe
    return np.where(active, c, 1.0), np.where(active, s, 0.0)


def _wilkinson_shift_stack(h: np.ndarray, hi: int) -> np.ndarray:
    a, b = h[:, hi - 1, hi - 1], h[:, hi - 1, hi]
    c, d = h[:, hi, hi - 1], h[:, hi, hi]
    mean = 0.5 * (a + d)
    disc = np.sqrt(0.25 * (a - d) ** 2 + b * c)
    e1, e2 = mean + disc, mean - disc
    return np.where(np.abs(e1 - d) <= np.abs(e2 - d), e1, e2)


def _qr_sweep_stack(h: np.ndarray, hi: int, shift: np.ndarray, active: np.ndarray):
    """
    One shifted QR step on the leading (hi+1) x (hi+1) block of every active matrix.

    Entries outside that block do not affect its eigenvalues and are left stale.
    """
    idx = np.arange(hi + 1)
    h[:, idx, idx] -= shift[:, None]

    rotations = []
    for k in range(hi):
        c, s = _givens_stack(h[:, k, k], h[:, k + 1, k], active)
        top = h[:, k, k:hi + 1].copy()
        bottom = h[:, k + 1, k:hi + 1]
        h[:, k, k:hi + 1] = c[:, None] * top + s[:, None] * bottom
        h[:, k + 1, k:hi + 1] = -np.conj(s)[:, None] * top + c[:, None] * bottom
        rotations.append((c, s))

    for k, (c, s) in enumerate(rotations):
        left = h[:, :k + 2, k].copy()
        right = h[:, :k + 2, k + 1]
        h[:, :k + 2, k] = c[:, None] * left + np.conj(s)[:, None] * right
        h[:, :k + 2, k + 1] = -s[:, None] * left + c[:, None] * right

    h[:, idx, idx] += shift[:, None]


def eigenvalues_batch(a, tol: float = DEFAULT_SCHUR_TOL, max_sweeps: Optional[int] = None) -> np.ndarray:
    """
    Eigenvalues of a stack of matrices by shifted QR run on all of them at once.

    Every matrix follows the same deflation schedule: row hi is deflated once
    its subdiagonal entry passes the schur() test in every matrix of the stack,
    and matrices that have already converged at hi are not rotated.

    Args:
        a: Array of shape (B, N, N)
        tol: Relative deflation factor (must be > 0)
        max_sweeps: Sweep budget (default 30 * N)

    Returns:
        Array of shape (B, N), eigenvalues in deflation order

    Raises:
        NonConvergence: If some matrix has not deflated after max_sweeps sweeps
    """
    h = np.array(a, dtype=np.complex128)
    if h.ndim != 3 or h.shape[1] != h.shape[2] or h.shape[0] == 0 or h.shape[1] == 0:
        raise ParameterError(f"eigenvalues_batch needs a non-empty (B, N, N) stack, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise ParameterError("eigenvalues_batch input has non-finite entries")
    if tol <= 0:
        raise ParameterError(f"tol must be > 0, got {tol}")
    n = h.shape[1]
    if max_sweeps is None:
        max_sweeps = SWEEPS_PER_ROW * n

    abs_floor = tol * np.linalg.norm(h, axis=(1, 2))
    _hessenberg_stack(h)

    hi = n - 1
    sweeps = 0
    window_iter = 0
    while hi > 0:
        sub = np.abs(h[:, hi, hi - 1])
        active = (sub > abs_floor) & (sub > tol * (np.abs(h[:, hi - 1, hi - 1]) + np.abs(h[:, hi, hi])))
        if not np.any(active):
            h[:, hi, hi - 1] = 0.0
            hi -= 1
            window_iter = 0
            continue

        if sweeps >= max_sweeps:
            raise NonConvergence(
                f"Batched QR did not converge after {sweeps} sweeps "
                f"(N={n}, active row {hi}, {int(np.sum(active))} matrices pending)",
                sweeps=sweeps)

        sweeps += 1
        window_iter += 1
        if window_iter % EXCEPTIONAL_SHIFT_EVERY == 0:
            shift = h[:, hi, hi] + 0.75 * sub
            logger.debug(f"Exceptional shift at row {hi} after {window_iter} sweeps")
        else:
            shift = _wilkinson_shift_stack(h, hi)
        _qr_sweep_stack(h, hi, np.where(active, shift, 0.0), active)

    return np.diagonal(h, axis1=1, axis2=2).copy()


def triangular_eigenvectors(t: ComplexMatrix) -> ComplexMatrix:
    """
    Right eigenvectors of an upper-triangular matrix.

    Column j solves (t - lambda_j I) y_j = 0 with y_j[j] = 1 and y_j[i] = 0 for i > j,
    so the result Y is unit upper triangular and t Y = Y diag(lambda).

    Args:
        t: Upper-triangular N x N matrix with distinct diagonal entries

    Returns:
        Eigenvector matrix Y

    Raises:
        DegenerateSpectrum: If two diagonal entries are closer than 1e-12 * ||t||_F
    """
    t = as_complex_matrix(t, 't', square=True)
    if np.any(np.tril(t, -1) != 0):
        raise ParameterError("t must be upper triangular")
    n = t.shape[0]
    lam = np.diag(t).copy()

    gap = Spectrum(lam).min_gap()
    threshold = EIGENVECTOR_GAP_TOL * float(np.linalg.norm(t))
    if gap <= threshold:
        raise DegenerateSpectrum(f"Eigenvalue gap {gap:.3e} below {threshold:.3e}", gap=gap)

    y = np.eye(n, dtype=np.complex128)
    for i in range(n - 2, -1, -1):
        y[i, i + 1:] = -(t[i, i + 1:] @ y[i + 1:, i + 1:]) / (lam[i] - lam[i + 1:])
    return y


def _lu_factor(a: np.ndarray, pivot_tol: float) -> Tuple[np.ndarray, np.ndarray, int]:
    """
    LU factorization with partial pivoting, PA = LU packed in one array.

    Returns:
        Tuple (lu, permutation, permutation sign)
    """
    n = a.shape[0]
    lu = a.copy()
    perm = np.arange(n)
    sign = 1
    threshold = pivot_tol * float(np.linalg.norm(a))

    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        pivot = abs(lu[p, k])
        if pivot == 0.0 or pivot <= threshold:
            raise SingularMatrix(f"Pivot {pivot:.3e} at column {k} below {threshold:.3e}")
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            perm[[k, p]] = perm[[p, k]]
            sign = -sign
        lu[k + 1:, k] /= lu[k, k]
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])

    return lu, perm, sign


def solve(a: ComplexMatrix, b) -> np.ndarray:
    """
    Solve a x = b by partially pivoted LU.

    Args:
        a: Square nonsingular matrix
        b: Right-hand side vector (N,) or matrix (N, K)

    Returns:
        Solution with the shape of b

    Raises:
        SingularMatrix: If a pivot falls below 1e-14 * ||a||_F
    """
    a = as_complex_matrix(a, 'a', square=True)
    n = a.shape[0]
    b = np.asarray(b, dtype=np.complex128)
    if b.shape[0] != n or b.ndim not in (1, 2):
        raise ParameterError(f"Right-hand side shape {b.shape} incompatible with {a.shape}")

    lu, perm, _ = _lu_factor(a, PIVOT_TOL)
    x = b.reshape(n, -1)[perm].copy()

    # Forward substitution with unit lower factor
    for i in range(1, n):
        x[i] -= lu[i, :i] @ x[:i]
    # Back substitution
    for i in range(n - 1, -1, -1):
        x[i] = (x[i] - lu[i, i + 1:] @ x[i + 1:]) / lu[i, i]

    return x.reshape(b.shape)


def determinant(a: ComplexMatrix) -> complex:
    """Determinant from the pivoted LU factors (0 for an exactly singular matrix)."""
    a = as_complex_matrix(a, 'a', square=True)
    try:
        lu, _, sign = _lu_factor(a, 0.0)
    except SingularMatrix:
        return 0j
    return complex(sign * np.prod(np.diag(lu)))


def cholesky(h) -> np.ndarray:
    """
    Cholesky factor of a Hermitian positive definite matrix.

    Stacked input of shape (..., n, n) is factored matrix by matrix.

    Args:
        h: Hermitian positive definite matrix (or stack)

    Returns:
        Lower-triangular A with real positive diagonal and A A* = h

    Raises:
        NotPositiveDefinite: If any pivot falls below 1e-14 * ||h||_F
    """
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim < 2 or h.shape[-1] != h.shape[-2]:
        raise ParameterError(f"cholesky needs square matrices, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise ParameterError("cholesky input has non-finite entries")

    n = h.shape[-1]
    norms = np.linalg.norm(h, axis=(-2, -1))
    asym = np.linalg.norm(h - np.conj(np.swapaxes(h, -1, -2)), axis=(-2, -1))
    if np.any(asym > 1e-10 * np.maximum(norms, 1.0)):
        raise ParameterError("cholesky input is not Hermitian")
    threshold = PIVOT_TOL * norms

    lower = np.zeros_like(h)
    for j in range(n):
        row = lower[..., j, :j]
        pivot = h[..., j, j].real - np.sum(np.abs(row) ** 2, axis=-1)
        if np.any(pivot <= threshold):
            worst = float(np.min(pivot - threshold))
            raise NotPositiveDefinite(f"Cholesky pivot at column {j} below threshold (margin {worst:.3e})")
        diag = np.sqrt(np.asarray(pivot))
        lower[..., j, j] = diag
        if j + 1 < n:
            coupling = np.einsum('...ik,...k->...i', lower[..., j + 1:, :j], np.conj(row))
            lower[..., j + 1:, j] = (h[..., j + 1:, j] - coupling) / diag[..., None]

    return lower
