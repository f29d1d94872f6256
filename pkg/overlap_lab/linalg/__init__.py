"""
Dense complex linear algebra written for the overlap computations.
"""

from .types import ComplexMatrix, Spectrum, SchurForm, as_complex_matrix
from .decompositions import (
    qr,
    hessenberg,
    schur,
    eigenvalues,
    eigenvalues_batch,
    triangular_eigenvectors,
    solve,
    determinant,
    cholesky,
)

__all__ = [
    # Types
    'ComplexMatrix',
    'Spectrum',
    'SchurForm',
    'as_complex_matrix',
    # Decompositions
    'qr',
    'hessenberg',
    'schur',
    'eigenvalues',
    'eigenvalues_batch',
    'triangular_eigenvectors',
    'solve',
    'determinant',
    'cholesky',
]
