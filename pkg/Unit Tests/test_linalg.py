"""
Unit tests for the linear algebra kernels.

Tests cover:
- QR, Hessenberg and Schur factorizations
- Stacked eigenvalue solves
- Triangular eigenvectors
- LU solve, determinant and Cholesky
- Spectrum and SchurForm value types
"""

import sys
import unittest
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent.resolve()))

from overlap_lab.errors import (
    DegenerateSpectrum,
    NonConvergence,
    NotPositiveDefinite,
    ParameterError,
    SingularMatrix,
)
from overlap_lab.linalg import (
    Spectrum,
    as_complex_matrix,
    cholesky,
    determinant,
    eigenvalues,
    eigenvalues_batch,
    hessenberg,
    qr,
    schur,
    solve,
    triangular_eigenvectors,
)


def random_complex(shape, seed):
    rng = np.random.default_rng(seed)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def sorted_values(values):
    values = np.asarray(values)
    return values[np.lexsort((values.imag, values.real))]


class TestQR(unittest.TestCase):
    """Test cases for Householder QR."""

    def test_square_factorization(self):
        a = random_complex((6, 6), 1)
        q, r = qr(a)
        np.testing.assert_allclose(q @ r, a, atol=1e-12)
        np.testing.assert_allclose(q.conj().T @ q, np.eye(6), atol=1e-12)
        self.assertTrue(np.allclose(np.tril(r, -1), 0.0))
        diag = np.diag(r)
        self.assertTrue(np.all(diag.real >= 0.0))
        np.testing.assert_allclose(diag.imag, 0.0, atol=1e-15)

    def test_tall_reduced_factorization(self):
        a = random_complex((7, 3), 2)
        q, r = qr(a)
        self.assertEqual(q.shape, (7, 3))
        self.assertEqual(r.shape, (3, 3))
        np.testing.assert_allclose(q @ r, a, atol=1e-12)
        np.testing.assert_allclose(q.conj().T @ q, np.eye(3), atol=1e-12)

    def test_wide_input_rejected(self):
        with self.assertRaises(ParameterError):
            qr(random_complex((2, 4), 3))


class TestHessenberg(unittest.TestCase):
    """Test cases for Hessenberg reduction."""

    def test_reduction(self):
        a = random_complex((8, 8), 4)
        q, h = hessenberg(a)
        np.testing.assert_allclose(q @ h @ q.conj().T, a, atol=1e-12)
        self.assertTrue(np.allclose(np.tril(h, -2), 0.0))


class TestSchur(unittest.TestCase):
    """Test cases for the complex Schur decomposition."""

    def test_residuals_random_matrix(self):
        for n in (2, 5, 16, 32):
            a = random_complex((n, n), 10 + n)
            form = schur(a)
            recon, unitarity = form.residuals(a)
            self.assertLess(recon, 1e-10)
            self.assertLess(unitarity, 1e-12 * np.sqrt(n))
            self.assertTrue(np.all(np.tril(form.t, -1) == 0.0))

    def test_eigenvalues_match_numpy(self):
        a = random_complex((10, 10), 5)
        ours = sorted_values(eigenvalues(a).values)
        reference = sorted_values(np.linalg.eigvals(a))
        np.testing.assert_allclose(ours, reference, atol=1e-10)

    def test_one_by_one(self):
        form = schur(np.array([[2.0 - 1.0j]]))
        self.assertEqual(form.t[0, 0], 2.0 - 1.0j)
        self.assertEqual(form.sweeps, 0)

    def test_zero_matrix(self):
        form = schur(np.zeros((3, 3)))
        np.testing.assert_array_equal(form.eigenvalues.values, np.zeros(3))

    def test_triangular_input_needs_no_sweeps(self):
        t = np.triu(random_complex((5, 5), 6))
        form = schur(t)
        self.assertEqual(form.sweeps, 0)
        np.testing.assert_allclose(form.t, t, atol=1e-14)

    def test_sweep_budget(self):
        with self.assertRaises(NonConvergence):
            schur(random_complex((6, 6), 7), max_sweeps=0)

    def test_invalid_tolerance(self):
        with self.assertRaises(ParameterError):
            schur(np.eye(2), tol=0.0)

    def test_non_square_rejected(self):
        with self.assertRaises(ParameterError):
            schur(np.ones((2, 3)))


class TestEigenvaluesBatch(unittest.TestCase):
    """Test cases for the stacked eigenvalue solver."""

    def test_matches_numpy(self):
        stack = random_complex((6, 12, 12), 30)
        values = eigenvalues_batch(stack)
        self.assertEqual(values.shape, (6, 12))
        for row, a in zip(values, stack):
            np.testing.assert_allclose(sorted_values(row), sorted_values(np.linalg.eigvals(a)), atol=1e-9)

    def test_matches_single_matrix_solver(self):
        stack = random_complex((3, 30, 30), 31)
        for row, a in zip(eigenvalues_batch(stack), stack):
            np.testing.assert_allclose(sorted_values(row), sorted_values(eigenvalues(a).values), atol=1e-9)

    def test_mixed_stack(self):
        t = np.triu(random_complex((5, 5), 32))
        stack = np.stack([np.zeros((5, 5)), t, random_complex((5, 5), 33)])
        values = eigenvalues_batch(stack)
        np.testing.assert_array_equal(values[0], np.zeros(5))
        np.testing.assert_allclose(sorted_values(values[1]), sorted_values(np.diag(t)), atol=1e-14)
        np.testing.assert_allclose(sorted_values(values[2]), sorted_values(np.linalg.eigvals(stack[2])),
                                   atol=1e-10)

    def test_input_not_modified(self):
        stack = random_complex((2, 4, 4), 34)
        before = stack.copy()
        eigenvalues_batch(stack)
        np.testing.assert_array_equal(stack, before)

    def test_one_by_one(self):
        np.testing.assert_array_equal(eigenvalues_batch(np.array([[[2.0j]], [[-1.0]]])), [[2.0j], [-1.0]])

    def test_sweep_budget(self):
        with self.assertRaises(NonConvergence):
            eigenvalues_batch(random_complex((2, 6, 6), 35), max_sweeps=0)

    def test_invalid_input(self):
        for bad in (np.eye(3), np.ones((2, 2, 3)), np.zeros((0, 3, 3))):
            with self.assertRaises(ParameterError):
                eigenvalues_batch(bad)
        with self.assertRaises(ParameterError):
            eigenvalues_batch(np.full((1, 2, 2), np.nan))
        with self.assertRaises(ParameterError):
            eigenvalues_batch(np.ones((1, 2, 2)), tol=0.0)


class TestTriangularEigenvectors(unittest.TestCase):
    """Test cases for back-substituted eigenvectors."""

    def test_eigen_equation(self):
        t = np.triu(random_complex((6, 6), 8))
        y = triangular_eigenvectors(t)
        np.testing.assert_allclose(t @ y, y @ np.diag(np.diag(t)), atol=1e-10)
        np.testing.assert_array_equal(np.diag(y), np.ones(6))
        self.assertTrue(np.all(np.tril(y, -1) == 0.0))

    def test_repeated_eigenvalue(self):
        t = np.array([[1.0, 2.0], [0.0, 1.0]])
        with self.assertRaises(DegenerateSpectrum):
            triangular_eigenvectors(t)

    def test_requires_triangular(self):
        with self.assertRaises(ParameterError):
            triangular_eigenvectors(np.ones((2, 2)))


class TestSolveDeterminantCholesky(unittest.TestCase):
    """Test cases for LU and Cholesky kernels."""

    def test_solve_vector_and_matrix(self):
        a = random_complex((5, 5), 9)
        b = random_complex((5,), 10)
        np.testing.assert_allclose(a @ solve(a, b), b, atol=1e-10)
        bm = random_complex((5, 3), 11)
        np.testing.assert_allclose(a @ solve(a, bm), bm, atol=1e-10)

    def test_solve_singular(self):
        a = np.array([[1.0, 2.0], [2.0, 4.0]])
        with self.assertRaises(SingularMatrix):
            solve(a, np.ones(2))

    def test_solve_shape_mismatch(self):
        with self.assertRaises(ParameterError):
            solve(np.eye(3), np.ones(2))

    def test_determinant(self):
        a = random_complex((6, 6), 12)
        self.assertAlmostEqual(abs(determinant(a) - np.linalg.det(a)), 0.0, places=10)
        self.assertEqual(determinant(np.zeros((3, 3))), 0j)

    def test_cholesky_single_and_stacked(self):
        b = random_complex((4, 3, 3), 13)
        h = b @ np.conj(np.swapaxes(b, -1, -2)) + np.eye(3)
        lower = cholesky(h)
        np.testing.assert_allclose(lower @ np.conj(np.swapaxes(lower, -1, -2)), h, atol=1e-12)
        single = cholesky(h[0])
        np.testing.assert_allclose(single, lower[0], atol=1e-14)
        self.assertTrue(np.all(np.diagonal(lower, axis1=-2, axis2=-1).real > 0.0))

    def test_cholesky_not_positive_definite(self):
        with self.assertRaises(NotPositiveDefinite):
            cholesky(np.diag([1.0, -1.0]))

    def test_cholesky_not_hermitian(self):
        with self.assertRaises(ParameterError):
            cholesky(np.array([[2.0, 1.0], [0.0, 2.0]]))


class TestValueTypes(unittest.TestCase):
    """Test cases for Spectrum, SchurForm and matrix validation."""

    def test_spectrum_gaps_and_order(self):
        s = Spectrum([0.0, 1.0, 3.0j])
        self.assertEqual(s.n, 3)
        self.assertAlmostEqual(s.min_gap(), 1.0)
        np.testing.assert_allclose(s.gaps_from(0), [1.0, 3.0])
        np.testing.assert_array_equal(s.with_first(2).values, [3.0j, 0.0, 1.0])
        np.testing.assert_array_equal(s.with_pair(2, 1).values, [3.0j, 1.0, 0.0])
        self.assertEqual(Spectrum([5.0]).min_gap(), float('inf'))

    def test_spectrum_is_read_only(self):
        s = Spectrum([1.0, 2.0])
        with self.assertRaises(ValueError):
            s.values[0] = 3.0

    def test_spectrum_validation(self):
        with self.assertRaises(ParameterError):
            Spectrum([])
        with self.assertRaises(ParameterError):
            Spectrum([1.0, np.nan])
        with self.assertRaises(ParameterError):
            Spectrum([1.0, 2.0]).with_pair(1, 1)

    def test_as_complex_matrix(self):
        self.assertEqual(as_complex_matrix([[1, 2], [3, 4]]).dtype, np.complex128)
        with self.assertRaises(ParameterError):
            as_complex_matrix([1, 2])
        with self.assertRaises(ParameterError):
            as_complex_matrix([[np.inf]])
        with self.assertRaises(ParameterError):
            as_complex_matrix(np.ones((2, 3)), square=True)


if __name__ == '__main__':
    unittest.main()
