"""
Unit tests for the matrix ensembles.

Tests cover:
- EnsembleKind / EnsembleSpec parsing and validation
- Ginibre, Haar unitary, truncated unitary and spherical samplers
- Kostlan reference radii
- Stereographic projection helpers
"""

import math
import sys
import unittest
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent.resolve()))

from overlap_lab.errors import ParameterError, PoleSingularity
from overlap_lab.linalg import eigenvalues
from overlap_lab.analysis.statistical_analysis import ks_one_sample, ks_two_sample
from overlap_lab.sampling.rng import RngStream
from overlap_lab.sampling.ensembles import (
    EnsembleKind,
    EnsembleSpec,
    SpherePoint,
    chordal_distance_sq,
    kostlan_radii,
    sample_ginibre,
    sample_haar_unitary,
    sample_matrix,
    sample_spherical,
    sample_tue,
    stereo_project,
    stereo_project_many,
    stereo_unproject,
)

ALPHA = 0.001


class TestEnsembleSpec(unittest.TestCase):
    """Test cases for ensemble parsing and parameters."""

    def test_kind_from_string(self):
        self.assertEqual(EnsembleKind.from_string('CGE'), EnsembleKind.GINIBRE)
        self.assertEqual(EnsembleKind.from_string('spherical'), EnsembleKind.SPHERICAL)
        self.assertEqual(EnsembleKind.from_string(' tue '), EnsembleKind.TRUNCATED_UNITARY)
        self.assertEqual(EnsembleKind.SPHERICAL.description, 'spherical')
        with self.assertRaises(ParameterError):
            EnsembleKind.from_string('goe')

    def test_truncated_unitary_needs_valid_m(self):
        with self.assertRaises(ParameterError):
            EnsembleSpec(EnsembleKind.TRUNCATED_UNITARY, 4)
        with self.assertRaises(ParameterError):
            EnsembleSpec.truncated_unitary(4, 3)
        with self.assertRaises(ParameterError):
            EnsembleSpec.ginibre(0)

    def test_sign_and_scale(self):
        self.assertEqual(EnsembleSpec.ginibre(5).sign, 0)
        self.assertEqual(EnsembleSpec.spherical(5).sign, 1)
        tue = EnsembleSpec.truncated_unitary(5, 9)
        self.assertEqual(tue.sign, -1)
        self.assertEqual(tue.scale, 9)
        self.assertEqual(EnsembleSpec.spherical(5).scale, 5)

    def test_from_string_and_with_n(self):
        tue = EnsembleSpec.from_string('tue', 4)
        self.assertEqual(tue.m, 4)
        self.assertEqual(tue.with_n(6).m, 6)
        self.assertEqual(EnsembleSpec.truncated_unitary(4, 10).with_n(6).m, 10)
        self.assertIsNone(EnsembleSpec.spherical(3).m)

    def test_equality_and_dict(self):
        self.assertEqual(EnsembleSpec.spherical(3), EnsembleSpec.from_string('sph', 3))
        self.assertNotEqual(EnsembleSpec.spherical(3), EnsembleSpec.ginibre(3))
        self.assertEqual(len({EnsembleSpec.spherical(3), EnsembleSpec.spherical(3)}), 1)
        self.assertEqual(EnsembleSpec.truncated_unitary(2, 5).to_dict(), {'ensemble': 'tue', 'n': 2, 'm': 5})


class TestSamplers(unittest.TestCase):
    """Test cases for direct matrix samplers."""

    def test_ginibre_variance(self):
        n = 20
        entries = np.concatenate([sample_ginibre(n, RngStream(1, r)).ravel() for r in range(20)])
        self.assertAlmostEqual(float(np.mean(n * np.abs(entries) ** 2)), 1.0, delta=0.05)

    def test_haar_unitary(self):
        u = sample_haar_unitary(6, RngStream(2))
        np.testing.assert_allclose(u.conj().T @ u, np.eye(6), atol=1e-12)
        # E|tr U|^2 = 1 for Haar U
        traces = [abs(np.trace(sample_haar_unitary(4, RngStream(3, r)))) ** 2 for r in range(2000)]
        self.assertAlmostEqual(float(np.mean(traces)), 1.0, delta=0.1)

    def test_truncated_unitary_is_contraction(self):
        for r in range(20):
            g = sample_tue(5, 7, RngStream(4, r))
            self.assertLessEqual(float(np.linalg.svd(g, compute_uv=False)[0]), 1.0 + 1e-12)

    def test_truncated_unitary_one_by_one(self):
        # |U_11|^2 of a 2 x 2 Haar unitary is uniform on [0, 1]
        draws = np.array([abs(sample_tue(1, 1, RngStream(5, r))[0, 0]) ** 2 for r in range(3000)])
        self.assertTrue(ks_one_sample(draws, lambda x: np.clip(x, 0.0, 1.0), ALPHA).passed)

    def test_spherical_one_by_one(self):
        # |g1/g2|^2 has cdf x / (1 + x)
        draws = np.array([abs(sample_spherical(1, RngStream(6, r))[0, 0]) ** 2 for r in range(3000)])
        self.assertTrue(ks_one_sample(draws, lambda x: x / (1.0 + x), ALPHA).passed)

    def test_spherical_half_inside_unit_disk(self):
        spec = EnsembleSpec.spherical(50)
        inside = sum(int(np.sum(np.abs(eigenvalues(sample_matrix(spec, RngStream(7, r))).values) < 1.0))
                     for r in range(10))
        self.assertLess(abs(inside - 250), 40)

    def test_sample_matrix_dispatch(self):
        for spec in (EnsembleSpec.ginibre(3), EnsembleSpec.spherical(3), EnsembleSpec.truncated_unitary(3, 4)):
            g = sample_matrix(spec, RngStream(8))
            self.assertEqual(g.shape, (3, 3))
            self.assertEqual(g.dtype, np.complex128)

    def test_reproducible(self):
        spec = EnsembleSpec.spherical(4)
        np.testing.assert_array_equal(sample_matrix(spec, RngStream(9, 1)), sample_matrix(spec, RngStream(9, 1)))


class TestKostlanRadii(unittest.TestCase):
    """Test cases for independent reference radii."""

    def test_shapes(self):
        spec = EnsembleSpec.spherical(5)
        self.assertEqual(kostlan_radii(spec, False, RngStream(10)).shape, (5,))
        self.assertEqual(kostlan_radii(spec, False, RngStream(10), 7).shape, (7, 5))
        self.assertEqual(kostlan_radii(spec, True, RngStream(10), 7).shape, (7, 4))
        self.assertEqual(kostlan_radii(EnsembleSpec.spherical(1), True, RngStream(10)).shape, (0,))

    def test_tue_radii_inside_unit_disk(self):
        radii = kostlan_radii(EnsembleSpec.truncated_unitary(4, 6), False, RngStream(11), 1000)
        self.assertTrue(np.all((radii > 0.0) & (radii < 1.0)))

    def test_ginibre_radii_mean(self):
        # sum of Gamma(k)/N over k = 1..N has mean (N + 1)/2
        radii = kostlan_radii(EnsembleSpec.ginibre(6), False, RngStream(12), 20_000)
        self.assertAlmostEqual(float(np.mean(np.sum(radii, axis=1))), 3.5, delta=0.05)

    def test_matches_direct_spectra(self):
        spec = EnsembleSpec.spherical(4)
        direct = np.array([np.sum(np.log1p(eigenvalues(sample_matrix(spec, RngStream(13, r))).moduli_squared()))
                           for r in range(2000)])
        radii = np.sum(np.log1p(kostlan_radii(spec, False, RngStream(14), 2000)), axis=1)
        self.assertTrue(ks_two_sample(direct, radii, ALPHA).passed)


class TestStereographic(unittest.TestCase):
    """Test cases for sphere geometry helpers."""

    def test_special_points(self):
        south = stereo_project(0.0)
        self.assertAlmostEqual(south.z, -1.0)
        equator = stereo_project(1j)
        self.assertAlmostEqual(equator.z, 0.0)
        self.assertAlmostEqual(equator.y, 1.0)

    def test_round_trip(self):
        for lam in (0.3 - 0.2j, 2.0 + 5.0j, -7.5j):
            self.assertAlmostEqual(abs(stereo_unproject(stereo_project(lam)) - lam), 0.0, places=9)

    def test_vectorized_matches_scalar(self):
        values = np.array([0.1 + 0.2j, -3.0, 4j])
        points = stereo_project_many(values)
        for row, lam in zip(points, values):
            np.testing.assert_allclose(row, stereo_project(lam).as_array(), atol=1e-15)

    def test_outside_unit_disk(self):
        np.testing.assert_allclose(stereo_project(3.0 - 4.0j).as_array(), [6 / 26, -8 / 26, 24 / 26], atol=1e-15)
        np.testing.assert_allclose(stereo_project(1.0).as_array(), [1.0, 0.0, 0.0], atol=1e-15)

    def test_huge_modulus_stays_finite(self):
        points = stereo_project_many([1e200, -5e250j, 3e300 + 4e300j])
        self.assertTrue(np.all(np.isfinite(points)))
        np.testing.assert_allclose(points[:, 2], 1.0, atol=1e-12)
        np.testing.assert_allclose(np.sum(points ** 2, axis=1), 1.0, atol=1e-12)
        self.assertGreater(stereo_project(2e154).z, 1.0 - 1e-12)

    def test_north_pole(self):
        with self.assertRaises(PoleSingularity):
            stereo_unproject(np.array([0.0, 0.0, 1.0]))

    def test_point_off_sphere(self):
        with self.assertRaises(ParameterError):
            SpherePoint(1.0, 1.0, 0.0)

    def test_chordal_distance(self):
        self.assertAlmostEqual(chordal_distance_sq(0.0, 1.0), 2.0)
        p, q = stereo_project(0.5j).as_array(), stereo_project(-2.0).as_array()
        self.assertAlmostEqual(chordal_distance_sq(0.5j, -2.0), float(np.sum((p - q) ** 2)))
        self.assertEqual(chordal_distance_sq(1.0 + 1.0j, 1.0 + 1.0j), 0.0)


if __name__ == '__main__':
    unittest.main()
