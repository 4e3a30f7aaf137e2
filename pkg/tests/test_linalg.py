import numpy as np
import pytest
from numpy.testing import assert_allclose

from pitaron_lab.linalg import (
    EigenSystem,
    as_matrix,
    frob,
    hermitian_eig,
    lyapunov_solve,
    mat_exp,
    polar_unitary_factor,
    positive_sqrt,
    unitarity_defect,
)

from oracles import lyapunov_quadrature, random_ginibre, random_pd, random_unitary, series_exp

SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)


class TestValidation:
    def test_rejects_non_square(self):
        with pytest.raises(ValueError, match="square"):
            as_matrix(np.zeros((2, 3)))

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError, match="finite"):
            as_matrix([[np.nan, 0], [0, 1]])

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            as_matrix(np.zeros((0, 0)))


class TestMatExp:
    def test_zero_matrix(self):
        assert_allclose(mat_exp(np.zeros((3, 3))), np.eye(3))

    def test_diagonal_analytic(self):
        out = mat_exp(np.diag([np.log(2), np.log(3)]).astype(complex))
        assert_allclose(out, np.diag([2.0, 3.0]), atol=1e-14)

    def test_pauli_rotation_vs_series_oracle(self):
        a = -1j * SIGMA1 * np.pi / 2
        assert_allclose(mat_exp(a), series_exp(a), atol=1e-14)
        assert_allclose(mat_exp(a), -1j * SIGMA1, atol=1e-13)

    def test_norm_ten_relative_accuracy(self, rng):
        # eigenbasis route is an independent reference for Hermitian input
        h = random_pd(rng, 6, 0.1, 1.0)
        h *= 10.0 / frob(h)
        w, v = np.linalg.eigh(h)
        reference = (v * np.exp(w)) @ v.conj().T
        assert frob(mat_exp(h) - reference) / frob(reference) < 1e-12

    def test_commuting_product_rule(self, rng):
        for dim in (2, 5, 8):
            w = random_unitary(rng, dim)
            a = (w * rng.uniform(-1, 1, dim)) @ w.conj().T
            b = (w * rng.uniform(-1, 1, dim)) @ w.conj().T
            assert frob(mat_exp(a + b) - mat_exp(a) @ mat_exp(b)) < 1e-10


class TestHermitianEig:
    def test_diagonal(self):
        es = hermitian_eig(np.diag([3.0, 1.0]).astype(complex))
        assert_allclose(es.values, [1.0, 3.0])
        assert_allclose(np.abs(es.vectors), np.eye(2)[:, ::-1], atol=1e-14)

    def test_pauli_x_spectrum(self):
        assert_allclose(hermitian_eig(SIGMA1).values, [-1.0, 1.0], atol=1e-14)

    def test_two_by_two_hand_spectrum(self):
        es = hermitian_eig(np.array([[2, 1], [1, 2]], dtype=complex))
        assert_allclose(es.values, [1.0, 3.0], atol=1e-14)

    def test_reconstruction_and_orthonormality(self, rng):
        for dim in (2, 7, 16):
            a = random_pd(rng, dim, -2.0, 2.0)
            es = hermitian_eig(a)
            assert frob(es.reconstruct() - a) < 1e-12 * max(1.0, frob(a))
            assert unitarity_defect(es.vectors) < 1e-13

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError, match="Hermitian"):
            hermitian_eig(np.array([[0, 1], [0, 0]], dtype=complex))


class TestPositiveSqrt:
    def test_diagonal(self):
        assert_allclose(positive_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-14)

    def test_identity(self):
        assert_allclose(positive_sqrt(np.eye(4)), np.eye(4), atol=1e-14)

    def test_hand_eigenpairs(self):
        # eigenvalues 1 and 3 on (1,-1) and (1,1): root entries (sqrt3 +- 1)/2
        root = positive_sqrt(np.array([[2, 1], [1, 2]], dtype=complex))
        s = np.sqrt(3.0)
        expected = np.array([[(s + 1) / 2, (s - 1) / 2], [(s - 1) / 2, (s + 1) / 2]])
        assert_allclose(root, expected, atol=1e-12)
        assert_allclose(root @ root, [[2, 1], [1, 2]], atol=1e-12)

    def test_square_recovers_input(self, rng):
        for dim in (2, 9, 16):
            g = random_ginibre(rng, dim)
            a = g @ g.conj().T  # Hermitian PSD
            root = positive_sqrt(a)
            assert frob(root @ root - a) < 1e-10 * max(1.0, frob(a))

    def test_clamps_tiny_negative(self):
        a = np.diag([1.0, -1e-13])
        root = positive_sqrt(a)
        assert root[1, 1] == 0.0

    def test_rejects_indefinite(self):
        with pytest.raises(np.linalg.LinAlgError, match="positive"):
            positive_sqrt(np.diag([1.0, -0.5]))


class TestPolarUnitaryFactor:
    def test_unitary_fixed_point(self, rng):
        w = random_unitary(rng, 5)
        assert frob(polar_unitary_factor(w) - w) < 1e-13

    def test_positive_diagonal(self):
        assert_allclose(polar_unitary_factor(np.diag([2.0, 0.5])), np.eye(2), atol=1e-14)

    def test_phase_of_diagonal(self):
        a = np.diag([2 * np.exp(1j * np.pi / 4), 3.0])
        expected = np.diag([np.exp(1j * np.pi / 4), 1.0])
        assert_allclose(polar_unitary_factor(a), expected, atol=1e-14)

    def test_factor_is_unitary(self, rng):
        for dim in (2, 8, 12):
            w = polar_unitary_factor(random_ginibre(rng, dim))
            assert unitarity_defect(w) < 1e-12

    def test_rejects_singular(self):
        with pytest.raises(np.linalg.LinAlgError, match="ill-conditioned"):
            polar_unitary_factor(np.diag([1.0, 0.0]))


class TestLyapunovSolve:
    def test_identity_halves(self, rng):
        q = random_pd(rng, 4, -1.0, 1.0)
        assert_allclose(lyapunov_solve(np.eye(4), q), q / 2, atol=1e-13)

    def test_diagonal_pair_sums(self):
        x = lyapunov_solve(np.diag([1.0, 2.0]), np.array([[2.0, 3.0], [3.0, 8.0]]))
        assert_allclose(x, [[1.0, 1.0], [1.0, 2.0]], atol=1e-13)

    def test_residual_and_hermiticity(self, rng):
        for dim in (2, 5, 8):
            n = random_pd(rng, dim)
            q = random_pd(rng, dim, -2.0, 2.0)
            x = lyapunov_solve(n, q)
            assert frob(n @ x + x @ n - q) < 1e-10
            assert frob(x - x.conj().T) < 1e-12

    def test_matches_quadrature_oracle(self, rng):
        n = random_pd(rng, 5)
        q = random_pd(rng, 5, -1.0, 2.0)
        assert frob(lyapunov_solve(n, q) - lyapunov_quadrature(n, q)) < 1e-10

    def test_rejects_non_pd(self):
        with pytest.raises(np.linalg.LinAlgError, match="positive definite"):
            lyapunov_solve(np.diag([1.0, -1.0]), np.eye(2))

    def test_rejects_dimension_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            lyapunov_solve(np.eye(2), np.eye(3))


def test_eigensystem_is_plain_data():
    es = EigenSystem(values=np.array([1.0]), vectors=np.eye(1, dtype=complex))
    assert es.values[0] == 1.0
