import numpy as np
import pytest
from numpy.testing import assert_allclose

from jsrlab import (
    IllConditionedError,
    NonFiniteError,
    NotPositiveDefiniteError,
    induced_norm,
    solve_spd_system,
    spd_sqrt,
    spectral_radius,
)
from jsrlab.errors import DimensionError

from helpers import char_poly_coeffs_3x3, example_32_tuple, example_33_tuple, random_orthogonal


class TestSpectralRadius:
    def test_identity(self):
        assert spectral_radius(np.eye(3)) == pytest.approx(1.0, abs=1e-12)

    def test_planar_rotation(self):
        a2 = np.array([[0.0, 1.0], [-1.0, 0.0]])
        assert spectral_radius(a2) == pytest.approx(1.0, abs=1e-12)

    def test_quarter_turn_product(self):
        a1, a2, a3 = example_32_tuple().mats
        assert_allclose(a3 @ a2, np.array([[0.5, 0.0], [0.0, 1.0]]), atol=1e-15)
        assert spectral_radius(a3 @ a2) == pytest.approx(1.0, abs=1e-12)

    def test_nilpotent_product_is_zero(self):
        # Oracle: characteristic polynomial coefficients vanish identically,
        # so every root is zero; no eigensolver involved.
        a1, a2 = example_33_tuple().mats
        prod = a2 @ a1
        coeffs = char_poly_coeffs_3x3(prod)
        assert max(abs(c) for c in coeffs) < 1e-14
        assert spectral_radius(prod) == pytest.approx(0.0, abs=1e-10)

    def test_zero_matrix(self):
        assert spectral_radius(np.zeros((4, 4))) == 0.0

    def test_rejects_nan(self):
        with pytest.raises(NonFiniteError):
            spectral_radius(np.array([[np.nan, 0.0], [0.0, 1.0]]))

    def test_rejects_oversized(self):
        with pytest.raises(DimensionError):
            spectral_radius(np.eye(65))

    def test_power_identity(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            m = rng.standard_normal((3, 3))
            r = spectral_radius(m)
            for k in (2, 3, 5):
                expected = r**k
                assert abs(spectral_radius(np.linalg.matrix_power(m, k)) - expected) <= 1e-8 * max(
                    1.0, expected
                )

    def test_cyclic_invariance(self):
        rng = np.random.default_rng(4)
        for _ in range(25):
            m1 = rng.standard_normal((3, 3))
            m2 = rng.standard_normal((3, 3))
            assert spectral_radius(m1 @ m2) == pytest.approx(
                spectral_radius(m2 @ m1), abs=1e-8
            )


class TestInducedNorm:
    def test_identity_all_kinds(self):
        for kind in ("one", "two", "inf"):
            assert induced_norm(np.eye(3), kind) == pytest.approx(1.0, abs=1e-12)

    def test_one_norm_of_shift(self):
        a1, _ = example_33_tuple().mats
        assert induced_norm(a1, "one") == pytest.approx(1.0, abs=1e-15)

    def test_two_norm_diagonal(self):
        # Oracle: singular values of a diagonal matrix are |entries|.
        assert induced_norm(np.diag([3.0, -4.0]), "two") == pytest.approx(4.0, abs=1e-10)

    def test_zero_matrix(self):
        for kind in ("one", "two", "inf"):
            assert induced_norm(np.zeros((3, 3)), kind) == 0.0

    def test_dominates_spectral_radius(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            m = rng.standard_normal((3, 3))
            r = spectral_radius(m)
            for kind in ("one", "two", "inf"):
                assert r <= induced_norm(m, kind) + 1e-10

    def test_submultiplicative(self):
        rng = np.random.default_rng(6)
        for _ in range(25):
            m1 = rng.standard_normal((3, 3))
            m2 = rng.standard_normal((3, 3))
            for kind in ("one", "two", "inf"):
                assert induced_norm(m1 @ m2, kind) <= induced_norm(m1, kind) * induced_norm(
                    m2, kind
                ) + 1e-10

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            induced_norm(np.eye(2), "fro")


class TestSolveSpdSystem:
    def test_rotation_gives_identity(self):
        a2 = np.array([[0.0, 1.0], [-1.0, 0.0]])
        q = solve_spd_system([(a2, 1.0)])
        assert q is not None
        assert_allclose(q / q[0, 0], np.eye(2), atol=1e-9)

    def test_scaled_quarter_turn_has_no_solution(self):
        a3 = np.array([[0.0, -0.5], [1.0, 0.0]])
        assert solve_spd_system([(a3, 1.0)]) is None

    def test_conjugated_orthogonal_recovers_form(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            g0 = rng.standard_normal((3, 3)) + 3.0 * np.eye(3)
            mats = [g0 @ random_orthogonal(rng, 3) @ np.linalg.inv(g0) for _ in range(2)]
            q = solve_spd_system([(a, 1.0) for a in mats])
            assert q is not None
            for a in mats:
                residual = np.linalg.norm(a.T @ q @ a - q, 2)
                assert residual <= 1e-8 * np.linalg.norm(q, 2)
            assert np.all(np.linalg.eigvalsh(q) > 0)

    def test_single_rotation_3d_needs_combination(self):
        # One 3-d rotation leaves a 2-parameter family of quadratic forms
        # invariant; no single nullspace basis element needs to be definite.
        rng = np.random.default_rng(11)
        rot = np.eye(3)
        theta = 0.7
        rot[:2, :2] = [[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]]
        g0 = rng.standard_normal((3, 3)) + 3.0 * np.eye(3)
        a = g0 @ rot @ np.linalg.inv(g0)
        q = solve_spd_system([(a, 1.0)])
        assert q is not None
        assert np.all(np.linalg.eigvalsh(q) > 0)
        assert np.linalg.norm(a.T @ q @ a - q, 2) <= 1e-8 * np.linalg.norm(q, 2)

    def test_ill_conditioned_rank(self):
        rng = np.random.default_rng(13)
        k = rng.standard_normal((2, 2))
        near_identity = np.eye(2) + 1e-8 * k
        a2 = np.array([[0.0, 1.0], [-1.0, 0.0]])
        with pytest.raises(IllConditionedError):
            solve_spd_system([(a2, 1.0), (near_identity, 1.0)])


class TestSpdSqrt:
    def test_identity(self):
        assert_allclose(spd_sqrt(np.eye(3)), np.eye(3), atol=1e-12)

    def test_diagonal(self):
        assert_allclose(spd_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-12)

    def test_random_spd_reconstructs(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            b = rng.standard_normal((4, 4))
            q = b @ b.T + 4.0 * np.eye(4)
            g = spd_sqrt(q)
            assert_allclose(g, g.T, atol=1e-12)
            assert np.linalg.norm(g @ g - q, 2) <= 1e-10 * np.linalg.norm(q, 2)

    def test_rejects_indefinite(self):
        with pytest.raises(NotPositiveDefiniteError):
            spd_sqrt(np.diag([1.0, -1.0]))

    def test_rejects_asymmetric(self):
        with pytest.raises(NotPositiveDefiniteError):
            spd_sqrt(np.array([[1.0, 0.5], [0.0, 1.0]]))
