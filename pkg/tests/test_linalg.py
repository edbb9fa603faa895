import numpy as np
import pytest

from quasihmm import errors
from quasihmm.linalg import (
    left_fixed_vector,
    row_sum_residual,
    solve_linear,
    symmetric_eigenvalues,
)


class TestLeftFixedVector:
    def test_symmetric_two_state_chain_is_uniform(self):
        p = 0.3
        v = left_fixed_vector([[1 - p, p], [p, 1 - p]])
        assert v == pytest.approx([0.5, 0.5], abs=1e-12)

    def test_golden_mean_chain(self):
        # pi [[0.5, 0.5], [1, 0]] = pi  =>  pi0 = 0.5 pi0 + pi1, pi0 + pi1 = 1
        # hand solution: pi = [2/3, 1/3]
        v = left_fixed_vector([[0.5, 0.5], [1.0, 0.0]])
        assert v == pytest.approx([2 / 3, 1 / 3], abs=1e-12)

    def test_identity_is_degenerate(self):
        with pytest.raises(errors.DegenerateFixedSpace):
            left_fixed_vector(np.eye(2))

    def test_jordan_structure_at_one_is_degenerate(self):
        # algebraic multiplicity 3, geometric 2: no canonical fixed vector
        m = [[1.0, 0.0, 0.0], [1.0, 1.0, -1.0], [0.0, 0.0, 1.0]]
        with pytest.raises(errors.DegenerateFixedSpace):
            left_fixed_vector(m)

    def test_signed_rows_are_accepted(self):
        # quasi-stochastic: rows sum to 1 with negative entries
        m = np.array([[1.3, -0.3], [-0.2, 1.2]])
        # eigenvalues are 1 and 1.5 + ... check the non-unit one is away from 1
        v = left_fixed_vector(m)
        assert np.allclose(v @ m, v, atol=1e-10)
        assert v.sum() == pytest.approx(1.0, abs=1e-12)

    def test_non_stochastic_rows_rejected(self):
        with pytest.raises(ValueError):
            left_fixed_vector([[0.9, 0.0], [0.5, 0.5]])

    def test_nan_rejected(self):
        with pytest.raises(errors.NonFiniteEntries):
            left_fixed_vector([[np.nan, 1.0], [0.5, 0.5]])

    def test_random_quasi_stochastic_roundtrip(self, rng):
        for _ in range(50):
            n = int(rng.integers(2, 7))
            m = rng.uniform(-0.4, 1.0, (n, n))
            m /= m.sum(axis=1, keepdims=True)
            try:
                v = left_fixed_vector(m)
            except (errors.DegenerateFixedSpace, errors.NoUnitEigenvalue, ValueError):
                continue
            assert float(np.max(np.abs(v @ m - v))) <= 1e-7  # 10x eigen tolerance
            assert v.sum() == pytest.approx(1.0, abs=1e-10)


class TestSolveLinear:
    def test_identity(self):
        assert solve_linear(np.eye(2), [3.0, 4.0]) == pytest.approx([3.0, 4.0])

    def test_diagonal(self):
        assert solve_linear([[2, 0], [0, 4]], [2, 4]) == pytest.approx([1.0, 1.0])

    def test_hand_inverse(self):
        # [[1,1],[1,-1]]^-1 [1,0] = [0.5, 0.5]
        assert solve_linear([[1, 1], [1, -1]], [1, 0]) == pytest.approx([0.5, 0.5])

    def test_singular_rejected(self):
        with pytest.raises(errors.SingularMatrix):
            solve_linear([[1, 1], [1, 1]], [1, 0])

    def test_multiply_back(self, rng):
        for _ in range(25):
            n = int(rng.integers(1, 8))
            a = rng.normal(size=(n, n)) + n * np.eye(n)
            b = rng.normal(size=n)
            assert a @ solve_linear(a, b) == pytest.approx(b, abs=1e-8)


class TestSymmetricEigenvalues:
    def test_diagonal(self):
        assert symmetric_eigenvalues(np.diag([3.0, 1.0])) == pytest.approx([3.0, 1.0])

    def test_rank_one(self):
        assert symmetric_eigenvalues([[1, 1], [1, 1]]) == pytest.approx([2.0, 0.0], abs=1e-12)

    def test_two_by_two_closed_form(self):
        # [[a, b], [b, a]] has eigenvalues a +- b
        vals = symmetric_eigenvalues([[0.5, 0.4], [0.4, 0.5]])
        assert vals == pytest.approx([0.9, 0.1], abs=1e-12)

    def test_asymmetric_rejected(self):
        with pytest.raises(errors.NotSymmetric):
            symmetric_eigenvalues([[0.0, 1.0], [0.0, 0.0]])

    def test_trace_and_frobenius_preserved(self, rng):
        for _ in range(25):
            n = int(rng.integers(2, 9))
            a = rng.normal(size=(n, n))
            a = 0.5 * (a + a.T)
            vals = symmetric_eigenvalues(a)
            assert np.all(np.diff(vals) <= 1e-12)
            assert vals.sum() == pytest.approx(np.trace(a), abs=1e-9)
            assert np.sum(vals**2) == pytest.approx(np.sum(a * a), abs=1e-8)


def test_row_sum_residual():
    assert row_sum_residual([[0.5, 0.5], [1.0, 0.0]]) == 0.0
    assert row_sum_residual([[0.4, 0.5], [1.0, 0.0]]) == pytest.approx(0.1)
