import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sparseinterp import linalg
from sparseinterp.errors import IllConditionedWarning, InputError, SolveError


def complex_matrices(max_side=8):
    shapes = st.tuples(st.integers(1, max_side), st.integers(1, max_side))
    elems = st.floats(-10, 10, allow_nan=False, allow_infinity=False)

    @st.composite
    def build(draw):
        shape = draw(shapes)
        re = draw(arrays(float, shape, elements=elems))
        im = draw(arrays(float, shape, elements=elems))
        return re + 1j * im
    return build()


class TestSvd:
    @settings(max_examples=80, deadline=None)
    @given(A=complex_matrices())
    def test_reconstruction_and_orthonormality(self, A):
        U, S, V = linalg.svd(A)
        k = min(A.shape)
        scale = max(1.0, np.abs(A).max())
        assert U.shape == (A.shape[0], k) and V.shape == (A.shape[1], k)
        assert np.all(np.diff(S) <= 1e-12 * scale)
        assert np.allclose(U @ np.diag(S) @ V.conj().T, A, atol=1e-10 * scale)
        assert np.allclose(U.conj().T @ U, np.eye(k), atol=1e-10)
        assert np.allclose(V.conj().T @ V, np.eye(k), atol=1e-10)

    @settings(max_examples=40, deadline=None)
    @given(A=complex_matrices())
    def test_matches_lapack(self, A):
        S = linalg.svd(A)[1]
        ref = np.linalg.svd(A, compute_uv=False)
        assert np.allclose(S, ref, atol=1e-10 * max(1.0, ref[0]))

    def test_rank_deficient_completion(self):
        A = np.outer([1, 2, 3], [1, 1j])
        U, S, V = linalg.svd(A)
        assert S[1] < 1e-12
        assert np.allclose(U.conj().T @ U, np.eye(2), atol=1e-12)

    def test_zero_matrix(self):
        U, S, V = linalg.svd(np.zeros((3, 2)))
        assert np.all(S == 0)
        assert np.allclose(U.conj().T @ U, np.eye(2))

    def test_rejects_empty(self):
        with pytest.raises(InputError):
            linalg.svd(np.zeros((0, 3)))


class TestNumericalRank:
    def test_first_drop(self):
        assert linalg.numerical_rank([10, 5, 0.4, 0.3], epsilon=0.1) == 2
        assert linalg.numerical_rank([10, 5, 2], epsilon=0.1) == 3

    def test_zero(self):
        assert linalg.numerical_rank([0.0, 0.0]) == 0

    def test_floor(self):
        assert linalg.numerical_rank([1.0, 0.5, 1e-13]) == 2

    def test_epsilon_range(self):
        with pytest.raises(InputError):
            linalg.numerical_rank([1.0], epsilon=1.0)

    def test_unsorted(self):
        with pytest.raises(InputError):
            linalg.numerical_rank([1.0, 2.0])

    @settings(max_examples=60, deadline=None)
    @given(r=st.integers(1, 6), extra=st.integers(0, 4), seed=st.integers(0, 2**31))
    def test_low_rank_product(self, r, extra, seed):
        rng = np.random.default_rng(seed)
        n = r + extra
        A = rng.standard_normal((n, r)) @ rng.standard_normal((r, n))
        assert linalg.numerical_rank(linalg.svd(A)[1], epsilon=1e-6) == r


class TestEig:
    @settings(max_examples=60, deadline=None)
    @given(n=st.integers(1, 10), seed=st.integers(0, 2**31))
    def test_eigenpairs(self, n, seed):
        rng = np.random.default_rng(seed)
        A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        w, V = linalg.eig_general(A)
        assert np.allclose(A @ V, V * w, atol=1e-9 * max(1.0, np.abs(A).max()))
        assert np.allclose(np.sort_complex(w), np.sort_complex(np.linalg.eigvals(A)), atol=1e-8)

    def test_known_spectrum(self):
        P = np.array([[1, 2], [3, 5]], dtype=complex)
        D = np.diag([np.exp(1j), np.exp(2j)])
        w, _ = linalg.eig_general(P @ D @ np.linalg.inv(P))
        assert np.allclose(np.sort(np.angle(w)), [1.0, 2.0])

    def test_hessenberg_similarity(self, rng):
        A = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        H, Q = linalg.hessenberg(A)
        assert np.allclose(Q @ H @ Q.conj().T, A)
        assert np.allclose(np.tril(H, -2), 0)

    def test_eigh(self, rng):
        B = rng.standard_normal((5, 5))
        w, V = linalg.eigh(B + B.T)
        assert np.all(np.diff(w) >= 0)
        assert np.allclose((B + B.T) @ V, V * w)


class TestSolve:
    def test_square(self, rng):
        A = rng.standard_normal((4, 4)) + 4 * np.eye(4)
        b = rng.standard_normal(4)
        assert np.allclose(A @ linalg.solve(A, b), b)

    def test_least_squares(self, rng):
        A = rng.standard_normal((8, 3))
        b = rng.standard_normal(8)
        assert np.allclose(linalg.solve(A, b), np.linalg.lstsq(A, b, rcond=None)[0])

    def test_singular(self):
        with pytest.raises(SolveError):
            linalg.solve(np.zeros((2, 2)), np.ones(2))

    def test_ill_conditioned_warns(self):
        A = np.diag([1.0, 1e-14])
        with pytest.warns(IllConditionedWarning):
            linalg.solve(A, np.ones(2))

    def test_well_conditioned_silent(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            linalg.solve(np.eye(3), np.ones(3))

    def test_wide_rejected(self):
        with pytest.raises(InputError):
            linalg.solve(np.ones((2, 3)), np.ones(2))
