import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hsstab.errors import NotPartialPermutation
from hsstab.numkernel import (
    abs_part,
    as_cmatrix,
    check_partial_permutation,
    complete_partial_permutation,
    hs_norm,
    normalized_trace,
    op_norm,
    op_norm_estimate,
    op_norm_linear,
    polar_unitary,
)


def shift(n):
    return np.roll(np.eye(n), 1, axis=0)


def rand_c(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


# ---- norms ---------------------------------------------------------------------

def test_hs_examples():
    for n in (1, 3, 17):
        assert hs_norm(np.eye(n)) == pytest.approx(1.0, abs=1e-15)
    e11 = np.zeros((2, 2))
    e11[0, 0] = 1
    assert hs_norm(e11) == pytest.approx(np.sqrt(0.5), abs=1e-15)
    assert hs_norm(np.zeros((4, 4))) == 0.0
    assert normalized_trace(np.eye(5)) == 1


def test_op_norm_examples():
    assert op_norm(np.eye(4)) == pytest.approx(1.0, abs=1e-12)
    assert op_norm_estimate(np.diag([3.0, 1.0]), tol=1e-14).value == pytest.approx(3.0, abs=1e-10)
    for n in (2, 5, 12):
        assert op_norm(shift(n)) == pytest.approx(1.0, abs=1e-12)


def test_op_norm_on_permutation_difference():
    # the ones vector is annihilated by P - Q; a generic start is required
    P, Q = shift(6), np.eye(6)
    assert op_norm(P - Q) == pytest.approx(2.0, abs=1e-6)


def test_op_norm_diagonals_exact():
    rng = np.random.default_rng(1)
    for _ in range(20):
        d = rng.uniform(0, 5, size=8)
        d[rng.integers(8)] = 6.0  # isolated top value for fast convergence
        assert op_norm_estimate(np.diag(d), tol=1e-14).value == pytest.approx(6.0, abs=1e-10)


def test_op_norm_flags_non_convergence():
    A = np.diag([1.0, 0.999999, 0.5])
    est = op_norm_estimate(A, tol=1e-15, maxiter=3)
    assert not est.converged and est.iterations == 3


def test_op_norm_rejects_bad_tol():
    with pytest.raises(ValueError):
        op_norm(np.eye(2), tol=0)


def test_matrix_free_matches_dense():
    rng = np.random.default_rng(3)
    A = rand_c(rng, 9)
    est = op_norm_linear(lambda v: A @ v, lambda w: A.conj().T @ w, 9, tol=1e-13)
    assert est.value == pytest.approx(np.linalg.norm(A, 2), rel=1e-6)


@given(st.integers(0, 2 ** 32), st.integers(1, 12))
def test_norm_comparison(seed, n):
    A = rand_c(np.random.default_rng(seed), n)
    h, o = hs_norm(A), op_norm(A, tol=1e-12)
    assert h <= o * (1 + 1e-6) and o <= np.sqrt(n) * h * (1 + 1e-9)
    assert o == pytest.approx(np.linalg.svd(A, compute_uv=False)[0], rel=1e-5)


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        as_cmatrix([[np.nan]])
    with pytest.raises(ValueError):
        as_cmatrix(np.ones((2, 3)))


# ---- polar -------------------------------------------------------------------------

def test_polar_examples():
    assert np.allclose(polar_unitary(np.diag([0.5, 2.0])), np.eye(2), atol=1e-12)
    rng = np.random.default_rng(5)
    Q, _ = np.linalg.qr(rand_c(rng, 6))
    assert np.allclose(polar_unitary(Q), Q, atol=1e-12)


def _contract(A, U):
    n = A.shape[0]
    assert hs_norm(U.conj().T @ U - np.eye(n)) <= 1e-10
    assert hs_norm(U @ abs_part(A) - A) <= 1e-10


def test_polar_bound_random_contractions():
    rng = np.random.default_rng(7)
    for _ in range(200):
        n = int(rng.integers(1, 9))
        A = rand_c(rng, n)
        A /= np.linalg.norm(A, 2) * rng.uniform(1.0, 3.0)
        U = polar_unitary(A)
        _contract(A, U)
        lhs = np.linalg.norm(U - A, 2)
        rhs = np.linalg.norm(np.eye(n) - A.conj().T @ A, 2)
        assert lhs <= rhs + 1e-9


def test_polar_matches_svd_factor():
    rng = np.random.default_rng(8)
    A = rand_c(rng, 7)
    W, _, Vh = np.linalg.svd(A)
    assert np.allclose(polar_unitary(A), W @ Vh, atol=1e-10)


def test_polar_singular_branch():
    rng = np.random.default_rng(9)
    for rank in (0, 1, 3):
        B = rand_c(rng, 5)
        W, s, Vh = np.linalg.svd(B)
        s[rank:] = 0
        A = (W * s) @ Vh
        U = polar_unitary(A)
        _contract(A, U)
        assert np.array_equal(U, polar_unitary(A))  # deterministic


def test_polar_on_partial_permutation_equals_completion():
    A = np.array([[0, 1, 0], [0, 0, 0], [0, 0, 1]], dtype=float)
    assert np.allclose(polar_unitary(A), complete_partial_permutation(A), atol=1e-12)


# ---- partial permutations --------------------------------------------------------

def test_completion_examples():
    P = shift(4)
    assert np.array_equal(complete_partial_permutation(P), P)
    A = np.array([[0, 1], [0, 0]])
    assert np.array_equal(complete_partial_permutation(A).real, [[0, 1], [1, 0]])


@given(st.integers(0, 2 ** 32), st.integers(1, 30))
def test_completion_defect_equals_free_fraction(seed, n):
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    keep = rng.random(n) < 0.6
    A = np.zeros((n, n))
    A[perm[keep], np.arange(n)[keep]] = 1
    U = complete_partial_permutation(A)
    assert np.array_equal(U @ abs_part(A).round(12), A)  # U|A| = A
    assert np.array_equal(U.conj().T @ U, np.eye(n))
    free = n - keep.sum()
    assert hs_norm(U - A) == pytest.approx(np.sqrt(free / n), abs=1e-15)
    assert hs_norm(U - A) == pytest.approx(hs_norm(np.eye(n) - abs_part(A)), abs=1e-12)


def test_completion_rejects_bad_input():
    with pytest.raises(NotPartialPermutation):
        complete_partial_permutation(np.array([[1, 1], [0, 0]]))
    with pytest.raises(NotPartialPermutation):
        check_partial_permutation(np.array([[0.5, 0], [0, 1]]))
    with pytest.raises(NotPartialPermutation):
        check_partial_permutation(np.array([[1j, 0], [0, 1]]))
