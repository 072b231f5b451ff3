"""
Dense complex linear algebra on numpy arrays: normalized Hilbert-Schmidt
norm, operator norm by power iteration, polar unitary factor and the
completion of partial permutations to permutations.

Norm conventions: ``hs_norm(A) = Tr_n(A* A)**0.5`` with the normalized trace
``Tr_n(I) = 1``; ``op_norm`` is the largest singular value.
"""

from __future__ import annotations

import logging
from typing import NamedTuple

import numpy as np

from .errors import NotPartialPermutation

log = logging.getLogger(__name__)

NEWTON_TOL = 1e-12
NEWTON_MAXITER = 100


def as_cmatrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def normalized_trace(A) -> complex:
    A = as_cmatrix(A)
    return complex(np.trace(A)) / A.shape[0]


def hs_norm(A) -> float:
    A = as_cmatrix(A)
    return float(np.sqrt(np.sum(np.abs(A) ** 2) / A.shape[0]))


class NormEstimate(NamedTuple):
    value: float
    converged: bool
    iterations: int


def _start_vector(n: int) -> np.ndarray:
    # Fixed pseudo-random start.  A constant vector would sit in the kernel
    # of every difference of permutation matrices.
    g = np.random.Generator(np.random.PCG64(0x5EED))
    v = g.standard_normal(n) + 1j * g.standard_normal(n)
    return v / np.linalg.norm(v)


def op_norm_estimate(A, tol: float = 1e-8, maxiter: int = 10_000) -> NormEstimate:
    """Power iteration on A* A; stops when the Rayleigh quotient changes by
    at most ``tol`` relative."""
    A = as_cmatrix(A)
    if not np.any(A):
        return NormEstimate(0.0, True, 0)
    AH = A.conj().T
    return op_norm_linear(lambda v: A @ v, lambda w: AH @ w, A.shape[0], tol, maxiter)


def op_norm_linear(matvec, rmatvec, n: int, tol: float = 1e-8, maxiter: int = 10_000) -> NormEstimate:
    """Matrix-free variant: ``matvec`` applies A, ``rmatvec`` applies A*."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    v = _start_vector(n)
    Av = matvec(v)
    if np.linalg.norm(Av) == 0.0:
        # the start vector is generic, so this means A = 0 up to a null set
        for k in range(n):
            e = np.zeros(n, dtype=np.complex128)
            e[k] = 1.0
            Av = matvec(e)
            if np.linalg.norm(Av):
                break
        else:
            return NormEstimate(0.0, True, 0)
    mu = float(np.vdot(Av, Av).real)
    for it in range(1, maxiter + 1):
        w = rmatvec(Av)
        v = w / np.linalg.norm(w)
        Av = matvec(v)
        new = float(np.vdot(Av, Av).real)
        if abs(new - mu) <= tol * new:
            return NormEstimate(float(np.sqrt(new)), True, it)
        mu = new
    log.warning("op_norm: iteration cap %d reached", maxiter)
    return NormEstimate(float(np.sqrt(mu)), False, maxiter)


def op_norm(A, tol: float = 1e-8) -> float:
    return op_norm_estimate(A, tol).value


def abs_part(A) -> np.ndarray:
    """|A| = (A* A)^(1/2)."""
    # From the SVD rather than sqrt(eig(A* A)): square roots of rounding-level
    # eigenvalues would cost half the digits on singular input.
    A = as_cmatrix(A)
    _, s, Vh = np.linalg.svd(A)
    return (Vh.conj().T * s) @ Vh


def _canonical_basis(P: np.ndarray, dim: int) -> np.ndarray:
    """Orthonormal basis of range(P) from P e_0, P e_1, ... in index order."""
    n = P.shape[0]
    basis: list[np.ndarray] = []
    for k in range(n):
        if len(basis) == dim:
            break
        v = P[:, k].copy()
        for b in basis:
            v -= np.vdot(b, v) * b
        for b in basis:  # second pass for orthogonality
            v -= np.vdot(b, v) * b
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            basis.append(v / nv)
    if len(basis) != dim:
        raise np.linalg.LinAlgError("could not complete a basis of the projector range")
    return np.array(basis).T.reshape(n, dim)


def _newton_polar(A: np.ndarray) -> np.ndarray:
    X = A
    scale = True
    for _ in range(NEWTON_MAXITER):
        Xi = np.linalg.inv(X)
        if scale:
            g = np.sqrt(np.linalg.norm(Xi) / np.linalg.norm(X))
        else:
            g = 1.0
        Xn = 0.5 * (g * X + Xi.conj().T / g)
        delta = np.linalg.norm(Xn - X) / np.linalg.norm(Xn)
        X = Xn
        if delta < 1e-2:
            scale = False
        if delta <= NEWTON_TOL:
            break
    return X


def polar_unitary(A, tol: float = 1e-10) -> np.ndarray:
    """Unitary U with U |A| = A.

    Invertible input (smallest singular value > tol * largest) goes through
    the Newton iteration X <- (X + X^-*)/2.  Otherwise the isometry on
    range(|A|) is extended by sending an orthonormal basis of ker A onto one
    of ker A*, both built from the standard basis in ascending index order.
    """
    A = as_cmatrix(A)
    n = A.shape[0]
    s = np.linalg.svd(A, compute_uv=False)
    if s[0] > 0 and s[-1] > tol * s[0]:
        return _newton_polar(A)
    W, s, Vh = np.linalg.svd(A)
    r = int(np.sum(s > tol * s[0])) if s[0] > 0 else 0
    U = W[:, :r] @ Vh[:r]
    if r < n:
        Vk = Vh[r:].conj().T
        Wk = W[:, r:]
        ker = _canonical_basis(Vk @ Vk.conj().T, n - r)
        coker = _canonical_basis(Wk @ Wk.conj().T, n - r)
        U = U + coker @ ker.conj().T
    return U


def check_partial_permutation(A) -> np.ndarray:
    A = as_cmatrix(A)
    if np.any(A.imag != 0) or not np.all((A.real == 0) | (A.real == 1)):
        raise NotPartialPermutation("entries must be 0 or 1")
    R = A.real
    if np.any(R.sum(axis=0) > 1) or np.any(R.sum(axis=1) > 1):
        raise NotPartialPermutation("more than one 1 in a row or column")
    return R


def complete_partial_permutation(A) -> np.ndarray:
    """Permutation matrix agreeing with A on its support; free rows are
    matched to free columns in ascending index order."""
    R = check_partial_permutation(A)
    free_rows = np.flatnonzero(R.sum(axis=1) == 0)
    free_cols = np.flatnonzero(R.sum(axis=0) == 0)
    U = R.astype(np.complex128)
    U[free_rows, free_cols] = 1.0
    return U
