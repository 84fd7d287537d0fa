"""Dense complex linear algebra: SVD, eigendecompositions, solves and rank.

The SVD uses one-sided Jacobi rotations and the general eigensolver uses a
Householder reduction to Hessenberg form followed by shifted complex QR
iterations. Hermitian eigenproblems and LU factorisations are delegated to
LAPACK through scipy.
"""

from __future__ import annotations

import warnings

import numpy as np
import scipy.linalg as sla

from . import kernels
from .errors import IllConditionedWarning, InputError, NumericalError, SolveError

EPS = np.finfo(float).eps
RANK_FLOOR = 1e-12
MAX_SWEEPS = 80


def svd(A) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin singular value decomposition ``A = U @ diag(S) @ V.conj().T``.

    Args:
        A: Array of shape ``(m, n)``.

    Returns:
        ``U`` of shape ``(m, k)``, ``S`` of shape ``(k,)`` sorted descending
        and ``V`` of shape ``(n, k)`` with ``k = min(m, n)``. Both factors
        have orthonormal columns.

    Raises:
        NumericalError: if the Jacobi sweeps do not converge.
    """
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.size == 0:
        raise InputError("svd needs a nonempty two-dimensional array")
    m, n = A.shape
    if m < n:
        U, S, V = svd(A.conj().T)
        return V, S, U
    # rescale by a power of two so that squared norms neither underflow nor
    # overflow; ldexp stays exact where dividing by a subnormal would overflow
    peak = np.abs(A).max()
    shift = int(np.frexp(peak)[1]) if peak > 0.0 else 0
    W = np.ascontiguousarray(np.ldexp(A.T.real, -shift) + 1j * np.ldexp(A.T.imag, -shift))
    Vt = np.eye(n, dtype=complex)
    sweeps = kernels.jacobi_sweeps(W, Vt, max(m, 1) * EPS, MAX_SWEEPS)
    if sweeps < 0:
        raise NumericalError(f"Jacobi SVD did not converge in {MAX_SWEEPS} sweeps")
    S = np.linalg.norm(W, axis=1)
    order = np.argsort(-S, kind="stable")
    S = S[order]
    W = W[order]
    V = Vt[order].T
    U = np.zeros((m, n), dtype=complex)
    # directions of numerically zero columns are not orthogonal; complete them
    nonzero = S > max(m, 1) * EPS * np.linalg.norm(S)
    U[:, nonzero] = (W[nonzero] / S[nonzero, None]).T
    if not np.all(nonzero):
        U = _complete_columns(U, nonzero)
    return U, np.ldexp(S, shift), V


def _complete_columns(U: np.ndarray, filled: np.ndarray) -> np.ndarray:
    """Replace the unfilled columns of ``U`` by an orthonormal complement."""
    m = U.shape[0]
    basis = U[:, filled]
    for j in np.flatnonzero(~filled):
        residuals = np.eye(m, dtype=complex) - basis @ basis.conj().T
        k = int(np.argmax(np.linalg.norm(residuals, axis=0)))
        v = residuals[:, k]
        v = v - basis @ (basis.conj().T @ v)
        v /= np.linalg.norm(v)
        U[:, j] = v
        basis = np.column_stack([basis, v])
    return U


def numerical_rank(S, epsilon: float = 0.1, floor: float = RANK_FLOOR) -> int:
    """Rank from the first singular-value ratio that falls below ``epsilon``.

    Returns the smallest ``k >= 1`` with ``S[k] / S[k-1] < epsilon``, or
    ``len(S)`` if there is no such drop, or 0 if ``S[0] <= floor``. Values
    ``S[k] <= floor`` also count as a drop.
    """
    S = np.asarray(S, dtype=float).reshape(-1)
    if S.size == 0:
        raise InputError("singular values are empty")
    if not 0 < epsilon < 1:
        raise InputError(f"epsilon must lie in (0, 1), got {epsilon}")
    if np.any(S < 0) or np.any(np.diff(S) > 1e-12 * max(S[0], 1.0)):
        raise InputError("singular values must be nonnegative and sorted descending")
    if S[0] <= floor:
        return 0
    for k in range(1, S.size):
        if S[k] <= floor or S[k] / S[k - 1] < epsilon:
            return k
    return int(S.size)


def hessenberg(A) -> tuple[np.ndarray, np.ndarray]:
    """Householder reduction ``A = Q @ H @ Q.conj().T`` with ``H`` upper Hessenberg."""
    H = np.array(A, dtype=complex)
    n = H.shape[0]
    Q = np.eye(n, dtype=complex)
    for k in range(n - 2):
        x = H[k + 1:, k]
        nx = np.linalg.norm(x)
        if nx == 0.0:
            continue
        v = x.copy()
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v[0] += phase * nx
        v /= np.linalg.norm(v)
        H[k + 1:, :] -= 2.0 * np.outer(v, v.conj() @ H[k + 1:, :])
        H[:, k + 1:] -= 2.0 * np.outer(H[:, k + 1:] @ v, v.conj())
        Q[:, k + 1:] -= 2.0 * np.outer(Q[:, k + 1:] @ v, v.conj())
        H[k + 2:, k] = 0.0
    return H, Q


def _givens(a: complex, b: complex) -> tuple[float, complex, float]:
    """Rotation ``G = [[c, s], [-conj(s), c]]`` with ``G @ [a, b] = [r, 0]``."""
    if b == 0:
        return 1.0, 0j, abs(a)
    if a == 0:
        return 0.0, np.conj(b) / abs(b), abs(b)
    na, nb = abs(a), abs(b)
    r = np.hypot(na, nb)
    c = na / r
    s = (a / na) * np.conj(b) / r
    return c, s, r


def schur(A, max_iter: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Complex Schur form ``A = Z @ T @ Z.conj().T`` by shifted QR iterations."""
    H, Z = hessenberg(A)
    n = H.shape[0]
    if max_iter is None:
        max_iter = 500 * max(n, 1)
    hi = n - 1
    total = 0
    since_deflation = 0
    while hi > 0:
        # locate the start of the trailing unreduced block
        lo = hi
        while lo > 0:
            scale = abs(H[lo, lo]) + abs(H[lo - 1, lo - 1])
            if scale == 0.0:
                scale = np.linalg.norm(H[: hi + 1, : hi + 1], 1)
            if abs(H[lo, lo - 1]) <= EPS * scale:
                H[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            hi -= 1
            since_deflation = 0
            continue
        total += 1
        since_deflation += 1
        if total > max_iter:
            raise NumericalError(f"QR iteration did not converge after {max_iter} steps")
        if since_deflation % 11 == 0:
            mu = H[hi, hi] + 0.75 * abs(H[hi, hi - 1])
        else:
            a, b = H[hi - 1, hi - 1], H[hi - 1, hi]
            c, d = H[hi, hi - 1], H[hi, hi]
            tr = a + d
            det = a * d - b * c
            disc = np.sqrt(tr * tr / 4 - det)
            l1, l2 = tr / 2 + disc, tr / 2 - disc
            mu = l1 if abs(l1 - d) < abs(l2 - d) else l2
        x, y = H[lo, lo] - mu, H[lo + 1, lo]
        for k in range(lo, hi):
            c, s, _ = _givens(x, y)
            G = np.array([[c, s], [-np.conj(s), c]])
            H[k:k + 2, :] = G @ H[k:k + 2, :]
            H[:, k:k + 2] = H[:, k:k + 2] @ G.conj().T
            Z[:, k:k + 2] = Z[:, k:k + 2] @ G.conj().T
            if k > lo:
                H[k + 1, k - 1] = 0.0
            if k < hi - 1:
                x, y = H[k + 1, k], H[k + 2, k]
    return np.triu(H), Z


def eig_general(A) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and unit-norm eigenvectors of a general complex matrix.

    Returns:
        ``(w, V)`` with ``A @ V[:, i] ~= w[i] * V[:, i]``.

    Raises:
        NumericalError: if the QR iteration does not converge.
    """
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InputError("eig_general needs a square matrix")
    n = A.shape[0]
    if n == 0:
        return np.zeros(0, dtype=complex), np.zeros((0, 0), dtype=complex)
    T, Z = schur(A)
    w = np.diag(T).copy()
    small = EPS * max(np.linalg.norm(T, 1), np.finfo(float).tiny)
    X = np.zeros((n, n), dtype=complex)
    for k in range(n):
        x = np.zeros(n, dtype=complex)
        x[k] = 1.0
        if k > 0:
            D = T[:k, :k] - w[k] * np.eye(k)
            diag = np.diag(D).copy()
            tiny = np.abs(diag) < small
            diag[tiny] = small
            D[np.diag_indices(k)] = diag
            x[:k] = sla.solve_triangular(D, -T[:k, k])
        X[:, k] = x
    V = Z @ X
    V /= np.linalg.norm(V, axis=0)
    return w, V


def eigh(A) -> tuple[np.ndarray, np.ndarray]:
    """Hermitian eigendecomposition with ascending eigenvalues (LAPACK)."""
    A = np.asarray(A)
    return sla.eigh(A)


def solve(A, b, cond_limit: float = 1e12) -> np.ndarray:
    """Solve ``A x = b`` (square) or the least-squares problem (overdetermined).

    Emits :class:`IllConditionedWarning` when the condition estimate exceeds
    ``cond_limit``.

    Raises:
        SolveError: if ``A`` is exactly singular.
    """
    A = np.asarray(A)
    b = np.asarray(b)
    if A.ndim != 2 or A.shape[0] < A.shape[1]:
        raise InputError("solve needs a square or tall matrix")
    if A.shape[0] != b.shape[0]:
        raise InputError("right-hand side length does not match")
    if A.shape[0] == A.shape[1]:
        lu, piv = sla.lu_factor(A, check_finite=True)
        if np.any(np.diag(lu) == 0):
            raise SolveError("matrix is exactly singular")
        x = sla.lu_solve((lu, piv), b)
        cond = np.linalg.cond(A)
    else:
        Q, R = np.linalg.qr(A)
        if np.any(np.diag(R) == 0):
            raise SolveError("matrix has exactly dependent columns")
        x = sla.solve_triangular(R, Q.conj().T @ b)
        cond = np.linalg.cond(R)
    if not np.isfinite(cond) or cond > cond_limit:
        warnings.warn(f"condition estimate {cond:.2e} exceeds {cond_limit:.0e}", IllConditionedWarning, stacklevel=2)
    return x
