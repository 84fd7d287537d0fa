"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``."""

import numpy as np


def jacobi_sweeps(W: np.ndarray, Vt: np.ndarray, tol: float, max_sweeps: int) -> int:
    """One-sided Jacobi orthogonalisation of the rows of ``W`` in place.

    Returns the number of sweeps used, or -1 when ``max_sweeps`` is exhausted.
    """
    n = W.shape[0]
    # columns below this norm are numerically zero and are left alone
    negligible = (tol * np.linalg.norm(W)) ** 2
    for sweep in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                wp, wq = W[p], W[q]
                alpha = np.vdot(wp, wp).real
                beta = np.vdot(wq, wq).real
                gamma = np.vdot(wp, wq)
                g = abs(gamma)
                if alpha <= negligible or beta <= negligible:
                    continue
                if g == 0.0 or g <= tol * np.sqrt(alpha) * np.sqrt(beta):
                    continue
                rotated = True
                e = gamma / g
                zeta = (beta - alpha) / (2.0 * g)
                if zeta >= 0:
                    t = 1.0 / (zeta + np.sqrt(1.0 + zeta * zeta))
                else:
                    t = -1.0 / (-zeta + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                ec = np.conj(e)
                for A in (W, Vt):
                    ap = A[p].copy()
                    aq = A[q] * ec
                    A[p] = c * ap - s * aq
                    A[q] = s * ap + c * aq
        if not rotated:
            return sweep + 1
    return -1


def schur_accumulate(M, rows, cols, params, coefs, X, W) -> None:
    """Add ``tr(F_i X F_j W)`` for one block to ``M[i, j]``."""
    order = np.argsort(params, kind="stable")
    sorted_params = params[order]
    bounds = np.flatnonzero(np.diff(sorted_params)) + 1
    starts = np.concatenate([[0], bounds])
    stops = np.concatenate([bounds, [len(order)]])
    m = M.shape[0]
    for lo, hi in zip(starts, stops):
        if lo == hi:
            continue
        idx = order[lo:hi]
        i = sorted_params[lo]
        G = X[cols[idx], :].T @ (coefs[idx, None] * W[:, rows[idx]].T)
        M[i] += np.bincount(params, weights=coefs * G[rows, cols], minlength=m)
