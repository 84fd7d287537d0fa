"""l1-minimisation linear programs and a dense revised simplex solver.

Both programs look for the sparsest real coefficient vector consistent with
the evaluations, relaxed to minimising ``sum |x_beta|``. The rigorous
program uses evaluations on the torus, where each complex equality is split
into a real row followed by an imaginary row. Large candidate sets are
handled by column generation with implicit pricing of the dual polynomial.
"""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg as sla

from .core import BasePoint, EvaluationOracle, SparsePolynomial, as_index, is_canonical
from .errors import InputError, NotApplicableError, SolveError
from .moments import MomentSequence, natural_index_array
from .recover import WEIGHT_FLOOR

OPTIMAL = "Optimal"
INFEASIBLE = "Infeasible"
UNBOUNDED = "Unbounded"
ITER_LIMIT = "IterLimit"

FEAS_TOL = 1e-9
OPT_TOL = 1e-9
PIVOT_TOL = 1e-8
HARRIS_TOL = 1e-9
SMALL_PIVOT = 1e-6
REFACTOR_EVERY = 50
STALL_LIMIT = 50
DEVEX_RESET = 1e6
MAX_MATRIX_ENTRIES = 10 ** 8


@dataclass
class LinearProgram:
    """``min c @ x`` subject to ``A_eq x = b_eq``, ``A_ub x <= b_ub`` and bounds.

    Attributes:
        objective: Cost vector ``c``.
        A_eq: Equality matrix, one row per real constraint.
        b_eq: Equality right-hand side.
        A_ub: Optional inequality matrix.
        b_ub: Optional inequality right-hand side.
        free: Boolean mask of free variables; the rest are nonnegative.
    """

    objective: np.ndarray
    A_eq: np.ndarray
    b_eq: np.ndarray
    A_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    free: np.ndarray | None = None

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float).reshape(-1)
        nv = self.objective.size
        self.A_eq = np.asarray(self.A_eq, dtype=float).reshape(-1, nv)
        self.b_eq = np.asarray(self.b_eq, dtype=float).reshape(-1)
        if self.A_eq.shape[0] != self.b_eq.size:
            raise InputError("A_eq and b_eq have inconsistent sizes")
        if self.A_ub is None:
            self.A_ub = np.zeros((0, nv))
            self.b_ub = np.zeros(0)
        self.A_ub = np.asarray(self.A_ub, dtype=float).reshape(-1, nv)
        self.b_ub = np.asarray(self.b_ub, dtype=float).reshape(-1)
        if self.A_ub.shape[0] != self.b_ub.size:
            raise InputError("A_ub and b_ub have inconsistent sizes")
        self.free = np.zeros(nv, dtype=bool) if self.free is None else np.asarray(self.free, dtype=bool)
        if self.free.size != nv:
            raise InputError("free mask has the wrong length")

    @property
    def n_vars(self) -> int:
        return self.objective.size


@dataclass
class LpSolution:
    """Result of :func:`solve_lp`.

    ``dual`` holds one multiplier per equality row followed by one per
    inequality row, with the sign convention ``c - A^T dual >= 0`` on the
    nonnegative variables. When the status is Infeasible it holds a Farkas
    ray from phase one instead.
    """

    status: str
    primal: np.ndarray
    dual: np.ndarray
    objective_value: float
    dual_objective: float = float("nan")
    iterations: int = 0
    primal_residual: float = float("nan")
    row_points: np.ndarray | None = None
    row_parts: list[str] | None = None
    row_weights: np.ndarray | None = None
    meta: dict = field(default_factory=dict)


class _Simplex:
    """Revised simplex on ``min c x, A x = b, x >= 0`` with an explicit basis inverse.

    Degeneracy is broken by shifting each lower bound to a tiny random
    negative value, i.e. solving with ``b + A @ eps``. This keeps consistent
    systems consistent. When the minimum-ratio pivot is tiny, a Harris ratio
    test picks a larger one and may overshoot by up to ``HARRIS_TOL``; such
    basics get a further bound shift. The original
    right-hand side is restored on the final basis.

    Columns can be appended between calls to :meth:`solve`; the current basis
    stays feasible, so column generation resumes instead of restarting.
    Artificial columns occupy the first ``m`` positions. ``unit_columns``
    optionally names, per row, a column of ``A`` equal to that unit vector
    (a slack, or -1 for none), used as the starting basic variable when
    possible.
    """

    def __init__(self, A, b, c, max_iter, perturbation=1e-7, seed=20240101, unit_columns=None):
        self.m = A.shape[0]
        m = self.m
        eps = np.random.default_rng(seed).uniform(0.5, 1.0, A.shape[1]) * perturbation
        b_shift = b + A @ eps
        self.sign = np.where(b_shift < 0, -1.0, 1.0)
        self.Afull = np.hstack([np.eye(m), A * self.sign[:, None]])
        self.cost = np.concatenate([np.zeros(m), np.asarray(c, dtype=float)])
        self.b = b_shift * self.sign
        self.b_orig = b * self.sign
        self.max_iter = max_iter
        self.iterations = 0
        self.basis = np.arange(m)
        self.Binv = np.eye(m)
        self.xB = self.b.copy()
        self.feasible = False
        if unit_columns is not None:
            # crash: column unit_columns[i] of A is e_i; it replaces artificial i
            # whenever the row kept its sign, leaving the basis matrix the identity
            for i, j in enumerate(unit_columns):
                if j >= 0 and self.sign[i] > 0:
                    self.basis[i] = m + j

    @property
    def n(self) -> int:
        return self.Afull.shape[1] - self.m

    def add_columns(self, A_new, c_new) -> None:
        """Append structural columns (unshifted, so the basis stays feasible)."""
        self.Afull = np.hstack([self.Afull, np.asarray(A_new, dtype=float) * self.sign[:, None]])
        self.cost = np.concatenate([self.cost, np.asarray(c_new, dtype=float)])

    def _refactor(self):
        B = self.Afull[:, self.basis]
        lu = sla.lu_factor(B, check_finite=False)
        diag = np.abs(np.diag(lu[0]))
        if diag.min(initial=1.0) <= 1e-14 * max(1.0, diag.max(initial=1.0)):
            raise SolveError("simplex basis became singular")
        self.Binv = sla.lu_solve(lu, np.eye(self.m))
        self.xB = self.Binv @ self.b

    def run(self, cost, allowed):
        """Optimise ``cost`` from the current basis; ``allowed`` masks enterable columns."""
        stall = 0
        bland = False
        best = np.inf
        since = 0
        ref = np.ones(self.Afull.shape[1])
        while True:
            if self.iterations >= self.max_iter:
                return ITER_LIMIT
            if since >= REFACTOR_EVERY:
                self._refactor()
                since = 0
            y = cost[self.basis] @ self.Binv
            d = cost - y @ self.Afull
            d[self.basis] = 0.0
            scale = 1.0 + np.abs(cost).max(initial=0.0)
            candidates = allowed & (d < -OPT_TOL * scale)
            if not candidates.any():
                return OPTIMAL
            if bland:
                j = int(np.flatnonzero(candidates)[0])
            else:
                j = int(np.argmax(np.where(candidates, d * d / ref, -1.0)))
            u = self.Binv @ self.Afull[:, j]
            pos = u > PIVOT_TOL * max(1.0, np.abs(u).max())
            if not pos.any():
                return UNBOUNDED
            xb = np.maximum(self.xB, 0.0)
            ok = np.flatnonzero(pos)
            ratios = xb[ok] / u[ok]
            ties = ok[ratios <= ratios.min() * (1.0 + 1e-12)]
            if u[ties].max() < SMALL_PIVOT * np.abs(u).max():
                # Harris two-pass: accept rows within the feasibility tolerance
                # of the minimum ratio so a tiny pivot can be avoided
                theta_max = ((xb[ok] + HARRIS_TOL) / u[ok]).min()
                ties = ok[ratios <= theta_max]
            if bland:
                i = int(ties[np.argmin(self.basis[ties])])
            else:
                i = int(ties[np.argmax(u[ties])])
            # Devex reference weights
            alpha_row = (self.Binv[i] @ self.Afull) / u[i]
            wq = ref[j]
            ref = np.maximum(ref, alpha_row * alpha_row * wq)
            ref[self.basis[i]] = max(wq / (u[i] * u[i]), 1.0)
            if ref.max() > DEVEX_RESET:
                ref[:] = 1.0
            self._pivot(i, j, u)
            self.iterations += 1
            since += 1
            obj = float(cost[self.basis] @ self.xB)
            if obj < best - 1e-14 * (1.0 + abs(obj)):
                best = obj
                stall = 0
                bland = False
            else:
                stall += 1
                if stall >= STALL_LIMIT:
                    bland = True

    def _pivot(self, i, j, u):
        theta = max(self.xB[i], 0.0) / u[i]
        self.xB -= theta * u
        self.xB[i] = theta
        row = self.Binv[i] / u[i]
        self.Binv -= np.outer(u, row)
        self.Binv[i] = row
        self.basis[i] = j
        # basics pushed below zero by the Harris step get their lower bound
        # shifted down, which amounts to moving b along their columns
        neg = np.flatnonzero(self.xB < 0.0)
        if neg.size:
            self.b += self.Afull[:, self.basis[neg]] @ -self.xB[neg]
            self.xB[neg] = 0.0

    def solve(self):
        """Returns ``(status, x, y)``; ``y`` is a Farkas ray when infeasible."""
        m = self.m
        allowed = np.ones(self.Afull.shape[1], dtype=bool)
        allowed[:m] = False
        if not self.feasible:
            phase1 = np.zeros(self.Afull.shape[1])
            phase1[:m] = 1.0
            status = self.run(phase1, allowed)
            if status == ITER_LIMIT:
                return ITER_LIMIT, None, None
            self._refactor()
            infeas = float(phase1[self.basis] @ self.xB)
            if infeas > FEAS_TOL * (1.0 + np.abs(self.b).max(initial=0.0)):
                farkas = (phase1[self.basis] @ self.Binv) * self.sign
                return INFEASIBLE, None, farkas
            self._drive_out_artificials()
            self.feasible = True
        status = self.run(self.cost, allowed)
        self._refactor()
        y = (self.cost[self.basis] @ self.Binv) * self.sign
        x = np.zeros(self.Afull.shape[1])
        x[self.basis] = self.Binv @ self.b_orig
        return status, x[m:], y

    def _drive_out_artificials(self):
        m = self.m
        for i in range(m):
            if self.basis[i] >= m:
                continue
            row = self.Binv[i] @ self.Afull
            row[:m] = 0.0
            row[self.basis] = 0.0
            j = int(np.argmax(np.abs(row)))
            if abs(row[j]) > 1e-9:
                u = self.Binv @ self.Afull[:, j]
                self._pivot(i, j, u)
        self._refactor()


def solve_lp(lp: LinearProgram, max_iter: int = 50000) -> LpSolution:
    """Solve a linear program with a two-phase dense revised simplex method.

    Pricing uses Devex reference weights; after a run of degenerate pivots the solver
    switches to Bland's rule until the objective improves again.
    """
    nv = lp.n_vars
    me, mu = lp.A_eq.shape[0], lp.A_ub.shape[0]
    # standard form columns: x (nonneg part), -x for free vars, slacks
    free_idx = np.flatnonzero(lp.free)
    A_top = np.hstack([lp.A_eq, -lp.A_eq[:, free_idx], np.zeros((me, mu))])
    A_bot = np.hstack([lp.A_ub, -lp.A_ub[:, free_idx], np.eye(mu)])
    A = np.vstack([A_top, A_bot])
    b = np.concatenate([lp.b_eq, lp.b_ub])
    c = np.concatenate([lp.objective, -lp.objective[free_idx], np.zeros(mu)])
    unit = np.concatenate([np.full(me, -1), nv + free_idx.size + np.arange(mu)])
    solver = _Simplex(A, b, c, max_iter, unit_columns=unit)
    status, xs, y = solver.solve()
    if xs is None:
        dual = y if y is not None else np.zeros(me + mu)
        return LpSolution(status, np.full(nv, np.nan), dual, float("nan"), iterations=solver.iterations)
    x = xs[:nv].copy()
    x[free_idx] -= xs[nv:nv + free_idx.size]
    obj = float(lp.objective @ x)
    dual_obj = float(b @ y)
    res_eq = lp.A_eq @ x - lp.b_eq
    res_ub = np.maximum(lp.A_ub @ x - lp.b_ub, 0.0)
    bound_violation = np.maximum(-x[~lp.free], 0.0)
    residual = float(np.abs(np.concatenate([res_eq, res_ub, bound_violation])).max(initial=0.0))
    return LpSolution(status, x, y, obj, dual_obj, solver.iterations, residual)


def _angles(phi: BasePoint) -> np.ndarray:
    if phi.scheme == "roots_of_unity":
        return 2.0 * np.pi / np.array(phi.orders, dtype=float)
    if phi.scheme == "integer_angles":
        return np.array(phi.angles, dtype=float)
    raise InputError("the rigorous program needs a torus base point")


class _TorusRows:
    """Real rows ``Re`` / ``Im`` of ``(phi**beta)**alpha`` for a list of evaluations."""

    def __init__(self, alphas: np.ndarray, phi: BasePoint):
        self.alphas = alphas
        self.theta_alpha = alphas * _angles(phi)[None, :]
        zero = ~alphas.any(axis=1)
        parts, owners = [], []
        for k, z in enumerate(zero):
            parts.append("re")
            owners.append(k)
            if not z:
                parts.append("im")
                owners.append(k)
        self.parts = parts
        self.owners = np.array(owners)
        self.is_im = np.array([p == "im" for p in parts])

    @property
    def n_rows(self) -> int:
        return len(self.parts)

    def block(self, betas: np.ndarray) -> np.ndarray:
        E = np.exp(1j * (self.theta_alpha @ betas.T))
        rows = E[self.owners]
        return np.where(self.is_im[:, None], rows.imag, rows.real)

    def rhs(self, values: np.ndarray) -> np.ndarray:
        v = values[self.owners]
        return np.where(self.is_im, v.imag, v.real)

    def price(self, weights: np.ndarray, betas: np.ndarray, chunk: int = 4096) -> np.ndarray:
        """``sum_k weights[k] * row_k(beta)`` for every candidate ``beta``."""
        coef = np.zeros(self.alphas.shape[0], dtype=complex)
        np.add.at(coef, self.owners[~self.is_im], weights[~self.is_im])
        np.add.at(coef, self.owners[self.is_im], -1j * weights[self.is_im])
        out = np.empty(betas.shape[0])
        for lo in range(0, betas.shape[0], chunk):
            E = np.exp(1j * (betas[lo:lo + chunk] @ self.theta_alpha.T))
            out[lo:lo + chunk] = (E @ coef).real
        return out


def _l1_program(block: np.ndarray, rhs: np.ndarray, noise_box: float | None) -> LinearProgram:
    k = block.shape[1]
    A = np.hstack([block, -block])
    c = np.ones(2 * k)
    if noise_box is None:
        return LinearProgram(c, A, rhs)
    A_ub = np.vstack([A, -A])
    b_ub = np.concatenate([rhs + noise_box, -rhs + noise_box])
    return LinearProgram(c, np.zeros((0, 2 * k)), np.zeros(0), A_ub, b_ub)


def _row_weights(sol: LpSolution, n_rows: int, noise_box: float | None) -> np.ndarray:
    if noise_box is None:
        return sol.dual[:n_rows]
    return sol.dual[:n_rows] - sol.dual[n_rows:2 * n_rows]


def candidate_exponents(n: int, degree_bound: int, kind: str = "simplex") -> np.ndarray:
    """Candidate exponents: ``|beta|_1 <= D`` (simplex) or ``[0..D]^n`` (box)."""
    if kind == "simplex":
        return natural_index_array(n, degree_bound)
    if kind == "box":
        grids = np.meshgrid(*[np.arange(degree_bound + 1)] * n, indexing="ij")
        return np.stack([g.reshape(-1) for g in grids], axis=1)
    raise InputError(f"unknown candidate set {kind!r}")


def rigorous_lp(seq: MomentSequence, phi: BasePoint, grid_bound: int,
                noise_box: float | None = None, alphas: Sequence[Sequence[int]] | None = None,
                candidates: str = "simplex", max_entries: int = MAX_MATRIX_ENTRIES,
                direct_limit: int = 1000, return_solution: bool = False):
    """Minimum l1-norm polynomial matching torus evaluations.

    Args:
        seq: Evaluations ``sigma_alpha = g(phi**alpha)``.
        phi: Torus base point.
        grid_bound: Degree bound ``D`` of the candidate exponents.
        noise_box: If set, each real and imaginary residual may deviate by
            this much instead of vanishing.
        alphas: Evaluation indices to use; defaults to the canonical indices
            stored in ``seq``.
        candidates: ``"simplex"`` for ``|beta|_1 <= D`` or ``"box"`` for
            ``[0..D]^n``.
        max_entries: Size guard on ``rows x candidates``.
        direct_limit: Candidate count above which column generation is used.
        return_solution: Also return the :class:`LpSolution`.

    Raises:
        NotApplicableError: if the constraint matrix exceeds ``max_entries``.
        SolveError: if the solver does not reach optimality.
    """
    n = seq.dimension
    if alphas is None:
        alphas = sorted((a for a in seq.values if is_canonical(a)), key=lambda a: (sum(map(abs, a)), a))
    alphas = np.array([as_index(a) for a in alphas], dtype=np.int64).reshape(-1, n)
    values = seq.vector([tuple(a) for a in alphas])
    rows = _TorusRows(alphas, phi)
    betas = candidate_exponents(n, grid_bound, candidates)
    if rows.n_rows * betas.shape[0] > max_entries:
        raise NotApplicableError(
            f"N. A.: {rows.n_rows} rows x {betas.shape[0]} candidates exceeds {max_entries:.0e} entries"
        )
    rhs = rows.rhs(values)
    if betas.shape[0] <= direct_limit:
        chosen = np.arange(betas.shape[0])
        sol = solve_lp(_l1_program(rows.block(betas), rhs, noise_box))
    else:
        chosen, sol = _column_generation(rows, betas, rhs, noise_box)
    if sol.status != OPTIMAL:
        raise SolveError(f"rigorous LP ended with status {sol.status}")
    k = chosen.size
    x = sol.primal[:k] - sol.primal[k:]
    terms = {tuple(betas[chosen[i]]): x[i] for i in range(k) if abs(x[i]) >= WEIGHT_FLOOR}
    g_hat = SparsePolynomial(n, terms)
    if noise_box is None:
        block = rows.block(betas[chosen])
        audit = float(np.abs(block @ x - rhs).max(initial=0.0))
        if audit > 1e-6 * (1.0 + np.abs(rhs).max(initial=0.0)):
            warnings.warn(f"rigorous LP residual audit failed ({audit:.2e})", stacklevel=2)
        sol.meta["audit_residual"] = audit
    sol.row_points = np.array([phi.power(a) for a in alphas])[rows.owners]
    sol.row_parts = rows.parts
    sol.row_weights = _row_weights(sol, rows.n_rows, noise_box)
    sol.meta["candidates"] = betas[chosen]
    if return_solution:
        return g_hat, sol
    return g_hat


class _L1Master:
    """Restricted l1 program over a growing candidate set, solved warm."""

    def __init__(self, rows: _TorusRows, betas: np.ndarray, rhs: np.ndarray,
                 noise_box: float | None, seed: np.ndarray, max_iter: int = 50000):
        self.rows = rows
        self.betas = betas
        self.noise_box = noise_box
        self.chosen: list[int] = []
        m = rows.n_rows
        if noise_box is None:
            b = rhs
            A, c = np.zeros((m, 0)), np.zeros(0)
            self.offset = 0
        else:
            b = np.concatenate([rhs + noise_box, -rhs + noise_box])
            A, c = np.eye(2 * m), np.zeros(2 * m)
            self.offset = 2 * m
        self.rhs = b
        A_seed, c_seed = self._columns(seed)
        unit = None if noise_box is None else np.arange(2 * m)
        self.solver = _Simplex(np.hstack([A, A_seed]), b, np.concatenate([c, c_seed]), max_iter,
                               unit_columns=unit)
        self.chosen.extend(int(j) for j in seed)
        self.batches = [len(seed)]

    def _columns(self, idx):
        B = self.rows.block(self.betas[idx])
        A = np.hstack([B, -B])
        if self.noise_box is not None:
            A = np.vstack([A, -A])
        return A, np.ones(A.shape[1])

    def add(self, idx) -> None:
        A, c = self._columns(idx)
        self.solver.add_columns(A, c)
        self.chosen.extend(int(j) for j in idx)
        self.batches.append(len(idx))

    def solve(self) -> LpSolution:
        status, xs, y = self.solver.solve()
        m = self.rows.n_rows
        if xs is None:
            return LpSolution(status, np.full(0, np.nan), y, float("nan"), iterations=self.solver.iterations)
        # structural columns come in batches [B, -B]; regroup as [x+ ..., x- ...]
        plus, minus = [], []
        pos = self.offset
        for size in self.batches:
            plus.append(xs[pos:pos + size])
            minus.append(xs[pos + size:pos + 2 * size])
            pos += 2 * size
        primal = np.concatenate(plus + minus)
        x = primal[: len(primal) // 2] - primal[len(primal) // 2:]
        block = self.rows.block(self.betas[self.chosen])
        if self.noise_box is None:
            residual = np.abs(block @ x - self.rhs)
        else:
            residual = np.maximum(np.abs(block @ x - self.rhs[:m]) - self.noise_box, 0.0)
        residual = np.concatenate([residual, np.maximum(-primal, 0.0)])
        obj = float(primal.sum())
        return LpSolution(status, primal, y, obj, float(self.rhs @ y), self.solver.iterations,
                          float(residual.max(initial=0.0)))


def _column_generation(rows: _TorusRows, betas: np.ndarray, rhs: np.ndarray,
                       noise_box: float | None, batch: int | None = None, max_rounds: int = 500):
    m = rows.n_rows
    # smaller batches keep the restricted masters cheap; the box rows double
    # the master size, so noisy programs use half the noiseless batch
    batch = batch or max(m // (2 if noise_box is None else 4), 20)
    # seed the restricted problem with the candidates best correlated with the data
    score = np.abs(rows.price(rhs, betas))
    seed = np.sort(np.argsort(-score, kind="stable")[: batch])
    master = _L1Master(rows, betas, rhs, noise_box, seed)
    in_master = np.zeros(betas.shape[0], dtype=bool)
    in_master[seed] = True
    sol = None
    for _ in range(max_rounds):
        sol = master.solve()
        if sol.status == INFEASIBLE:
            weights = _row_weights(sol, m, noise_box)
            violation = np.abs(rows.price(weights, betas)) - 1e-9 * (1.0 + np.abs(weights).max())
        elif sol.status == OPTIMAL:
            weights = _row_weights(sol, m, noise_box)
            violation = np.abs(rows.price(weights, betas)) - (1.0 + 1e-9)
        else:
            break
        violation[in_master] = -np.inf
        fresh = np.flatnonzero(violation > 0)
        if fresh.size == 0:
            break
        fresh = np.sort(fresh[np.argsort(-violation[fresh], kind="stable")[:batch]])
        master.add(fresh)
        in_master[fresh] = True
    return np.array(master.chosen, dtype=np.int64), sol


def naive_lp(oracle: EvaluationOracle, points: Sequence[Sequence[float]], degree_bound: int,
             return_solution: bool = False):
    """Minimum l1-norm polynomial matching evaluations at arbitrary real points.

    The candidate monomials are all ``x**alpha`` with ``|alpha|_1 <= degree_bound``.
    """
    n = oracle.dimension
    Z = np.asarray(points, dtype=float).reshape(-1, n)
    alphas = natural_index_array(n, degree_bound)
    block = np.prod(Z[:, None, :] ** alphas[None, :, :], axis=2)
    rhs = np.array([oracle.evaluate(z).real for z in Z])
    sol = solve_lp(_l1_program(block, rhs, None))
    if sol.status != OPTIMAL:
        raise SolveError(f"naive LP ended with status {sol.status}")
    k = alphas.shape[0]
    x = sol.primal[:k] - sol.primal[k:]
    g_hat = SparsePolynomial(n, {tuple(alphas[i]): x[i] for i in range(k) if abs(x[i]) >= WEIGHT_FLOOR})
    sol.row_points = Z.astype(complex)
    sol.row_parts = ["real"] * Z.shape[0]
    sol.row_weights = sol.dual[: Z.shape[0]]
    sol.meta["candidates"] = alphas
    if return_solution:
        return g_hat, sol
    return g_hat


def dual_certificate(sol: LpSolution, phi: BasePoint | None, alpha_range) -> dict:
    """Dual polynomial ``m(alpha) = sum_k lambda_k part_k(zeta_k**alpha)``.

    ``zeta_k`` is the evaluation point of row ``k`` and ``part_k`` takes the
    real or imaginary part as recorded when the program was built.
    """
    alphas = np.array([as_index(a) for a in alpha_range], dtype=np.int64)
    if sol.row_points is None or sol.row_weights is None:
        raise InputError("solution carries no row description")
    if alphas.size == 0:
        return {}
    logs = np.log(sol.row_points.astype(complex))
    powers = np.exp(alphas @ logs.T)
    is_im = np.array([p == "im" for p in sol.row_parts])
    vals = np.where(is_im[None, :], powers.imag, powers.real) @ sol.row_weights
    return {tuple(a): float(v) for a, v in zip(alphas, vals)}


def certificate_csv(cert: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["alpha", "value"])
    for alpha, value in cert.items():
        writer.writerow([" ".join(str(a) for a in alpha), f"{value:.12g}"])
    return buf.getvalue()
