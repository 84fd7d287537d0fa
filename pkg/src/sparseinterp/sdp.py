"""Total-variation hierarchy on the torus and a dense primal-dual SDP solver.

Each relaxation step minimises ``y+_0 + y-_0`` over two moment sequences
whose Toeplitz matrices ``T_d(y+)`` and ``T_d(y-)`` are positive semidefinite
and whose difference reproduces the observed moments. The decision
variables are the real and imaginary parts of one representative ``y_alpha``
per pair ``{alpha, -alpha}``, so the Toeplitz and Hermitian structure holds
by construction.

The solver works on the form

    minimise c^T x  subject to  F(x) = F0 + sum_i x_i F_i >= 0,  A x = b,

with block-diagonal real symmetric ``F_i`` stored as coordinate lists.
Equalities are eliminated before the interior-point iterations.
"""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from . import kernels
from .core import AtomicMeasure, BasePoint, EvaluationOracle, MultiIndex, canonical
from .errors import ExtractionWarning, InputError, NumericalError, SolveError
from .linalg import numerical_rank
from .moments import (
    IndexScheme,
    MomentSequence,
    collect_moments,
    natural_indices,
    signed_indices,
)
from .prony import PronyConfig, moment_residual, toeplitz_prony

OPTIMAL = "Optimal"
ITER_LIMIT = "IterLimit"

NOISE_RADIUS = 0.1 * np.sqrt(2.0)
MAX_ITER = 200
STEP_FRACTION = 0.95
AUDIT_TOL = 1e-5
# consecutive singular-value ratio separating the support from solver noise
SDP_RANK_RATIO = 1e-5


@dataclass
class SdpBlock:
    """One real symmetric block of ``F(x)``.

    ``var[k], row[k], col[k], val[k]`` says that ``F_var`` has ``val`` at
    ``(row, col)``. Both triangles are listed, so the lists describe full
    symmetric matrices.
    """

    size: int
    var: np.ndarray
    row: np.ndarray
    col: np.ndarray
    val: np.ndarray
    constant: np.ndarray

    def __post_init__(self):
        self.var = np.ascontiguousarray(self.var, dtype=np.int32)
        self.row = np.ascontiguousarray(self.row, dtype=np.int32)
        self.col = np.ascontiguousarray(self.col, dtype=np.int32)
        self.val = np.ascontiguousarray(self.val, dtype=np.float64)
        self.constant = np.asarray(self.constant, dtype=np.float64).reshape(self.size, self.size)

    def operator(self, n_vars: int) -> sp.csr_matrix:
        """Sparse map ``x -> vec(F(x) - F0)`` (row-major vectorisation)."""
        return sp.csr_matrix(
            (self.val, (self.row.astype(np.int64) * self.size + self.col, self.var)),
            shape=(self.size * self.size, n_vars),
        )


@dataclass
class HierarchyLayout:
    """Where each ``y+_alpha`` and ``y-_alpha`` part lives in the variable vector."""

    dimension: int
    degree: int
    reps: list[MultiIndex]
    re_index: list[dict[MultiIndex, int]]
    im_index: list[dict[MultiIndex, int]]
    equalities: list[MultiIndex]
    noise_ball: float | None

    def sequences(self, x: np.ndarray, phi: BasePoint | None = None) -> tuple[MomentSequence, MomentSequence]:
        out = []
        for s in range(2):
            seq = MomentSequence(self.dimension, phi=phi)
            for a in self.reps:
                im = x[self.im_index[s][a]] if a in self.im_index[s] else 0.0
                seq.set(a, complex(x[self.re_index[s][a]], im))
            out.append(seq)
        return out[0], out[1]


@dataclass
class SdpProgram:
    """Real SDP instance ``min c x, F(x) >= 0, A x = b``.

    Attributes:
        n_vars: Number of scalar decision variables.
        objective: Cost vector ``c``.
        blocks: Block-diagonal pieces of ``F``.
        A_eq: Equality matrix (real rows).
        b_eq: Equality right-hand side.
        hermitian_sizes: Complex sizes of blocks that realify Hermitian
            matrices; realified blocks have twice this size.
        layout: Present for hierarchy steps.
    """

    n_vars: int
    objective: np.ndarray
    blocks: list[SdpBlock]
    A_eq: np.ndarray
    b_eq: np.ndarray
    hermitian_sizes: list[int] = field(default_factory=list)
    layout: HierarchyLayout | None = None

    @property
    def block_sizes(self) -> list[int]:
        return [b.size for b in self.blocks]

    @property
    def equality_count(self) -> int:
        """Complex equalities for hierarchy steps, real rows otherwise."""
        if self.layout is not None:
            return len(self.layout.equalities)
        return int(self.A_eq.shape[0])


@dataclass
class SdpSolution:
    """Result of :func:`solve_sdp`.

    ``y_plus`` and ``y_minus`` are filled for hierarchy steps. ``min_eigs``
    holds the smallest eigenvalue of each block of ``F(x)``.
    """

    status: str
    x: np.ndarray
    objective: float
    dual_objective: float
    duality_gap: float
    equality_residual: float
    min_eigs: list[float]
    iterations: int
    dual_blocks: list[np.ndarray]
    y_plus: MomentSequence | None = None
    y_minus: MomentSequence | None = None


def realify(H: np.ndarray) -> np.ndarray:
    """Real symmetric ``[[Re H, -Im H], [Im H, Re H]]`` of a Hermitian ``H``."""
    H = np.asarray(H, dtype=complex)
    return np.block([[H.real, -H.imag], [H.imag, H.real]])


def toeplitz_block(seq: MomentSequence, d: int) -> np.ndarray:
    """Hermitian ``T_d(y)[a, b] = y[a - b]`` over exponents of degree at most ``d``."""
    nat = natural_indices(seq.dimension, d)
    return np.array([[seq[tuple(x - z for x, z in zip(a, b))] for b in nat] for a in nat], dtype=complex)


def _toeplitz_entries(n: int, d: int, re_index, im_index, offset: int = 0):
    # coordinate lists of the realified Toeplitz block, one entry per (a, b, part)
    nat = natural_indices(n, d)
    m = len(nat)
    var, row, col, val = [], [], [], []
    for i, a in enumerate(nat):
        for j, b in enumerate(nat):
            delta = tuple(x - z for x, z in zip(a, b))
            rep = canonical(delta)
            sign = 1.0 if rep == delta else -1.0
            k = re_index[rep]
            var += [k, k]
            row += [i, m + i]
            col += [j, m + j]
            val += [1.0, 1.0]
            if rep in im_index:
                q = im_index[rep]
                var += [q, q]
                row += [m + i, i]
                col += [j, m + j]
                val += [sign, -sign]
    return var, row, col, val


def build_hierarchy_step(seq: MomentSequence, d: int, dfrak: int, scheme: IndexScheme,
                         noise_ball: float | None = None) -> SdpProgram:
    """Assemble the relaxation of order ``d`` with data on ``scheme`` at degree ``dfrak``.

    Args:
        seq: Observed moments; must cover the scheme's representatives.
        d: Relaxation order (Toeplitz blocks over exponents of degree ``<= d``).
        dfrak: Degree of the data scheme.
        scheme: Index scheme; only its kind is used, at degree ``dfrak``.
        noise_ball: If given, the equalities are replaced by the constraint
            that the mismatch vector has Euclidean norm at most this radius.
    """
    if d < dfrak:
        raise InputError(f"relaxation order {d} is below the data degree {dfrak}")
    if d < 0:
        raise InputError("relaxation order must be nonnegative")
    n = seq.dimension
    data = list(scheme.with_degree(dfrak).query_indices())
    reps = [a for a in signed_indices(n, d) if canonical(a) == a]
    rep_set = set(reps)
    for a in data:
        if a not in rep_set:
            raise InputError(f"data index {a} is outside the relaxation of order {d}")
    re_index: list[dict] = [{}, {}]
    im_index: list[dict] = [{}, {}]
    k = 0
    for s in range(2):
        for a in reps:
            re_index[s][a] = k
            k += 1
            if any(a):
                im_index[s][a] = k
                k += 1
    n_vars = k
    m = len(natural_indices(n, d))
    zero = (0,) * n
    c = np.zeros(n_vars)
    c[re_index[0][zero]] = 1.0
    c[re_index[1][zero]] = 1.0
    blocks = []
    for s in range(2):
        var, row, col, val = _toeplitz_entries(n, d, re_index[s], im_index[s])
        blocks.append(SdpBlock(2 * m, var, row, col, val, np.zeros((2 * m, 2 * m))))
    sigma = seq.vector(data)
    if noise_ball is None:
        rows = []
        rhs = []
        for a, v in zip(data, sigma):
            r = np.zeros(n_vars)
            r[re_index[0][a]], r[re_index[1][a]] = 1.0, -1.0
            rows.append(r)
            rhs.append(v.real)
            if a in im_index[0]:
                r = np.zeros(n_vars)
                r[im_index[0][a]], r[im_index[1][a]] = 1.0, -1.0
                rows.append(r)
                rhs.append(v.imag)
        A_eq = np.array(rows).reshape(-1, n_vars)
        b_eq = np.array(rhs)
        equalities = data
    else:
        if noise_ball <= 0:
            raise InputError("noise ball radius must be positive")
        blocks.append(_ball_block(data, sigma, re_index, im_index, noise_ball))
        A_eq = np.zeros((0, n_vars))
        b_eq = np.zeros(0)
        equalities = []
    layout = HierarchyLayout(n, d, reps, re_index, im_index, equalities, noise_ball)
    return SdpProgram(n_vars, c, blocks, A_eq, b_eq, [m, m], layout)


def _ball_block(data, sigma, re_index, im_index, radius):
    # [[r I, v], [v^T, r]] >= 0 with v the real and imaginary parts of y+ - y- - sigma
    K = 2 * len(data)
    size = K + 1
    F0 = radius * np.eye(size)
    var, row, col, val = [], [], [], []
    for i, (a, v) in enumerate(zip(data, sigma)):
        for slot, part, index in ((2 * i, v.real, re_index), (2 * i + 1, v.imag, im_index)):
            F0[slot, K] = F0[K, slot] = -part
            if a not in index[0]:
                continue
            for s, sgn in ((0, 1.0), (1, -1.0)):
                var += [index[s][a], index[s][a]]
                row += [slot, K]
                col += [K, slot]
                val += [sgn, sgn]
    return SdpBlock(size, var, row, col, val, F0)


def _eliminate(A: np.ndarray, b: np.ndarray, n_vars: int, tol: float = 1e-12):
    """Write ``x = x0 + T z`` on the solution set of ``A x = b``.

    Pivots prefer unit coefficients, so the usual ``y+ - y- = sigma`` rows
    eliminate one variable each without fill-in.
    """
    exprs: dict[int, tuple[dict[int, float], float]] = {}
    for r in range(A.shape[0]):
        row = {int(j): float(A[r, j]) for j in np.flatnonzero(A[r])}
        rhs = float(b[r])
        for j in [j for j in row if j in exprs]:
            coef = row.pop(j)
            terms, const = exprs[j]
            rhs -= coef * const
            for t, v in terms.items():
                row[t] = row.get(t, 0.0) - coef * v
        row = {j: v for j, v in row.items() if abs(v) > tol}
        if not row:
            if abs(rhs) > 1e-9 * (1.0 + abs(float(b[r]))):
                raise InputError("equality constraints are inconsistent")
            continue
        units = [j for j, v in row.items() if abs(abs(v) - 1.0) <= tol]
        p = max(units) if units else max(row, key=lambda j: abs(row[j]))
        a = row.pop(p)
        terms = {j: -v / a for j, v in row.items()}
        const = rhs / a
        exprs[p] = (terms, const)
        for q, (qt, qc) in exprs.items():
            if q != p and p in qt:
                coef = qt.pop(p)
                for t, v in terms.items():
                    qt[t] = qt.get(t, 0.0) + coef * v
                exprs[q] = (qt, qc + coef * const)
    free = [j for j in range(n_vars) if j not in exprs]
    pos = {j: i for i, j in enumerate(free)}
    x0 = np.zeros(n_vars)
    ti, tj, tv = [], [], []
    for j in free:
        ti.append(j)
        tj.append(pos[j])
        tv.append(1.0)
    for p, (terms, const) in exprs.items():
        x0[p] = const
        for t, v in terms.items():
            ti.append(p)
            tj.append(pos[t])
            tv.append(v)
    T = sp.csr_matrix((tv, (ti, tj)), shape=(n_vars, len(free)))
    return x0, T


def _reduce_block(block: SdpBlock, x0: np.ndarray, T: sp.csr_matrix) -> SdpBlock:
    F0 = block.constant.copy()
    np.add.at(F0, (block.row, block.col), block.val * x0[block.var])
    Tc = T.tocsr()
    counts = np.diff(Tc.indptr)[block.var]
    rep = np.repeat(np.arange(len(block.var)), counts)
    starts = Tc.indptr[block.var]
    offs = np.arange(len(rep)) - np.repeat(np.cumsum(counts) - counts, counts)
    src = np.repeat(starts, counts) + offs
    var = Tc.indices[src]
    val = block.val[rep] * Tc.data[src]
    # merge duplicates so each (var, row, col) appears once
    key = (var.astype(np.int64) * block.size + block.row[rep]) * block.size + block.col[rep]
    uniq, inv = np.unique(key, return_inverse=True)
    merged = np.bincount(inv, weights=val, minlength=len(uniq))
    keep = np.abs(merged) > 0
    uniq, merged = uniq[keep], merged[keep]
    col = uniq % block.size
    row = (uniq // block.size) % block.size
    var = uniq // (block.size * block.size)
    return SdpBlock(block.size, var, row, col, merged, F0)


def _max_step(L: np.ndarray, D: np.ndarray) -> float:
    """Largest ``t <= 1`` keeping ``L L^T + t D`` positive definite."""
    Li = sla.solve_triangular(L, np.eye(L.shape[0]), lower=True, check_finite=False)
    lam = np.linalg.eigvalsh(Li @ D @ Li.T).min()
    return 1.0 if lam >= 0 else min(1.0, -1.0 / lam)


def _sym(A):
    return 0.5 * (A + A.T)


def solve_sdp(p: SdpProgram, tol: float = 1e-9, max_iter: int = MAX_ITER) -> SdpSolution:
    """Solve ``p`` with an infeasible primal-dual interior-point method.

    The search direction is the HKM direction with Mehrotra's
    predictor-corrector and separate primal and dual step lengths. The Schur
    complement ``M_ij = tr(F_i W F_j X)`` is assembled block by block from the
    coordinate lists.

    Raises:
        NumericalError: if the Schur complement is numerically singular.
    """
    x0, T = _eliminate(p.A_eq, p.b_eq, p.n_vars)
    blocks = [_reduce_block(b, x0, T) for b in p.blocks]
    c = T.T @ p.objective
    c_const = float(p.objective @ x0)
    m = T.shape[1]
    ops = [b.operator(m) for b in blocks]
    sizes = [b.size for b in blocks]
    total = float(sum(sizes))
    F0 = [b.constant for b in blocks]
    scale = 1.0 + max([np.abs(F).max(initial=0.0) for F in F0] + [np.abs(c).max(initial=0.0)])
    z = np.zeros(m)
    S = [10.0 * scale * np.eye(k) for k in sizes]
    X = [10.0 * scale * np.eye(k) for k in sizes]
    F0_norm = 1.0 + max(np.linalg.norm(F) for F in F0)
    c_norm = 1.0 + np.linalg.norm(c)

    def F_of(zv):
        return [F + (op @ zv).reshape(k, k) for F, op, k in zip(F0, ops, sizes)]

    def adjoint(Ys):
        out = np.zeros(m)
        for op, Y in zip(ops, Ys):
            out += op.T @ Y.ravel()
        return out

    status = ITER_LIMIT
    it = 0
    for it in range(max_iter + 1):
        Fz = F_of(z)
        Rp = [F - Sb for F, Sb in zip(Fz, S)]
        rd = c - adjoint(X)
        mu = sum(float(np.vdot(Sb, Xb)) for Sb, Xb in zip(S, X)) / total
        pobj = float(c @ z)
        dobj = -sum(float(np.vdot(F, Xb)) for F, Xb in zip(F0, X))
        pinf = max(np.linalg.norm(R) for R in Rp) / F0_norm
        dinf = np.linalg.norm(rd) / c_norm
        gap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
        if pinf <= tol and dinf <= tol and gap <= tol:
            status = OPTIMAL
            break
        if it == max_iter:
            break
        chol = []
        W = []
        for Sb in S:
            L = np.linalg.cholesky(Sb)
            Li = sla.solve_triangular(L, np.eye(L.shape[0]), lower=True, check_finite=False)
            chol.append(L)
            W.append(Li.T @ Li)
        M = np.zeros((m, m))
        for b, Wb, Xb in zip(blocks, W, X):
            kernels.schur_accumulate(M, b.row, b.col, b.var, b.val,
                                     np.ascontiguousarray(Xb), np.ascontiguousarray(Wb))
        M = 0.5 * (M + M.T)
        try:
            cho = sla.cho_factor(M, check_finite=False)
        except np.linalg.LinAlgError:
            reg = 1e-14 * max(1.0, np.abs(np.diag(M)).max())
            try:
                cho = sla.cho_factor(M + reg * np.eye(m), check_finite=False)
            except np.linalg.LinAlgError:
                raise NumericalError(f"Schur complement is singular at iteration {it}") from None
        WRX = [Wb @ R @ Xb for Wb, R, Xb in zip(W, Rp, X)]

        def direction(target, extra):
            rhs_mats = [target * Wb - Xb - A - E for Wb, Xb, A, E in zip(W, X, WRX, extra)]
            dz = sla.cho_solve(cho, adjoint(rhs_mats) - rd, check_finite=False)
            dS = [(op @ dz).reshape(k, k) + R for op, k, R in zip(ops, sizes, Rp)]
            dX = [target * Wb - Xb - _sym(Wb @ d @ Xb) - _sym(E)
                  for Wb, Xb, d, E in zip(W, X, dS, extra)]
            return dz, dS, dX

        def steps(dS, dX):
            ap = min(_max_step(L, d) for L, d in zip(chol, dS))
            ad = min(_max_step(np.linalg.cholesky(Xb), d) for Xb, d in zip(X, dX))
            return ap, ad

        zeros = [np.zeros_like(Xb) for Xb in X]
        dz, dS, dX = direction(0.0, zeros)
        ap, ad = steps(dS, dX)
        mu_aff = sum(float(np.vdot(Sb + ap * a, Xb + ad * b_))
                     for Sb, Xb, a, b_ in zip(S, X, dS, dX)) / total
        sigma = min(1.0, (mu_aff / mu) ** 3) if mu > 0 else 0.0
        extra = [Wb @ a @ b_ for Wb, a, b_ in zip(W, dS, dX)]
        dz, dS, dX = direction(sigma * mu, extra)
        ap, ad = steps(dS, dX)
        ap = min(1.0, STEP_FRACTION * ap)
        ad = min(1.0, STEP_FRACTION * ad)
        z = z + ap * dz
        S = [_sym(Sb + ap * d) for Sb, d in zip(S, dS)]
        X = [_sym(Xb + ad * d) for Xb, d in zip(X, dX)]
    x = x0 + T @ z
    Fx = F_of(z)
    eq_res = float(np.abs(p.A_eq @ x - p.b_eq).max(initial=0.0)) if p.A_eq.size else 0.0
    pobj = float(c @ z) + c_const
    dobj = -sum(float(np.vdot(F, Xb)) for F, Xb in zip(F0, X)) + c_const
    sol = SdpSolution(
        status=status,
        x=x,
        objective=pobj,
        dual_objective=dobj,
        duality_gap=abs(pobj - dobj),
        equality_residual=eq_res,
        min_eigs=[float(np.linalg.eigvalsh(F).min()) for F in Fx],
        iterations=it,
        dual_blocks=X,
    )
    if p.layout is not None:
        sol.y_plus, sol.y_minus = p.layout.sequences(x)
    return sol


def _rank(T: np.ndarray, epsilon: float, floor: float) -> int:
    s = np.linalg.svd(T, compute_uv=False)
    return numerical_rank(s, epsilon, floor)


def rank_floor(rho: float) -> float:
    """Singular values below this are solver noise for a problem of value ``rho``."""
    return 1e-6 * max(1.0, abs(rho))


def flat_extension_check(sol: SdpSolution, d: int, epsilon: float = SDP_RANK_RATIO) -> tuple[bool, bool]:
    """Per sign, whether ``rank T_d(y) == rank T_{d-2}(y)`` under the ratio rule.

    The default ratio is small because interior-point solutions carry
    genuine small singular values on non-flat orders; only the drop to
    solver noise marks the rank.
    """
    if sol.y_plus is None or sol.y_minus is None:
        raise InputError("solution does not come from a hierarchy step")
    if d < 2:
        return False, False
    floor = rank_floor(sol.objective)
    out = []
    for y in (sol.y_plus, sol.y_minus):
        out.append(_rank(toeplitz_block(y, d), epsilon, floor) == _rank(toeplitz_block(y, d - 2), epsilon, floor))
    return out[0], out[1]


@dataclass
class TraceRow:
    order: int
    tv_value: float
    atom_count: int
    flat: tuple[bool, bool]
    evaluations: int


@dataclass
class SuperResolutionResult:
    """Measure recovered by :func:`super_resolution` and the per-order trace.

    ``certified`` is true when the flat-extension test passed on both signs
    at the stopping order. ``stopped`` is false when ``d_max`` was reached.
    """

    measure: AtomicMeasure
    trace: list[TraceRow]
    certified: bool
    stopped: bool

    def __iter__(self):
        return iter((self.measure, self.trace))

    def to_csv(self) -> str:
        return trace_csv(self.trace)


def trace_csv(trace: Sequence[TraceRow]) -> str:
    """CSV with columns ``order, tv_value, atom_count``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["order", "tv_value", "atom_count"])
    for row in trace:
        w.writerow([row.order, f"{row.tv_value:.4f}", row.atom_count])
    return buf.getvalue()


def extract_step(sol: SdpSolution, d: int, cfg: PronyConfig = PronyConfig()) -> tuple[AtomicMeasure, int, bool]:
    """Signed measure from one solved step, its atom count, and the audit verdict.

    The atom count is ``rank T_d(y+) + rank T_d(y-)`` at the solver-noise
    ratio :data:`SDP_RANK_RATIO`; the decomposition itself uses the
    configured threshold. The audit passes when
    both extracted measures reproduce their moment sequences on the
    relaxation's index set to :data:`AUDIT_TOL` and neither Toeplitz rank
    saturates the pencil, which would make the audit vacuous.
    """
    floor = rank_floor(sol.objective)
    cfg_s = PronyConfig(cfg.rank_threshold, cfg.rng_seed, None, floor)
    n = sol.y_plus.dimension
    parts = []
    count = 0
    audit = d >= 1
    limit = len(natural_indices(n, d - 1)) if d >= 1 else 0
    for y in (sol.y_plus, sol.y_minus):
        r = _rank(toeplitz_block(y, d), SDP_RANK_RATIO, floor)
        count += r
        if r == 0:
            parts.append(AtomicMeasure(n))
            continue
        with warnings.catch_warnings():
            # recorded in the measure's notes instead
            warnings.simplefilter("ignore", ExtractionWarning)
            mu = toeplitz_prony(y, d, cfg_s)
        parts.append(mu)
        if r >= limit or moment_residual(mu, y) > AUDIT_TOL:
            audit = False
    measure = parts[0] - parts[1]
    measure.notes = parts[0].notes + parts[1].notes
    return measure, count, audit


def super_resolution(oracle: EvaluationOracle, phi: BasePoint, scheme: str | IndexScheme = "a1",
                     d_start: int = 0, d_max: int = 12, noise_ball: float | None = None,
                     cfg: PronyConfig = PronyConfig(), dfrak: int | None = None,
                     tol: float = 1e-9) -> SuperResolutionResult:
    """Run the hierarchy order by order until the extracted measure is trusted.

    At order ``d`` the oracle is queried on the scheme at degree ``d`` (or at
    the fixed degree ``dfrak`` when given), the step is solved and both signs
    are decomposed with the Toeplitz pencil. The loop stops at the first
    order where the flat-extension test passes on both signs, or where the
    extraction audit passes.
    """
    if d_start > d_max:
        raise InputError("d_start must not exceed d_max")
    kind = scheme.kind if isinstance(scheme, IndexScheme) else scheme
    n = oracle.dimension
    seq = MomentSequence(n, phi=phi)
    trace: list[TraceRow] = []
    measure = AtomicMeasure(n)
    for d in range(d_start, d_max + 1):
        deg = d if dfrak is None else min(dfrak, d)
        sch = IndexScheme(kind, deg, n)
        collect_moments(oracle, phi, sch, into=seq)
        sol = solve_sdp(build_hierarchy_step(seq, d, deg, sch, noise_ball), tol=tol)
        if sol.status != OPTIMAL:
            raise SolveError(f"relaxation of order {d} ended with status {sol.status}")
        measure, count, audit = extract_step(sol, d, cfg)
        flat = flat_extension_check(sol, d)
        trace.append(TraceRow(d, sol.objective, count, flat, oracle.evaluations))
        if all(flat) or audit:
            return SuperResolutionResult(measure, trace, all(flat), True)
    measure.notes.append("NotCertified")
    return SuperResolutionResult(measure, trace, False, False)


def relaxation_step(oracle: EvaluationOracle, phi: BasePoint, scheme: str, d: int,
                    noise_ball: float | None = None, cfg: PronyConfig = PronyConfig(),
                    tol: float = 1e-9) -> tuple[AtomicMeasure, SdpSolution]:
    """Solve the single step ``d = dfrak`` and extract its signed measure."""
    n = oracle.dimension
    sch = IndexScheme(scheme, d, n)
    seq = collect_moments(oracle, phi, sch)
    sol = solve_sdp(build_hierarchy_step(seq, d, d, sch, noise_ball), tol=tol)
    if sol.status != OPTIMAL:
        raise SolveError(f"relaxation of order {d} ended with status {sol.status}")
    measure, _, _ = extract_step(sol, d, cfg)
    return measure, sol
