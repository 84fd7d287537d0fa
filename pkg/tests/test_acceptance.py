"""Acceptance criteria, one test group per criterion.

Each check records its verdict with the ``acceptance`` fixture; the terminal
summary prints one PASS/FAIL line per criterion. Cells that cannot be
reproduced are strict xfails pointing at the decisions ledger
(``notes/decisions.md``).
"""

import itertools
import time
import warnings

import numpy as np
import pytest

from sparseinterp import experiments as ex
from sparseinterp.core import (
    AtomicMeasure,
    BasePoint,
    EvaluationOracle,
    SparsePolynomial,
    bundled_instance,
    measure_from_polynomial,
)
from sparseinterp.lp import OPTIMAL, LinearProgram, dual_certificate, rigorous_lp, solve_lp
from sparseinterp.moments import IndexScheme, MomentSequence, collect_moments, natural_indices, signed_indices
from sparseinterp.prony import moment_residual
from sparseinterp.recover import decode_exponents, relative_error, same_support
from sparseinterp.sdp import (
    OPTIMAL as SDP_OPTIMAL,
    SdpBlock,
    SdpProgram,
    build_hierarchy_step,
    extract_step,
    flat_extension_check,
    realify,
    solve_sdp,
    super_resolution,
)

LEDGER = "see notes/decisions.md"


def check(log, criterion, ok, detail, known=None):
    log.record(criterion, bool(ok), detail, known)
    assert ok, detail


# ---------------------------------------------------------------- criterion 1

def test_c1_showcase_trace(acceptance, showcase):
    t0 = time.perf_counter()
    phi = BasePoint.integer_angles(1)
    res = super_resolution(EvaluationOracle(showcase), phi, "a1")
    elapsed = time.perf_counter() - t0
    tv = [row.tv_value for row in res.trace]
    counts = [row.atom_count for row in res.trace]
    g_hat = decode_exponents(res.measure, phi, 100)
    ok = (
        len(tv) == 4
        and np.allclose(tv, [2.0000, 8.7759, 9.2803, 10.0000], atol=1e-3)
        and counts == [1, 2, 3, 3]
        and res.trace[-1].order == 3
        and same_support(g_hat, showcase)
        and relative_error(g_hat, showcase) <= 1e-6
        and elapsed < 10
    )
    check(acceptance, 1, ok, f"tv={np.round(tv, 4).tolist()} counts={counts} time={elapsed:.1f}s")


# ---------------------------------------------------------------- criterion 2

def test_c2_roots_of_unity_single_loop(acceptance, showcase):
    t0 = time.perf_counter()
    phi = BasePoint.roots_of_unity(1, 101)
    res = super_resolution(EvaluationOracle(showcase), phi, "a1", d_max=12)
    elapsed = time.perf_counter() - t0
    tv = [row.tv_value for row in res.trace]
    g_hat = decode_exponents(res.measure, phi, 100)
    ok = (
        res.trace[-1].order == 11
        and abs(tv[-1] - 10.0) <= 1e-3
        and all(b >= a - 1e-6 for a, b in zip(tv, tv[1:]))
        and same_support(g_hat, showcase)
        and relative_error(g_hat, showcase) <= 1e-6
        and elapsed < 120
    )
    check(acceptance, 2, ok, f"stop order={res.trace[-1].order} tv={np.round(tv, 4).tolist()} time={elapsed:.1f}s")


# ---------------------------------------------------------------- criterion 3

TABLE_A1 = {
    ex.RIGOROUS_LP: ["2 (1)", "4 (3)", "5 (4)", "19 (3)", "10 (2)", "10 (2)", "7 (1)", "28 (2)", "136 (2)", "N. A."],
    ex.SUPERRES: ["3 (2)", "5 (4)", "6 (5)", "31 (4)", "19 (3)", "19 (3)", "28 (2)", "28 (2)", "136 (2)", "1595 (2)"],
    ex.TOEPLITZ_PRONY: ["3 (2)", "4 (3)", "6 (5)", "10 (2)", "19 (3)", "19 (3)", "28 (2)", "28 (2)", "136 (2)",
                        "1595 (2)"],
    ex.ADVANCED_T: ["3", "4", "6", "6", "13", "14", "9", "16", "30", "65"],
}
TABLE_A2 = {
    ex.RIGOROUS_LP: ["2 (1)", "4 (3)", "5 (4)", "10 (3)", "10 (3)", "10 (3)", "10 (2)", "20 (3)", "21 (2)", "66 (2)"],
    ex.SUPERRES: ["3 (2)", "5 (4)", "6 (5)", "15 (4)", "15 (4)", "15 (4)", "10 (2)", "20 (3)", "21 (2)", "66 (2)"],
    ex.HANKEL_PRONY: ["4 (3)", "6 (5)", "10 (9)", "10 (3)", "21 (5)", "21 (5)", "20 (3)", "20 (3)", "56 (3)",
                      "286 (3)"],
    ex.ADVANCED_H: ["4", "6", "10", "7", "15", "18", "10", "16", "28", "58"],
}

# cells that are implemented faithfully but do not match, keyed by (scheme, method, row)
KNOWN_CELLS = {
    ("a1", ex.ADVANCED_T, 8): "Advanced Prony basis rank deficiency",
    ("a2", ex.ADVANCED_H, 8): "Advanced Prony basis rank deficiency",
    ("a1", ex.ADVANCED_T, 10): "Advanced Prony basis rank deficiency",
    ("a2", ex.ADVANCED_H, 10): "Advanced Prony basis rank deficiency",
    ("a1", ex.RIGOROUS_LP, 10): "LP size guard on the ten-variable row",
    ("a1", ex.SUPERRES, 10): "1596 versus 1595 evaluations",
    ("a1", ex.TOEPLITZ_PRONY, 10): "1596 versus 1595 evaluations",
}


def _cells():
    for scheme, table in (("a1", TABLE_A1), ("a2", TABLE_A2)):
        for method, cells in table.items():
            for row, expected in enumerate(cells, start=1):
                marks = []
                if row == 10:
                    marks.append(pytest.mark.slow)
                reason = KNOWN_CELLS.get((scheme, method, row))
                if reason:
                    marks.append(pytest.mark.xfail(strict=True, reason=f"{reason}; {LEDGER}"))
                yield pytest.param(scheme, method, row, expected, marks=marks, id=f"{scheme}-{method}-p{row}")


@pytest.mark.parametrize("scheme,method,row,expected", list(_cells()))
def test_c3_min_evaluation_cells(acceptance, scheme, method, row, expected):
    inst = bundled_instance(f"p{row}")
    got = ex.find_min_evaluations(inst.polynomial, method, scheme, degree_bound=inst.degree_bound).cell()
    reason = KNOWN_CELLS.get((scheme, method, row))
    check(acceptance, 3, got == expected, f"{scheme} {method} p{row}: got {got!r}, table {expected!r}",
          known=f"{reason}; {LEDGER}" if reason else None)


# ---------------------------------------------------------------- criterion 4

@pytest.mark.parametrize("kind,d,size,eqs", [("a1", 1, 11, 56), ("a1", 2, 66, 1596), ("a2", 2, 66, 66)])
def test_c4_problem_sizes(acceptance, kind, d, size, eqs):
    g = bundled_instance("p10").polynomial
    sch = IndexScheme(kind, d, 10)
    seq = collect_moments(EvaluationOracle(g), BasePoint.integer_angles(10), sch)
    p = build_hierarchy_step(seq, d, d, sch)
    ok = p.hermitian_sizes == [size, size] and p.equality_count == eqs
    check(acceptance, 4, ok, f"{kind} d={d}: blocks {p.hermitian_sizes}, {p.equality_count} equalities")


# ---------------------------------------------------------------- criterion 5

TABLE4 = {
    ex.RIGOROUS_LP: [4.18, 1.94, 1.47, 3.23, 1.13, 1.23, 0.79, 2.19, 0.94],
    ex.SUPERRES: [1.58, 1.81, 1.40, 4.84, 0.87, 1.08, 0.70, 1.03, 1.15],
    ex.TOEPLITZ_PRONY: [0.61, 0.85, 0.69, 2.26, 1.29, 6.28, 0.50, 1.39, 1.04],
}
TABLE7 = {
    ex.RIGOROUS_LP: [2.32, 1.71, 0.80, 14.91, 0.73, 1.19, 0.82, 3.29, 2.90],
    ex.SUPERRES: [1.66, 2.31, 1.64, 11.03, 1.01, 12.30, 1.32, 2.13, 1.64],
    ex.HANKEL_PRONY: [0.97, 3.33, 2.89, 52.14, 2.13, 2.67, 0.93, 16.99, 6.74],
}
# the ten-variable row has no LP cell and, under the natural scheme, one cell per degree
ROW10 = {
    "a1": {ex.SUPERRES: (0.47, 2), ex.TOEPLITZ_PRONY: (0.46, 2)},
    "a2": {ex.SUPERRES: (2.12, 2), ex.HANKEL_PRONY: (0.57, 3)},
}
META_SEEDS = (0, 1000, 2000)


def _noise_rows():
    for scheme in ("a1", "a2"):
        for row in range(1, 11):
            marks = [pytest.mark.slow] if row == 10 else []
            yield pytest.param(scheme, row, marks=marks, id=f"{scheme}-p{row}")


@pytest.mark.parametrize("scheme,row", list(_noise_rows()))
def test_c5_noise_suite(acceptance, scheme, row):
    inst = bundled_instance(f"p{row}")
    g = inst.polynomial
    if row == 10:
        cells = ROW10[scheme]
    else:
        table = TABLE4 if scheme == "a1" else TABLE7
        d = ex.noise_degree(g, list(table), scheme, inst.degree_bound)
        cells = {m: (values[row - 1], d) for m, values in table.items()}
    problems = []
    for method, (cell, d) in cells.items():
        limit = 3.0 * cell
        if g.dimension == 1:
            limit = min(limit, 10.0)
        for meta in META_SEEDS:
            s = ex.noise_trial_suite(g, [method], d, 10, meta, 0.1, 0.1, scheme, inst.degree_bound)[0]
            if not s.mean <= limit:
                problems.append(f"{method} seed {meta}: {s.mean:.2f}% > {limit:.2f}%")
    check(acceptance, 5, not problems, f"{scheme} p{row}: " + ("; ".join(problems) or "ok"))


# ---------------------------------------------------------------- criterion 6

def _threshold_rows():
    for row in range(4, 11):
        marks = [pytest.mark.slow] if row == 10 else []
        yield pytest.param(row, marks=marks, id=f"p{row}")


@pytest.mark.parametrize("row", list(_threshold_rows()))
def test_c6_threshold_direction(acceptance, row):
    inst = bundled_instance(f"p{row}")
    g = inst.polynomial
    methods = [ex.SUPERRES, ex.TOEPLITZ_PRONY]
    d = ex.noise_degree(g, methods, "a1", inst.degree_bound)
    problems = []
    for method in methods:
        coarse, fine = (ex.noise_trial_suite(g, [method], d, 10, 0, 0.1, eps, "a1", inst.degree_bound)[0].mean
                        for eps in (1e-1, 1e-3))
        if not fine > coarse:
            problems.append(f"{method}: {fine:.2f}% at 1e-3 vs {coarse:.2f}% at 1e-1")
    check(acceptance, 6, not problems, f"p{row}: " + ("; ".join(problems) or "ok"))


# ---------------------------------------------------------------- criterion 7

@pytest.mark.parametrize("phi_kind", ["integer_angles", "roots_of_unity"])
def test_c7_round_trip(acceptance, phi_kind):
    rng = np.random.default_rng(7)
    failures = 0
    for k in range(200):
        n = int(rng.integers(1, 5))
        degree = int(rng.integers(1, 11))
        terms = int(rng.integers(1, min(6, len(natural_indices(n, degree))) + 1))
        g = ex.generate_instance(n, degree, terms, int(rng.integers(2**31)))
        phi = BasePoint.integer_angles(n) if phi_kind == "integer_angles" else BasePoint.roots_of_unity(n, 101)
        out = decode_exponents(measure_from_polynomial(g, phi), phi, degree)
        if not (same_support(out, g) and relative_error(out, g) <= 1e-10):
            failures += 1
    check(acceptance, 7, failures == 0, f"{phi_kind}: {failures} of 200 instances failed")


# ---------------------------------------------------------------- criterion 8

def test_c8_lp_complementarity(acceptance):
    rng = np.random.default_rng(8)
    problems = []
    for k in range(50):
        n = int(rng.integers(1, 3))
        bound = 12 if n == 1 else 6
        g = ex.generate_instance(n, bound, int(rng.integers(1, 4)), int(rng.integers(2**31)))
        phi = BasePoint.integer_angles(n)
        seq = collect_moments(EvaluationOracle(g), phi, IndexScheme("a1", int(rng.integers(1, 4)), n))
        g_hat, sol = rigorous_lp(seq, phi, bound, return_solution=True)
        grid = natural_indices(n, bound)
        cert = dual_certificate(sol, phi, grid)
        sup = max(abs(v) for v in cert.values())
        mismatch = max((abs(cert[b] - np.sign(c)) for b, c in g_hat.terms.items()), default=0.0)
        if sup > 1 + 1e-6 or mismatch > 1e-6:
            problems.append(f"instance {k}: sup {sup:.2e}, sign gap {mismatch:.2e}")
    check(acceptance, 8, not problems, "; ".join(problems) or "50 instances ok")


# ---------------------------------------------------------------- criterion 9

def test_c9_realification(acceptance):
    rng = np.random.default_rng(9)
    bad = 0
    for _ in range(100):
        k = int(rng.integers(1, 8))
        B = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
        H = B + B.conj().T if rng.uniform() < 0.5 else B @ B.conj().T
        w = np.linalg.eigvalsh(H)
        wr = np.linalg.eigvalsh(realify(H))
        if not (np.allclose(wr, np.sort(np.repeat(w, 2)), atol=1e-9)
                and (wr.min() >= -1e-9) == (w.min() >= -1e-9)):
            bad += 1
    check(acceptance, 9, bad == 0, f"realification: {bad} of 100 samples disagree")


@pytest.mark.parametrize("row", [1, 2, 3, 4, 5, 7])
def test_c9_sdp_contracts(acceptance, row):
    inst = bundled_instance(f"p{row}")
    g = inst.polynomial
    phi = BasePoint.integer_angles(g.dimension)
    sch_kind = "a1"
    seq = MomentSequence(g.dimension, phi=phi)
    oracle = EvaluationOracle(g)
    values, problems = [], []
    for d in range(0, 5):
        sch = IndexScheme(sch_kind, d, g.dimension)
        collect_moments(oracle, phi, sch, into=seq)
        sol = solve_sdp(build_hierarchy_step(seq, d, d, sch))
        if sol.status != SDP_OPTIMAL:
            problems.append(f"order {d}: {sol.status}")
            break
        values.append(sol.objective)
        if sol.objective > g.one_norm() * (1 + 1e-7):
            problems.append(f"order {d}: value {sol.objective:.6f} above {g.one_norm():.6f}")
        if all(flat_extension_check(sol, d)):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                mu, _, _ = extract_step(sol, d)
            for y, part in ((sol.y_plus, 1.0), (sol.y_minus, -1.0)):
                sub = AtomicMeasure(g.dimension, mu.points[np.sign(mu.weights) == part],
                                    np.abs(mu.weights[np.sign(mu.weights) == part]), check=False)
                res = moment_residual(sub, y)
                if res > 1e-5:
                    problems.append(f"order {d}: flat but residual {res:.2e}")
    if any(b < a - 1e-6 for a, b in zip(values, values[1:])):
        problems.append(f"trace not monotone: {np.round(values, 6).tolist()}")
    check(acceptance, 9, not problems, f"p{row}: " + ("; ".join(problems) or "ok"))


# ---------------------------------------------------------------- criterion 10

def test_c10_vandermonde_full_rank(acceptance):
    rng = np.random.default_rng(10)
    bad = 0
    for _ in range(100):
        n = int(rng.integers(1, 4))
        d = int(rng.integers(1, 7))
        pts = rng.standard_normal((d, n)) + 1j * rng.standard_normal((d, n))
        V = np.array([[np.prod(p ** np.array(a)) for a in natural_indices(n, d - 1)] for p in pts])
        if np.linalg.matrix_rank(V) != d:
            bad += 1
    check(acceptance, 10, bad == 0, f"Vandermonde: {bad} of 100 trials rank deficient")


def test_c10_distinct_measures_differ(acceptance):
    rng = np.random.default_rng(11)
    bad = 0
    for _ in range(100):
        n = int(rng.integers(1, 4))
        r = int(rng.integers(1, 5))
        mus = []
        for _ in range(2):
            pts = np.exp(1j * rng.uniform(0, 2 * np.pi, size=(r, n)))
            mus.append(AtomicMeasure(n, pts, rng.uniform(0.5, 2.0, r) * rng.choice([-1, 1], r)))
        idx = signed_indices(n, r)
        gap = np.abs(mus[0].moments(idx) - mus[1].moments(idx)).max()
        if gap <= 1e-9:
            bad += 1
    check(acceptance, 10, bad == 0, f"distinct measures: {bad} of 100 pairs share all moments")


# ---------------------------------------------------------------- criterion 11

def _vertex_optimum(c, A, b):
    """Brute force over all bases of ``A x = b, x >= 0``; None when infeasible."""
    m, n = A.shape
    best = None
    for cols in itertools.combinations(range(n), m):
        B = A[:, cols]
        if abs(np.linalg.det(B)) < 1e-10:
            continue
        xb = np.linalg.solve(B, b)
        if np.all(xb >= -1e-10):
            val = float(c[list(cols)] @ xb)
            best = val if best is None else min(best, val)
    return best


def test_c11_lp_vertex_enumeration(acceptance):
    rng = np.random.default_rng(111)
    problems = []
    for k in range(100):
        nv = int(rng.integers(1, 9))
        m_ub = int(rng.integers(0, 3))
        m_eq = int(rng.integers(0, min(nv, 2) + 1))
        x0 = rng.uniform(0, 1, nv)
        A_eq = rng.standard_normal((m_eq, nv))
        # a budget row keeps the feasible set bounded
        A_ub = np.vstack([rng.standard_normal((m_ub, nv)), np.ones((1, nv))])
        b_ub = np.concatenate([A_ub[:m_ub] @ x0 + rng.uniform(0, 1, m_ub), [nv + 1.0]])
        c = rng.standard_normal(nv)
        lp = LinearProgram(c, A_eq, A_eq @ x0, A_ub, b_ub)
        sol = solve_lp(lp)
        A_std = np.block([[A_eq, np.zeros((m_eq, m_ub + 1))], [A_ub, np.eye(m_ub + 1)]])
        ref = _vertex_optimum(np.concatenate([c, np.zeros(m_ub + 1)]), A_std, np.concatenate([A_eq @ x0, b_ub]))
        if sol.status != OPTIMAL or ref is None or abs(sol.objective_value - ref) > 1e-8 * (1 + abs(ref)):
            problems.append(f"instance {k}: {sol.status} {sol.objective_value} vs {ref}")
    check(acceptance, 11, not problems, "; ".join(problems) or "100 LPs match")


def _scan_optimum(F0, F1, sign):
    """Optimum of ``sign * x`` over ``F0 + x F1 >= 0`` by grid search refined with bisection."""
    feasible = lambda x: np.linalg.eigvalsh(F0 + x * F1).min() >= 0  # noqa: E731
    grid = np.linspace(-50.0, 50.0, 20001)
    ok = np.array([feasible(x) for x in grid])
    idx = np.flatnonzero(ok)
    # move from the extreme feasible grid point towards the first infeasible one
    if sign > 0:
        inside, outside = grid[idx[0]], grid[idx[0] - 1]
    else:
        inside, outside = grid[idx[-1]], grid[idx[-1] + 1]
    for _ in range(60):
        mid = 0.5 * (inside + outside)
        if feasible(mid):
            inside = mid
        else:
            outside = mid
    return sign * inside


def test_c11_sdp_grid_scan(acceptance):
    rng = np.random.default_rng(112)
    problems = []
    for k in range(20):
        size = int(rng.integers(2, 6))
        B = rng.standard_normal((size, size))
        F0 = B @ B.T + np.eye(size)
        C = rng.standard_normal((size, size))
        F1 = C + C.T
        while np.linalg.eigvalsh(F1).min() > 0 or np.linalg.eigvalsh(F1).max() < 0:
            C = rng.standard_normal((size, size))
            F1 = C + C.T
        sign = 1.0 if k % 2 == 0 else -1.0
        r, cc = np.nonzero(F1)
        block = SdpBlock(size, np.zeros(r.size, dtype=int), r, cc, F1[r, cc], F0)
        sol = solve_sdp(SdpProgram(1, np.array([sign]), [block], np.zeros((0, 1)), np.zeros(0)))
        ref = _scan_optimum(F0, F1, sign)
        if sol.status != SDP_OPTIMAL or abs(sol.objective - ref) > 1e-5:
            problems.append(f"instance {k}: {sol.objective:.8f} vs {ref:.8f}")
    # two-variable trace example: min x11 + x22 with off-diagonal fixed to 1 has value 2
    E = [np.array([[1.0, 0], [0, 0]]), np.array([[0, 1.0], [1.0, 0]]), np.array([[0, 0], [0, 1.0]])]
    var, row, col, val = [], [], [], []
    for v, F in enumerate(E):
        rr, ccol = np.nonzero(F)
        var += [v] * rr.size
        row += rr.tolist()
        col += ccol.tolist()
        val += F[rr, ccol].tolist()
    p = SdpProgram(3, np.array([1.0, 0.0, 1.0]), [SdpBlock(2, var, row, col, val, np.zeros((2, 2)))],
                   np.array([[0.0, 1.0, 0.0]]), np.array([1.0]))
    value = solve_sdp(p).objective
    if abs(value - 2.0) > 1e-5:
        problems.append(f"trace example: {value:.8f} vs 2")
    check(acceptance, 11, not problems, "; ".join(problems) or "scan problems match")
