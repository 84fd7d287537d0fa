"""Prony-type decompositions: Hankel, Toeplitz and the reduced-basis variants.

All three share one pencil routine. Given row labels ``R`` and column labels
``C`` the matrices ``H0[a, c] = sigma[a + c]`` and ``Hk[a, c] = sigma[a + c + e_k]``
factor through the atoms, so the compressed multiplication matrices

    M_k = diag(S_r)^-1 U_r^* H_k V_r

share their eigenvectors and have the k-th atom coordinates as eigenvalues.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .core import AtomicMeasure, BasePoint, EvaluationOracle, MultiIndex, canonical, graded_key, negate
from .errors import ExtractionError, ExtractionWarning, InputError, RankDeficiencyError
from .moments import MomentSequence, build_moment_matrix, collect_moments, natural_indices

HANKEL = "hankel"
TOEPLITZ = "toeplitz"

EIG_GAP = 1e-10
LAMBDA_DRAWS = 8
IMAG_SILENT = 1e-8
IMAG_FLAG = 1e-4


@dataclass(frozen=True)
class PronyConfig:
    """Settings shared by the Prony variants.

    Attributes:
        rank_threshold: Singular-value ratio below which the rank is cut.
        rng_seed: Seed for the random combination of multiplication matrices.
        known_rank: Fixes the rank instead of detecting it.
        rank_floor: Singular values at or below this are treated as zero.
    """

    rank_threshold: float = 0.1
    rng_seed: int = 0
    known_rank: int | None = None
    rank_floor: float = linalg.RANK_FLOOR

    def __post_init__(self):
        if not 0 < self.rank_threshold < 1:
            raise InputError(f"rank_threshold must lie in (0, 1), got {self.rank_threshold}")
        if self.known_rank is not None and self.known_rank < 0:
            raise InputError("known_rank must be nonnegative")


def _unit(n: int, k: int) -> MultiIndex:
    e = [0] * n
    e[k] = 1
    return tuple(e)


def _generic_eig(Ms: list[np.ndarray], rng: np.random.Generator):
    """Eigenvectors of a random combination of the multiplication matrices.

    Several combinations are drawn and the one whose eigenvalues are best
    separated is kept: with noisy moments the matrices only nearly commute,
    and a close eigenvalue pair mixes the corresponding eigenvectors.
    """
    n = len(Ms)
    best_gap, best_P = -1.0, None
    for lam in rng.uniform(-1.0, 1.0, size=(LAMBDA_DRAWS, n)):
        w, P = linalg.eig_general(sum(l * M for l, M in zip(lam, Ms)))
        if len(w) < 2:
            return P
        gaps = np.abs(w[:, None] - w[None, :])
        gaps[np.diag_indices(len(w))] = np.inf
        gap = gaps.min() / max(1.0, np.abs(w).max())
        if gap > best_gap:
            best_gap, best_P = gap, P
    if best_gap < EIG_GAP:
        raise ExtractionError("random combination of multiplication matrices has a repeated eigenvalue")
    return best_P


def _realify_weights(weights: np.ndarray) -> tuple[np.ndarray, list[str]]:
    notes = []
    imag = np.abs(weights.imag)
    worst = float(imag.max(initial=0.0))
    if worst > IMAG_FLAG:
        notes.append(f"weight imaginary part {worst:.2e} exceeds {IMAG_FLAG:g}")
    elif worst > IMAG_SILENT:
        notes.append(f"dropped weight imaginary parts up to {worst:.2e}")
    for note in notes:
        warnings.warn(note, ExtractionWarning, stacklevel=3)
    return weights.real.copy(), notes


def pencil_decomposition(seq: MomentSequence, rows: Sequence[Sequence[int]],
                         cols: Sequence[Sequence[int]], cfg: PronyConfig,
                         rank: int | None = None) -> AtomicMeasure:
    """Atoms and weights from the moment pencil over the given labels.

    ``rows`` must contain the zero index, which anchors the weight formula.

    Raises:
        RankDeficiencyError: if ``rank`` is given and the matrix is numerically
            of lower rank.
        ExtractionError: if a weight denominator vanishes.
    """
    n = seq.dimension
    rows = [tuple(r) for r in rows]
    cols = [tuple(c) for c in cols]
    zero = (0,) * n
    if zero not in rows:
        raise InputError("row labels must contain the zero index")
    H0 = build_moment_matrix(seq, rows, cols).entries
    U, S, V = linalg.svd(H0)
    if rank is None:
        r = linalg.numerical_rank(S, cfg.rank_threshold, cfg.rank_floor)
    else:
        r = int(rank)
        if r > len(S) or S[r - 1] <= max(cfg.rank_floor, 1e-10 * S[0]):
            raise RankDeficiencyError(
                f"moment matrix has numerical rank below {r}; try a larger rank or another base point"
            )
    if r == 0:
        return AtomicMeasure(n)
    Ur, Sr, Vr = U[:, :r], S[:r], V[:, :r]
    Ms = []
    for k in range(n):
        Hk = build_moment_matrix(seq, rows, cols, _unit(n, k)).entries
        Ms.append((Ur.conj().T @ Hk @ Vr) / Sr[:, None])
    P = _generic_eig(Ms, np.random.default_rng(cfg.rng_seed))
    C = np.array(cols, dtype=np.int64)
    h0 = H0[rows.index(zero)]
    points = np.empty((r, n), dtype=complex)
    weights = np.empty(r, dtype=complex)
    for i in range(r):
        p = P[:, i]
        pp = np.vdot(p, p).real
        xi = np.array([np.vdot(p, M @ p) / pp for M in Ms])
        v = Vr @ p
        mono = np.exp(C @ np.log(xi.astype(complex))) if np.all(xi != 0) else np.prod(xi[None, :] ** C, axis=1)
        den = mono @ v
        if abs(den) <= 1e-12 * np.linalg.norm(v) * max(1.0, np.abs(mono).max()):
            raise ExtractionError(f"weight denominator vanishes for atom {np.round(xi, 6)}")
        points[i] = xi
        weights[i] = (h0 @ v) / den
    real_weights, notes = _realify_weights(weights)
    mu = AtomicMeasure(n, points, real_weights, check=False)
    pair = mu.closest_pair()
    if pair is not None and pair[2] <= 1e-9:
        mu = mu.merged()
    mu.notes = notes
    return mu


def _constant_measure(seq: MomentSequence, cfg: PronyConfig) -> AtomicMeasure:
    # a single moment carries no shift information; it is explained by a mass at 1
    n = seq.dimension
    s0 = seq[(0,) * n]
    if abs(s0) <= cfg.rank_floor:
        return AtomicMeasure(n)
    weights, notes = _realify_weights(np.array([s0]))
    mu = AtomicMeasure(n, np.ones((1, n)), weights)
    mu.notes = notes
    return mu


def hankel_prony(seq: MomentSequence, d: int, cfg: PronyConfig = PronyConfig()) -> AtomicMeasure:
    """Decompose from moments of one-norm at most ``d`` with a Hankel pencil.

    Rows are the exponents of degree at most ``floor(d/2)`` and columns those
    of degree at most ``ceil(d/2) - 1``; the shifted matrices then need
    exactly the moments of degree ``<= d``.
    """
    if d < 0:
        raise InputError("degree must be nonnegative")
    n = seq.dimension
    if d == 0:
        return _constant_measure(seq, cfg)
    rows = natural_indices(n, d // 2)
    cols = natural_indices(n, (d + 1) // 2 - 1)
    return pencil_decomposition(seq, rows, cols, cfg, cfg.known_rank)


def toeplitz_prony(seq: MomentSequence, d: int, cfg: PronyConfig = PronyConfig()) -> AtomicMeasure:
    """Decompose from moments indexed by differences of degree-``d`` exponents.

    Rows are monomials of degree at most ``d - 1`` and columns anti-monomials
    of degree at most ``d``, so in one variable ``d + 1`` evaluations suffice
    for ``d`` atoms.
    """
    if d < 0:
        raise InputError("degree must be nonnegative")
    n = seq.dimension
    if d == 0:
        return _constant_measure(seq, cfg)
    rows = natural_indices(n, d - 1)
    cols = [negate(b) for b in natural_indices(n, d)]
    return pencil_decomposition(seq, rows, cols, cfg, cfg.known_rank)


def advanced_basis(n: int, r: int) -> list[MultiIndex]:
    """First ``r`` exponents of N^n in graded lex order."""
    d = 0
    while len(natural_indices(n, d)) < r:
        d += 1
    return list(natural_indices(n, d)[:r])


def advanced_indices(n: int, r: int, variant: str) -> list[MultiIndex]:
    """Indices queried by the reduced pencil: ``A0 + A1`` and every ``e_k + A0 + A1``.

    For the Toeplitz variant only canonical representatives are listed.
    """
    A0 = advanced_basis(n, r)
    A1 = A0 if variant == HANKEL else [negate(a) for a in A0]
    shifts = [(0,) * n] + [_unit(n, k) for k in range(n)]
    found = {tuple(a + c + s for a, c, s in zip(x, y, z)) for x in A0 for y in A1 for z in shifts}
    return sorted({canonical(a) for a in found} if variant == TOEPLITZ else found, key=graded_key)


def advanced_prony(oracle: EvaluationOracle, phi: BasePoint, r: int, variant: str = TOEPLITZ,
                   cfg: PronyConfig = PronyConfig()) -> AtomicMeasure:
    """Decompose with the reduced bases ``A0`` (rows) and ``A1`` (columns).

    ``A0`` holds the first ``r`` exponents in graded lex order and ``A1`` is
    ``A0`` itself (Hankel) or its negation (Toeplitz). Only the evaluations
    needed by the ``r x r`` pencil are queried.

    Raises:
        RankDeficiencyError: if the ``r x r`` moment matrix is singular.
    """
    if r < 1:
        raise InputError("r must be at least 1")
    if variant not in (HANKEL, TOEPLITZ):
        raise InputError(f"unknown variant {variant!r}")
    n = oracle.dimension
    seq = MomentSequence(n, phi=phi)
    for alpha in advanced_indices(n, r, variant):
        if alpha in seq:
            continue
        if variant == TOEPLITZ:
            rep = canonical(alpha)
            seq.set(rep, oracle.evaluate(phi.power(rep)))
        else:
            seq.set(alpha, oracle.evaluate(phi.power(alpha)), mirror=False)
    A0 = advanced_basis(n, r)
    A1 = A0 if variant == HANKEL else [negate(a) for a in A0]
    return pencil_decomposition(seq, A0, A1, cfg, rank=r)


def moment_residual(mu: AtomicMeasure, seq: MomentSequence, alphas=None) -> float:
    """Largest moment mismatch relative to the largest moment magnitude."""
    alphas = list(seq.values) if alphas is None else [tuple(a) for a in alphas]
    data = seq.vector(alphas)
    model = mu.moments(alphas)
    scale = max(1.0, float(np.abs(data).max(initial=0.0)))
    return float(np.abs(model - data).max(initial=0.0) / scale)
