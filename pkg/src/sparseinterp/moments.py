"""Index schemes, moment collection and Hankel/Toeplitz moment matrices."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Iterable, Mapping, Sequence

import numpy as np

from .core import (
    AtomicMeasure,
    BasePoint,
    EvaluationOracle,
    MultiIndex,
    as_index,
    canonical,
    graded_key,
    is_canonical,
    negate,
)
from .errors import InputError

INF_NORM = "inf"
ONE_NORM_SIGNED = "a1"
ONE_NORM_NATURAL = "a2"
SCHEME_KINDS = (INF_NORM, ONE_NORM_SIGNED, ONE_NORM_NATURAL)

HANKEL = "hankel"
TOEPLITZ = "toeplitz"


@lru_cache(maxsize=64)
def natural_indices(n: int, d: int) -> tuple[MultiIndex, ...]:
    """Exponents ``alpha`` in N^n with ``|alpha|_1 <= d`` in graded lex order."""
    if n < 1 or d < 0:
        return ()
    out: list[MultiIndex] = []
    for total in range(d + 1):
        out.extend(sorted(_compositions(n, total), key=graded_key))
    return tuple(out)


def _compositions(n: int, total: int) -> Iterable[MultiIndex]:
    # stars and bars: choose positions of n-1 separators among total+n-1 slots
    for bars in itertools.combinations(range(total + n - 1), n - 1):
        prev = -1
        parts = []
        for b in bars:
            parts.append(b - prev - 1)
            prev = b
        parts.append(total + n - 1 - prev - 1)
        yield tuple(parts)


def natural_index_array(n: int, d: int) -> np.ndarray:
    return np.array(natural_indices(n, d), dtype=np.int64).reshape(-1, n)


@lru_cache(maxsize=64)
def signed_indices(n: int, d: int) -> tuple[MultiIndex, ...]:
    """Differences ``alpha - beta`` of exponents with one-norm at most ``d``."""
    nat = natural_indices(n, d)
    found = {tuple(a - b for a, b in zip(x, y)) for x in nat for y in nat}
    return tuple(sorted(found, key=graded_key))


@lru_cache(maxsize=64)
def box_indices(n: int, d: int) -> tuple[MultiIndex, ...]:
    """Signed indices with ``|alpha|_inf <= d``."""
    found = itertools.product(range(-d, d + 1), repeat=n)
    return tuple(sorted(found, key=graded_key))


@dataclass(frozen=True)
class IndexScheme:
    """Set of exponents ``alpha`` at which ``g(phi**alpha)`` is known.

    Attributes:
        kind: ``"inf"`` for the infinity-norm box, ``"a1"`` for differences
            of simplex exponents and ``"a2"`` for the simplex itself.
        degree: Degree parameter of the set.
        dimension: Number of variables.
    """

    kind: str
    degree: int
    dimension: int

    def __post_init__(self):
        if self.kind not in SCHEME_KINDS:
            raise InputError(f"unknown scheme kind {self.kind!r}")
        if self.degree < 0 or self.dimension < 1:
            raise InputError("scheme degree must be >= 0 and dimension >= 1")

    @property
    def signed(self) -> bool:
        return self.kind != ONE_NORM_NATURAL

    def indices(self) -> tuple[MultiIndex, ...]:
        """Every index of the set in graded lex order."""
        if self.kind == INF_NORM:
            return box_indices(self.dimension, self.degree)
        if self.kind == ONE_NORM_SIGNED:
            return signed_indices(self.dimension, self.degree)
        return natural_indices(self.dimension, self.degree)

    def query_indices(self) -> tuple[MultiIndex, ...]:
        """Indices actually sent to the oracle; mirrors follow by conjugation."""
        if not self.signed:
            return self.indices()
        return tuple(a for a in self.indices() if is_canonical(a))

    def cardinality(self) -> int:
        if self.kind == INF_NORM:
            return (2 * self.degree + 1) ** self.dimension
        if self.kind == ONE_NORM_NATURAL:
            return comb(self.dimension + self.degree, self.dimension)
        return len(self.indices())

    def evaluation_count(self) -> int:
        return len(self.query_indices())

    def with_degree(self, degree: int) -> IndexScheme:
        return IndexScheme(self.kind, degree, self.dimension)


class MomentSequence:
    """Map from signed multi-indices to complex moments.

    Every stored ``alpha`` is accompanied by ``-alpha`` with the conjugate
    value. The zero moment keeps whatever imaginary part it was observed
    with, so noisy data is not silently projected.
    """

    def __init__(self, dimension: int, values: Mapping[Sequence[int], complex] | None = None,
                 phi: BasePoint | None = None, mirror: bool = True):
        self.dimension = int(dimension)
        self.phi = phi
        self.values: dict[MultiIndex, complex] = {}
        for alpha, v in (values or {}).items():
            self.set(alpha, v, mirror=mirror)

    def set(self, alpha: Sequence[int], value: complex, mirror: bool = True) -> None:
        a = as_index(alpha)
        if len(a) != self.dimension:
            raise InputError(f"index {a} does not have length {self.dimension}")
        self.values[a] = complex(value)
        if mirror and any(a):
            self.values[negate(a)] = complex(np.conj(value))

    def __contains__(self, alpha) -> bool:
        return as_index(alpha) in self.values

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, alpha) -> complex:
        a = as_index(alpha)
        try:
            return self.values[a]
        except KeyError:
            raise InputError(f"moment for index {a} is missing") from None

    def get(self, alpha, default=None):
        return self.values.get(as_index(alpha), default)

    def indices(self) -> list[MultiIndex]:
        return sorted(self.values, key=graded_key)

    def vector(self, alphas: Iterable[Sequence[int]]) -> np.ndarray:
        return np.array([self[a] for a in alphas], dtype=complex)

    @classmethod
    def from_measure(cls, mu: AtomicMeasure, alphas: Iterable[Sequence[int]],
                     phi: BasePoint | None = None) -> MomentSequence:
        alphas = [as_index(a) for a in alphas]
        vals = mu.moments(alphas) if alphas else []
        return cls(mu.dimension, dict(zip(alphas, vals)), phi=phi)

    def to_json(self) -> str:
        rows = [
            {"alpha": list(a), "re": float(self.values[a].real), "im": float(self.values[a].imag)}
            for a in self.indices()
        ]
        return json.dumps(rows)

    @classmethod
    def from_json(cls, text: str, phi: BasePoint | None = None) -> MomentSequence:
        rows = json.loads(text)
        if not rows:
            raise InputError("empty moment sequence")
        n = len(rows[0]["alpha"])
        seq = cls(n, phi=phi)
        for row in rows:
            seq.set(row["alpha"], complex(row["re"], row["im"]), mirror=False)
        return seq


def collect_moments(oracle: EvaluationOracle, phi: BasePoint, scheme: IndexScheme,
                    into: MomentSequence | None = None) -> MomentSequence:
    """Query the oracle on ``phi**alpha`` for the scheme's representatives.

    Args:
        oracle: Black box for the hidden polynomial.
        phi: Base point.
        scheme: Index set to cover.
        into: Optional sequence to extend in place.
    """
    if scheme.dimension != oracle.dimension or phi.dimension != oracle.dimension:
        raise InputError("scheme, base point and oracle dimensions differ")
    seq = into if into is not None else MomentSequence(oracle.dimension, phi=phi)
    for alpha in scheme.query_indices():
        if alpha in seq.values:
            continue
        seq.set(alpha, oracle.evaluate(phi.power(alpha)), mirror=phi.on_torus)
    return seq


@dataclass
class MomentMatrix:
    """Dense moment matrix with explicit row and column labels.

    Entry ``(i, j)`` equals ``sigma[row_indices[i] + col_indices[j] + shift]``.
    For Toeplitz matrices the column labels are anti-monomials ``-beta``.
    """

    row_indices: list[MultiIndex]
    col_indices: list[MultiIndex]
    entries: np.ndarray
    kind: str
    shift: MultiIndex

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


def build_moment_matrix(seq: MomentSequence, rows: Sequence[Sequence[int]],
                        cols: Sequence[Sequence[int]], shift: Sequence[int] | None = None,
                        kind: str = HANKEL) -> MomentMatrix:
    """Matrix with entries ``sigma[row + col + shift]``."""
    n = seq.dimension
    s = np.zeros(n, dtype=np.int64) if shift is None else np.asarray(shift, dtype=np.int64)
    R = np.array(rows, dtype=np.int64).reshape(-1, n)
    C = np.array(cols, dtype=np.int64).reshape(-1, n)
    E = np.empty((R.shape[0], C.shape[0]), dtype=complex)
    values = seq.values
    for i, r in enumerate(R + s):
        for j, c in enumerate(C):
            key = tuple((r + c).tolist())
            v = values.get(key)
            if v is None:
                raise InputError(f"moment for index {key} is missing")
            E[i, j] = v
    return MomentMatrix([as_index(r) for r in R], [as_index(c) for c in C], E, kind, as_index(s))


def hankel_matrix(seq: MomentSequence, d1: int, d2: int, shift: Sequence[int] | None = None) -> MomentMatrix:
    """Hankel matrix over rows ``|alpha|_1 <= d1`` and columns ``|beta|_1 <= d2 - 1``."""
    n = seq.dimension
    return build_moment_matrix(seq, natural_indices(n, d1), natural_indices(n, d2 - 1), shift, HANKEL)


def toeplitz_matrix(seq: MomentSequence, d: int, shift: Sequence[int] | None = None) -> MomentMatrix:
    """Toeplitz-like matrix with entries ``sigma[alpha - beta]`` for ``|alpha|_1, |beta|_1 <= d``."""
    n = seq.dimension
    nat = natural_indices(n, d)
    return build_moment_matrix(seq, nat, [negate(b) for b in nat], shift, TOEPLITZ)
