"""Domain types: polynomials, base points, atomic measures, oracles and noise.

A sparse polynomial ``g`` evaluated at powers of a base point ``phi`` on the
torus produces the moments of a signed atomic measure::

    g(phi**alpha) = sum_beta g_beta * (phi**beta)**alpha

so recovering ``g`` from evaluations is the same problem as recovering the
atoms ``phi**beta`` and weights ``g_beta`` of that measure from its moments.
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ConfigurationError, InputError

MultiIndex = tuple[int, ...]

ROOTS_OF_UNITY = "roots_of_unity"
INTEGER_ANGLES = "integer_angles"
REAL_BOX = "real_box"
TORUS_SCHEMES = (ROOTS_OF_UNITY, INTEGER_ANGLES)

ATOM_SEPARATION = 1e-9


def as_index(alpha: Iterable[int]) -> MultiIndex:
    """Coerce an iterable of integers into a hashable multi-index."""
    return tuple(int(a) for a in alpha)


def one_norm(alpha: Sequence[int]) -> int:
    return int(sum(abs(int(a)) for a in alpha))


def inf_norm(alpha: Sequence[int]) -> int:
    return int(max((abs(int(a)) for a in alpha), default=0))


def negate(alpha: Sequence[int]) -> MultiIndex:
    return tuple(-int(a) for a in alpha)


def canonical(alpha: Sequence[int]) -> MultiIndex:
    """Representative of ``{alpha, -alpha}`` whose first nonzero entry is positive."""
    for a in alpha:
        if a > 0:
            return tuple(alpha)
        if a < 0:
            return negate(alpha)
    return tuple(alpha)


def is_canonical(alpha: Sequence[int]) -> bool:
    return canonical(alpha) == tuple(alpha)


def graded_key(alpha: Sequence[int]) -> tuple:
    """Sort key for ascending graded lexicographic order.

    Indices are compared by one-norm first, then lexicographically, so the
    smallest monomials come first: ``(0, 1)`` precedes ``(1, 0)``.
    """
    return (one_norm(alpha), tuple(int(a) for a in alpha))


@dataclass(frozen=True)
class SparsePolynomial:
    """Real polynomial stored as a map from exponents to nonzero coefficients.

    Attributes:
        dimension: Number of variables ``n``.
        terms: Mapping from nonnegative exponent tuples to coefficients.
    """

    dimension: int
    terms: Mapping[MultiIndex, float] = field(default_factory=dict)

    def __post_init__(self):
        if int(self.dimension) < 1:
            raise InputError(f"dimension must be >= 1, got {self.dimension}")
        clean: dict[MultiIndex, float] = {}
        for exponent, coef in dict(self.terms).items():
            beta = as_index(exponent)
            if len(beta) != self.dimension:
                raise InputError(
                    f"exponent {beta} has length {len(beta)}, expected {self.dimension}"
                )
            if any(b < 0 for b in beta):
                raise InputError(f"exponent {beta} has a negative entry")
            c = float(np.real(coef))
            if not math.isfinite(c):
                raise InputError(f"coefficient of {beta} is not finite")
            if c != 0.0:
                clean[beta] = clean.get(beta, 0.0) + c
        clean = {b: c for b, c in clean.items() if c != 0.0}
        object.__setattr__(self, "dimension", int(self.dimension))
        object.__setattr__(self, "terms", dict(sorted(clean.items(), key=lambda t: graded_key(t[0]))))

    @property
    def sparsity(self) -> int:
        return len(self.terms)

    @property
    def support(self) -> list[MultiIndex]:
        return list(self.terms)

    @property
    def degree(self) -> int:
        return max((sum(b) for b in self.terms), default=0)

    def one_norm(self) -> float:
        return float(sum(abs(c) for c in self.terms.values()))

    def two_norm(self) -> float:
        return float(math.sqrt(sum(c * c for c in self.terms.values())))

    def exponent_array(self) -> np.ndarray:
        if not self.terms:
            return np.zeros((0, self.dimension), dtype=np.int64)
        return np.array(list(self.terms), dtype=np.int64)

    def coefficient_array(self) -> np.ndarray:
        return np.array(list(self.terms.values()), dtype=float)

    def __call__(self, z: Sequence[complex]) -> complex:
        z = np.asarray(z, dtype=complex)
        if z.shape != (self.dimension,):
            raise InputError(f"point has shape {z.shape}, expected ({self.dimension},)")
        if not self.terms:
            return 0j
        monomials = np.prod(z[None, :] ** self.exponent_array(), axis=1)
        return complex(monomials @ self.coefficient_array())

    def pruned(self, threshold: float) -> SparsePolynomial:
        """Copy without the terms whose magnitude is below ``threshold``."""
        return SparsePolynomial(
            self.dimension, {b: c for b, c in self.terms.items() if abs(c) >= threshold}
        )

    def to_dict(self, degree_bound: int | None = None, seed: int | None = None) -> dict:
        return {
            "dimension": self.dimension,
            "degree_bound": int(self.degree if degree_bound is None else degree_bound),
            "terms": [
                {"exponent": list(b), "coefficient": c} for b, c in self.terms.items()
            ],
            "seed": seed,
        }

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for beta, c in self.terms.items():
            mono = "*".join(
                f"x{j + 1}" + (f"^{e}" if e > 1 else "") for j, e in enumerate(beta) if e
            )
            parts.append(f"{c:+g}" + (f"*{mono}" if mono else ""))
        return " ".join(parts)


@dataclass(frozen=True)
class BasePoint:
    """Point ``phi`` whose powers are the evaluation points.

    Use the constructors :meth:`roots_of_unity`, :meth:`integer_angles` and
    :meth:`real_box` rather than building instances directly.
    """

    dimension: int
    coordinates: np.ndarray
    scheme: str
    orders: tuple[int, ...] | None = None
    angles: tuple[float, ...] | None = None

    @classmethod
    def roots_of_unity(cls, dimension: int, order: int | Sequence[int]) -> BasePoint:
        orders = (int(order),) * dimension if np.isscalar(order) else tuple(int(o) for o in order)
        if len(orders) != dimension:
            raise InputError("one root-of-unity order per coordinate is required")
        if any(o < 2 for o in orders):
            raise InputError(f"root-of-unity orders must be >= 2, got {orders}")
        coords = np.exp(2j * np.pi / np.array(orders, dtype=float))
        return cls(dimension, coords, ROOTS_OF_UNITY, orders=orders)

    @classmethod
    def integer_angles(cls, dimension: int, theta: float | Sequence[float] = 1.0) -> BasePoint:
        angles = (float(theta),) * dimension if np.isscalar(theta) else tuple(float(t) for t in theta)
        if len(angles) != dimension:
            raise InputError("one angle per coordinate is required")
        coords = np.exp(1j * np.array(angles))
        return cls(dimension, coords, INTEGER_ANGLES, angles=angles)

    @classmethod
    def real_box(cls, coordinates: Sequence[float]) -> BasePoint:
        coords = np.asarray(coordinates, dtype=float)
        if np.any(np.abs(coords) >= 1):
            raise InputError("real-box coordinates must lie in (-1, 1)")
        return cls(len(coords), coords.astype(complex), REAL_BOX)

    @property
    def on_torus(self) -> bool:
        return self.scheme in TORUS_SCHEMES

    def power(self, alpha: Sequence[int]) -> np.ndarray:
        """Evaluation point ``phi**alpha`` (coordinatewise powers)."""
        a = np.asarray(alpha, dtype=np.int64)
        if a.shape != (self.dimension,):
            raise InputError(f"index {tuple(alpha)} does not have length {self.dimension}")
        if self.scheme == ROOTS_OF_UNITY:
            orders = np.array(self.orders)
            return np.exp(2j * np.pi * np.mod(a, orders) / orders)
        if self.scheme == INTEGER_ANGLES:
            return np.exp(1j * np.array(self.angles) * a)
        if np.any((a < 0) & (self.coordinates == 0)):
            raise InputError("negative power of a zero coordinate")
        return self.coordinates ** a

    def atom(self, beta: Sequence[int]) -> np.ndarray:
        """Torus atom ``phi**beta`` associated with the monomial ``x**beta``."""
        return self.power(beta)

    def default_decode_tol(self) -> float:
        if self.scheme == ROOTS_OF_UNITY:
            return float(np.pi / max(self.orders))
        return 0.05

    def to_dict(self) -> dict:
        out = {"scheme": self.scheme, "dimension": self.dimension}
        if self.orders is not None:
            out["orders"] = list(self.orders)
        if self.angles is not None:
            out["angles"] = list(self.angles)
        if self.scheme == REAL_BOX:
            out["coordinates"] = [float(c.real) for c in self.coordinates]
        return out


class AtomicMeasure:
    """Signed finite measure ``sum_i w_i * delta_{xi_i}`` with real weights.

    Args:
        dimension: Ambient dimension ``n``.
        points: Array of shape ``(r, n)`` with the atom locations.
        weights: Array of shape ``(r,)`` with real weights.
        check: Raise :class:`ConfigurationError` when two atoms coincide.
    """

    def __init__(self, dimension: int, points=(), weights=(), check: bool = True):
        self.dimension = int(dimension)
        pts = np.asarray(points, dtype=complex).reshape(-1, self.dimension)
        w = np.real(np.asarray(weights, dtype=complex)).astype(float).reshape(-1)
        if pts.shape[0] != w.shape[0]:
            raise InputError("points and weights have different lengths")
        self.points = pts
        self.weights = w
        self.notes: list[str] = []
        self.points.setflags(write=False)
        self.weights.setflags(write=False)
        if check:
            pair = self.closest_pair()
            if pair is not None and pair[2] <= ATOM_SEPARATION:
                raise ConfigurationError(
                    f"atoms {pair[0]} and {pair[1]} coincide (distance {pair[2]:.2e})"
                )

    def __len__(self) -> int:
        return self.points.shape[0]

    def __repr__(self) -> str:
        return f"AtomicMeasure(dimension={self.dimension}, atoms={len(self)}, tv={self.tv_norm():.6g})"

    def closest_pair(self) -> tuple[int, int, float] | None:
        r = len(self)
        if r < 2:
            return None
        diff = self.points[:, None, :] - self.points[None, :, :]
        dist = np.linalg.norm(diff, axis=2)
        dist[np.diag_indices(r)] = np.inf
        i, j = np.unravel_index(np.argmin(dist), dist.shape)
        return int(min(i, j)), int(max(i, j)), float(dist[i, j])

    def tv_norm(self) -> float:
        return float(np.sum(np.abs(self.weights)))

    def moments(self, alphas) -> np.ndarray:
        """Moments ``sum_i w_i * xi_i**alpha`` for each row of ``alphas``."""
        a = np.asarray(alphas, dtype=np.int64).reshape(-1, self.dimension)
        if len(self) == 0:
            return np.zeros(a.shape[0], dtype=complex)
        if np.any(self.points == 0) and np.any(a < 0):
            raise InputError("negative moment of a measure with an atom on a coordinate plane")
        logs = np.log(self.points.astype(complex))
        powers = np.exp(a @ logs.T)
        return powers @ self.weights

    def moment(self, alpha: Sequence[int]) -> complex:
        return complex(self.moments([alpha])[0])

    def positive_part(self) -> AtomicMeasure:
        keep = self.weights > 0
        return AtomicMeasure(self.dimension, self.points[keep], self.weights[keep], check=False)

    def negative_part(self) -> AtomicMeasure:
        keep = self.weights < 0
        return AtomicMeasure(self.dimension, self.points[keep], -self.weights[keep], check=False)

    def __sub__(self, other: AtomicMeasure) -> AtomicMeasure:
        return AtomicMeasure(
            self.dimension,
            np.vstack([self.points, other.points]),
            np.concatenate([self.weights, -other.weights]),
            check=False,
        )

    def merged(self, tol: float = ATOM_SEPARATION) -> AtomicMeasure:
        """Combine atoms closer than ``tol`` by summing their weights."""
        pts, ws = [], []
        for p, w in zip(self.points, self.weights):
            for k, q in enumerate(pts):
                if np.linalg.norm(p - q) <= tol:
                    ws[k] += w
                    break
            else:
                pts.append(p)
                ws.append(w)
        return AtomicMeasure(self.dimension, np.array(pts).reshape(-1, self.dimension), ws, check=False)


def measure_from_polynomial(g: SparsePolynomial, phi: BasePoint) -> AtomicMeasure:
    """Atomic measure with atoms ``phi**beta`` and weights ``g_beta``.

    Raises:
        ConfigurationError: if two exponents of ``g`` map to the same atom, or a
            root-of-unity order does not exceed the largest exponent.
    """
    if g.dimension != phi.dimension:
        raise InputError("polynomial and base point dimensions differ")
    if phi.scheme == ROOTS_OF_UNITY and g.terms:
        top = g.exponent_array().max(axis=0)
        for j, (t, order) in enumerate(zip(top, phi.orders)):
            if t >= order:
                raise ConfigurationError(
                    f"order {order} in coordinate {j} does not exceed exponent {t}"
                )
    support = g.support
    points = np.array([phi.atom(b) for b in support]).reshape(-1, g.dimension)
    measure = AtomicMeasure(g.dimension, points, g.coefficient_array(), check=False)
    pair = measure.closest_pair()
    if pair is not None and pair[2] <= ATOM_SEPARATION:
        raise ConfigurationError(
            f"exponents {support[pair[0]]} and {support[pair[1]]} map to the same atom"
        )
    return measure


@dataclass(frozen=True)
class NoiseModel:
    """Additive complex noise with real and imaginary parts uniform on ``[-a, a]``."""

    amplitude: float = 0.1
    rng_seed: int = 0

    def __post_init__(self):
        if self.amplitude < 0:
            raise InputError("noise amplitude must be nonnegative")

    def stream(self) -> np.random.Generator:
        return np.random.default_rng(self.rng_seed)

    def draw(self, rng: np.random.Generator) -> complex:
        re, im = rng.uniform(-self.amplitude, self.amplitude, size=2)
        return complex(re, im)


class EvaluationOracle:
    """Black-box access to a hidden polynomial.

    Repeated queries at the same point are served from a cache, so
    :attr:`evaluations` counts distinct points only. Noise, when configured,
    is drawn once per distinct point in query order.
    """

    def __init__(self, target: SparsePolynomial, noise: NoiseModel | None = None):
        self._target = target
        self.noise = noise
        self._rng = noise.stream() if noise is not None else None
        self._cache: dict[tuple, complex] = {}
        self._lock = threading.Lock()

    @property
    def dimension(self) -> int:
        return self._target.dimension

    @property
    def evaluations(self) -> int:
        return len(self._cache)

    @staticmethod
    def _key(z: np.ndarray) -> tuple:
        return tuple(np.round(np.concatenate([z.real, z.imag]), 12).tolist())

    def evaluate(self, point: Sequence[complex]) -> complex:
        z = np.asarray(point, dtype=complex).reshape(-1)
        if z.shape[0] != self.dimension:
            raise InputError(f"point has {z.shape[0]} coordinates, expected {self.dimension}")
        key = self._key(z)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        with self._lock:
            cached = self._cache.get(key)
            if cached is not None:
                return cached
            value = self._target(z)
            if self._rng is not None:
                value += self.noise.draw(self._rng)
            self._cache[key] = value
            return value

    def reset(self) -> None:
        """Forget cached values; the noise stream restarts from its seed."""
        with self._lock:
            self._cache.clear()
            self._rng = self.noise.stream() if self.noise is not None else None


def evaluate(oracle: EvaluationOracle, point: Sequence[complex]) -> complex:
    return oracle.evaluate(point)


def polynomial_from_dict(data: Mapping) -> tuple[SparsePolynomial, int, int | None]:
    """Parse the JSON instance format into ``(polynomial, degree_bound, seed)``."""
    try:
        n = int(data["dimension"])
        terms = {as_index(t["exponent"]): float(t["coefficient"]) for t in data["terms"]}
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed instance: {exc}") from exc
    g = SparsePolynomial(n, terms)
    bound = int(data.get("degree_bound", g.degree))
    seed = data.get("seed")
    return g, bound, (None if seed is None else int(seed))


def load_instance(path) -> tuple[SparsePolynomial, int, int | None]:
    with open(path) as fh:
        return polynomial_from_dict(json.load(fh))


def save_instance(path, g: SparsePolynomial, degree_bound: int | None = None, seed: int | None = None) -> None:
    with open(path, "w") as fh:
        json.dump(g.to_dict(degree_bound, seed), fh, indent=2)


@dataclass(frozen=True)
class NamedInstance:
    name: str
    polynomial: SparsePolynomial
    degree_bound: int


def bundled_instances() -> list[NamedInstance]:
    """The ten fixed benchmark polynomials shipped with the package."""
    text = resources.files("sparseinterp").joinpath("data/instances.json").read_text()
    out = []
    for entry in json.loads(text):
        g, bound, _ = polynomial_from_dict(entry)
        out.append(NamedInstance(entry["name"], g, bound))
    return out


def bundled_instance(name: str) -> NamedInstance:
    for inst in bundled_instances():
        if inst.name == name:
            return inst
    raise InputError(f"no bundled instance named {name!r}")
