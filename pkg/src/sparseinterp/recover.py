"""Decoding atoms back to exponents, and scoring recoveries."""

from __future__ import annotations

import math

import numpy as np

from .core import INTEGER_ANGLES, ROOTS_OF_UNITY, AtomicMeasure, BasePoint, SparsePolynomial
from .errors import DecodeError, InputError

WEIGHT_FLOOR = 1e-6
MODULUS_SLACK = 0.2
TWO_PI = 2.0 * np.pi


def _angular_distance(a, b):
    return np.abs(np.angle(np.exp(1j * (np.asarray(a) - np.asarray(b)))))


def decode_exponents(mu: AtomicMeasure, phi: BasePoint, degree_bound: int,
                     tol: float | None = None, nearest: bool = False,
                     weight_floor: float = WEIGHT_FLOOR) -> SparsePolynomial:
    """Map each atom ``xi`` to the exponent ``beta`` with ``phi**beta ~= xi``.

    Args:
        mu: Measure whose atoms lie (close to) the torus.
        phi: Torus base point used to produce the data.
        degree_bound: Largest exponent considered per coordinate.
        tol: Largest accepted angular distance to the decoding grid. Defaults
            to 0.05 rad for integer angles and ``pi / N`` for roots of unity.
        nearest: Project atoms to unit modulus and accept the nearest grid
            entry whatever its distance. Used for noisy data, where atoms
            drift off the torus and off the grid.
        weight_floor: Atoms with smaller absolute weight are discarded.

    Raises:
        DecodeError: if an atom is off the torus or too far from every grid
            entry (never raised when ``nearest`` is set).
    """
    if not phi.on_torus:
        raise InputError("decoding is only defined for torus base points")
    if mu.dimension != phi.dimension:
        raise InputError("measure and base point dimensions differ")
    if tol is None:
        tol = phi.default_decode_tol()
    n = mu.dimension
    terms: dict[tuple[int, ...], float] = {}
    if phi.scheme == INTEGER_ANGLES:
        ks = np.arange(degree_bound + 1)
        tables = [np.mod(ks * theta, TWO_PI) for theta in phi.angles]
    for point, weight in zip(mu.points, mu.weights):
        if abs(weight) < weight_floor:
            continue
        modulus = np.abs(point)
        # Noisy atoms are projected to xi/|xi|; the angle is all that is used.
        if not nearest and np.any(np.abs(modulus - 1.0) > MODULUS_SLACK):
            raise DecodeError(f"atom {np.round(point, 6)} is off the torus (moduli {np.round(modulus, 4)})")
        angles = np.mod(np.angle(point), TWO_PI)
        beta = []
        for j in range(n):
            if phi.scheme == ROOTS_OF_UNITY:
                order = phi.orders[j]
                k = int(np.rint(order * angles[j] / TWO_PI)) % order
                dist = float(_angular_distance(angles[j], TWO_PI * k / order))
            else:
                gaps = _angular_distance(tables[j], angles[j])
                k = int(np.argmin(gaps))
                dist = float(gaps[k])
            if dist > tol and not nearest:
                raise DecodeError(
                    f"atom {np.round(point, 6)} coordinate {j} is {dist:.3g} rad from the nearest grid angle"
                )
            beta.append(k)
        key = tuple(beta)
        terms[key] = terms.get(key, 0.0) + float(weight)
    return SparsePolynomial(n, terms)


def relative_error(g_hat: SparsePolynomial, g: SparsePolynomial) -> float:
    """Coefficient error ``100 * |g_hat - g|_2 / |g|_2`` in percent."""
    if not g.terms:
        raise InputError("reference polynomial is identically zero")
    keys = set(g.terms) | set(g_hat.terms)
    num = math.fsum((g_hat.terms.get(k, 0.0) - g.terms.get(k, 0.0)) ** 2 for k in keys)
    return 100.0 * math.sqrt(num) / g.two_norm()


def same_support(g_hat: SparsePolynomial, g: SparsePolynomial) -> bool:
    return set(g_hat.terms) == set(g.terms)
