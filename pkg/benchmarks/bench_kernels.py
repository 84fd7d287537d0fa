"""Compare the compiled kernels with the numpy fallback.

Usage::

    python benchmarks/bench_kernels.py [--repeat 5]

Prints one line per kernel and input size with the best time of each backend
and the speed-up. Both backends are also checked to agree on every input.
"""

import argparse
import time

import numpy as np

from sparseinterp import _fallback
from sparseinterp.core import BasePoint, EvaluationOracle, bundled_instance
from sparseinterp.moments import IndexScheme, collect_moments
from sparseinterp.sdp import build_hierarchy_step

try:
    from sparseinterp import _kernels
except ImportError:
    _kernels = None


def best_time(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def jacobi_case(size, rng):
    A = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    W = np.ascontiguousarray(A.T)
    return W, np.eye(size, dtype=complex)


def bench_jacobi(impl, W0, Vt0, repeat):
    def run():
        W, Vt = W0.copy(), Vt0.copy()
        impl.jacobi_sweeps(W, Vt, W.shape[1] * np.finfo(float).eps, 80)
        return W
    return best_time(run, repeat), run()


def schur_case(name, kind, d, rng):
    g = bundled_instance(name).polynomial
    phi = BasePoint.integer_angles(g.dimension)
    seq = collect_moments(EvaluationOracle(g), phi, IndexScheme(kind, d, g.dimension))
    prog = build_hierarchy_step(seq, d, d, IndexScheme(kind, d, g.dimension))
    block = prog.blocks[0]
    k = block.size

    def spd():
        B = rng.standard_normal((k, k))
        return np.ascontiguousarray(B @ B.T + k * np.eye(k))

    return prog.n_vars, block, spd(), spd()


def bench_schur(impl, m, block, X, W, repeat):
    def run():
        M = np.zeros((m, m))
        impl.schur_accumulate(M, block.row, block.col, block.var, block.val, X, W)
        return M
    return best_time(run, repeat), run()


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if _kernels is None:
        print("compiled extension not built; only the fallback is available")
        return
    rng = np.random.default_rng(0)
    print(f"{'kernel':<28}{'compiled [s]':>14}{'fallback [s]':>14}{'speed-up':>10}")
    for size in (20, 40, 80):
        W, Vt = jacobi_case(size, rng)
        tc, rc = bench_jacobi(_kernels, W, Vt, args.repeat)
        tf, rf = bench_jacobi(_fallback, W, Vt, max(1, args.repeat // 2))
        assert np.allclose(np.linalg.norm(rc, axis=1), np.linalg.norm(rf, axis=1))
        print(f"{'jacobi_sweeps n=' + str(size):<28}{tc:>14.4f}{tf:>14.4f}{tf / tc:>10.1f}")
    for name, kind, d in (("p4", "a1", 4), ("p8", "a1", 3), ("p9", "a1", 2)):
        m, block, X, W = schur_case(name, kind, d, rng)
        tc, rc = bench_schur(_kernels, m, block, X, W, args.repeat)
        tf, rf = bench_schur(_fallback, m, block, X, W, args.repeat)
        assert np.allclose(rc, rf, rtol=1e-10, atol=1e-8)
        label = f"schur {name} d={d} ({block.size}x{block.size})"
        print(f"{label:<28}{tc:>14.4f}{tf:>14.4f}{tf / tc:>10.1f}")


if __name__ == "__main__":
    main()
