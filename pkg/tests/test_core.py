import json
import threading

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparseinterp.core import (
    AtomicMeasure,
    BasePoint,
    EvaluationOracle,
    NoiseModel,
    SparsePolynomial,
    bundled_instance,
    bundled_instances,
    canonical,
    inf_norm,
    is_canonical,
    load_instance,
    measure_from_polynomial,
    one_norm,
    polynomial_from_dict,
    save_instance,
)
from sparseinterp.errors import ConfigurationError, InputError


def sparse_polys(max_n=3, max_deg=8, max_terms=5):
    @st.composite
    def build(draw):
        n = draw(st.integers(1, max_n))
        exps = draw(st.lists(st.tuples(*[st.integers(0, max_deg)] * n), min_size=1,
                             max_size=max_terms, unique=True))
        coefs = draw(st.lists(st.floats(0.1, 10.0) | st.floats(-10.0, -0.1),
                              min_size=len(exps), max_size=len(exps)))
        return SparsePolynomial(n, dict(zip(exps, coefs)))
    return build()


class TestMultiIndex:
    def test_norms(self):
        assert one_norm((1, -3, 2)) == 6
        assert inf_norm((1, -3, 2)) == 3

    def test_canonical_representative(self):
        assert canonical((0, -1, 2)) == (0, 1, -2)
        assert canonical((0, 1, -2)) == (0, 1, -2)
        assert canonical((0, 0)) == (0, 0)
        assert is_canonical((2, -5)) and not is_canonical((-2, 5))


class TestSparsePolynomial:
    def test_zero_coefficients_dropped(self):
        g = SparsePolynomial(2, {(1, 0): 0.0, (0, 1): 2.0})
        assert g.sparsity == 1 and g.support == [(0, 1)]

    def test_rejects_negative_exponent(self):
        with pytest.raises(InputError):
            SparsePolynomial(1, {(-1,): 1.0})

    def test_rejects_wrong_length(self):
        with pytest.raises(InputError):
            SparsePolynomial(2, {(1,): 1.0})

    def test_one_norm_zero_iff_empty(self):
        assert SparsePolynomial(3).one_norm() == 0.0
        assert SparsePolynomial(1, {(0,): -0.5}).one_norm() == 0.5

    def test_evaluate_coefficient_sum_at_one(self, showcase):
        assert showcase([1.0]) == pytest.approx(-2.0)

    def test_evaluate_bivariate_at_ones(self):
        g = SparsePolynomial(2, {(1, 1): 0.8, (1, 2): -1.0})
        assert g([1.0, 1.0]) == pytest.approx(-0.2)

    def test_json_round_trip(self, tmp_path):
        g = SparsePolynomial(2, {(1, 1): 0.8, (1, 2): -1.0})
        path = tmp_path / "g.json"
        save_instance(path, g, 10, 7)
        data = json.loads(path.read_text())
        assert set(data) == {"dimension", "degree_bound", "terms", "seed"}
        h, bound, seed = load_instance(path)
        assert h == g and bound == 10 and seed == 7

    def test_malformed_json(self):
        with pytest.raises(InputError):
            polynomial_from_dict({"dimension": 1})


class TestBasePoint:
    def test_roots_of_unity(self):
        phi = BasePoint.roots_of_unity(2, 101)
        assert np.allclose(phi.coordinates, np.exp(2j * np.pi / 101))
        assert np.allclose(phi.power((101, -1)), [1.0, np.exp(-2j * np.pi / 101)])

    def test_integer_angles_default(self):
        phi = BasePoint.integer_angles(3)
        assert np.allclose(phi.coordinates, np.exp(1j))
        assert np.allclose(np.abs(phi.coordinates), 1.0, atol=1e-12)

    def test_roots_of_unity_order_check(self):
        with pytest.raises(InputError):
            BasePoint.roots_of_unity(1, 1)

    def test_real_box_inside_interval(self):
        with pytest.raises(InputError):
            BasePoint.real_box([0.5, 1.0])
        assert not BasePoint.real_box([0.5, -0.2]).on_torus


class TestAtomicMeasure:
    def test_tv_and_moments(self):
        mu = AtomicMeasure(1, [[1j], [-1j]], [1.0, 1.0])
        assert mu.tv_norm() == 2.0
        assert mu.moment((1,)) == pytest.approx(0.0)
        assert mu.moment((2,)) == pytest.approx(-2.0)

    def test_rejects_coincident_atoms(self):
        with pytest.raises(ConfigurationError):
            AtomicMeasure(1, [[1.0], [1.0 + 1e-12]], [1.0, 2.0])

    def test_merge(self):
        mu = AtomicMeasure(1, [[1.0], [1.0]], [1.0, 2.0], check=False).merged()
        assert len(mu) == 1 and mu.weights[0] == 3.0


class TestMeasureFromPolynomial:
    def test_constant(self):
        mu = measure_from_polynomial(SparsePolynomial(2, {(0, 0): 4.0}), BasePoint.integer_angles(2))
        assert np.allclose(mu.points, [[1.0, 1.0]]) and mu.weights.tolist() == [4.0]

    def test_showcase_tv(self, showcase):
        mu = measure_from_polynomial(showcase, BasePoint.integer_angles(1))
        assert len(mu) == 3 and mu.tv_norm() == pytest.approx(10.0)

    def test_collision_names_exponents(self):
        g = SparsePolynomial(1, {(0,): 1.0, (4,): 1.0})
        with pytest.raises(ConfigurationError, match="order 4"):
            measure_from_polynomial(g, BasePoint.roots_of_unity(1, 4))

    def test_random_roots_of_unity_moments_match_oracle(self, rng):
        phi = BasePoint.roots_of_unity(1, 101)
        exps = rng.choice(101, size=4, replace=False)
        g = SparsePolynomial(1, {(int(e),): float(c) for e, c in zip(exps, rng.uniform(1, 5, 4))})
        mu = measure_from_polynomial(g, phi)
        oracle = EvaluationOracle(g)
        for a in range(5):
            assert mu.moment((a,)) == pytest.approx(oracle.evaluate(phi.power((a,))), abs=1e-10)

    @settings(max_examples=60, deadline=None)
    @given(g=sparse_polys(), alpha_seed=st.integers(0, 2**32 - 1))
    def test_moment_identity_and_tv(self, g, alpha_seed):
        phi = BasePoint.integer_angles(g.dimension)
        mu = measure_from_polynomial(g, phi)
        alphas = np.random.default_rng(alpha_seed).integers(-6, 7, size=(5, g.dimension))
        vals = np.array([g(phi.power(a)) for a in alphas])
        assert np.allclose(mu.moments(alphas), vals, atol=1e-10 * (1 + g.one_norm()))
        assert abs(mu.tv_norm() - g.one_norm()) <= 1e-12 * g.one_norm()
        # conjugate symmetry on the torus
        assert np.allclose(mu.moments(-alphas), np.conj(vals), atol=1e-10 * (1 + g.one_norm()))


class TestOracle:
    def test_counts_distinct_points(self):
        g = SparsePolynomial(1, {(1,): 1.0})
        o = EvaluationOracle(g)
        o.evaluate([1j])
        o.evaluate([1j])
        o.evaluate([-1j])
        assert o.evaluations == 2

    def test_dimension_mismatch(self):
        with pytest.raises(InputError):
            EvaluationOracle(SparsePolynomial(2, {(1, 0): 1.0})).evaluate([1.0])

    def test_noise_is_bounded_and_reproducible(self):
        g = SparsePolynomial(1, {(0,): 1.0})
        pts = [[np.exp(1j * k)] for k in range(50)]
        a = EvaluationOracle(g, NoiseModel(0.1, 3))
        b = EvaluationOracle(g, NoiseModel(0.1, 3))
        va = np.array([a.evaluate(p) for p in pts])
        vb = np.array([b.evaluate(p) for p in pts])
        assert np.array_equal(va, vb)
        assert np.all(np.abs((va - 1).real) <= 0.1) and np.all(np.abs((va - 1).imag) <= 0.1)
        assert np.abs(va - 1).max() > 0.01

    def test_concurrent_reads(self):
        g = SparsePolynomial(1, {(2,): 1.0})
        o = EvaluationOracle(g, NoiseModel(0.1, 0))
        pts = [[np.exp(1j * k)] for k in range(20)]

        def work():
            for p in pts:
                o.evaluate(p)

        threads = [threading.Thread(target=work) for _ in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert o.evaluations == 20


def test_bundled_instances():
    insts = bundled_instances()
    assert [i.name for i in insts][:10] == [f"p{k}" for k in range(1, 11)]
    assert bundled_instance("p10").polynomial.dimension == 10
    assert bundled_instance("showcase").degree_bound == 100
    with pytest.raises(InputError):
        bundled_instance("nope")
