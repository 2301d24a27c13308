import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jtlab.approximation import (
    INCONCLUSIVE,
    NON_UNIQUE,
    UNIQUE,
    SolverConfig,
    Subspace,
    contractive_projection_check,
    distance_to_subspace,
    ellinf_hilbert_best_approx,
    ellinf_setting,
    objective,
    search_radius,
    spin_projection_approx,
    uniqueness_probe,
)
from jtlab.errors import FactorMismatchError, ValidationError
from jtlab.factors import Element, matrix_unit, norm, parse_factor, rectangular, spin
from jtlab.linalg import RealLinearMap
from jtlab.sampling import random_element
from jtlab.tripotents import is_tripotent, peirce

R22 = rectangular(2, 2)


def mat(M, f=R22):
    return Element.from_matrix(f, np.asarray(M, dtype=complex))


class TestSubspace:
    def test_orthonormal_gram(self, rng):
        f = parse_factor("rect:2,3")
        V = Subspace(f, [random_element(f, rng) for _ in range(4)])
        assert np.allclose(V.V.conj() @ V.V.T, np.eye(4), atol=1e-10)

    def test_keeps_unit_direction(self):
        V = Subspace(R22, [mat(np.diag([1, 0]))])
        assert V.basis[0].allclose(mat(np.diag([1, 0])))

    def test_rejects(self, rng):
        x = random_element(R22, rng)
        with pytest.raises(ValidationError):
            Subspace(R22, [x, 2 * x])
        with pytest.raises(ValidationError):
            Subspace(R22, [])
        with pytest.raises(FactorMismatchError):
            Subspace(R22, [x, Element(spin(2), [1, 0])])

    def test_dimension_limit(self, rng):
        f = parse_factor("rect:3,3")
        V = Subspace(f, [random_element(f, rng) for _ in range(9)])
        with pytest.raises(ValidationError):
            distance_to_subspace(random_element(f, rng), V)

    def test_spanning_drops_dependence(self, rng):
        x, y = random_element(R22, rng), random_element(R22, rng)
        V = Subspace.spanning(R22, [x, y, x + y])
        assert V.dim == 2
        assert Subspace.spanning(R22, [Element.zero(R22)]) is None

    def test_json(self, rng):
        V = Subspace(R22, [random_element(R22, rng)])
        W = Subspace.from_json(json.loads(json.dumps(V.to_json())))
        assert np.allclose(W.V, V.V)


class TestConfig:
    def test_from_mapping(self):
        cfg = SolverConfig.from_mapping({"starts": "8", "eps_f": 1e-7, "seed": 3})
        assert cfg.starts == 8 and cfg.eps_f == 1e-7 and cfg.seed == 3
        with pytest.raises(ValidationError):
            SolverConfig.from_mapping({"bogus": 1})
        with pytest.raises(ValidationError):
            SolverConfig(eps_f=-1)


class TestDistance:
    def test_member(self, rng):
        f = parse_factor("rect:2,3")
        V = Subspace(f, [random_element(f, rng) for _ in range(2)])
        c = np.array([0.5 - 1j, 2.0])
        r = distance_to_subspace(V.element(c), V)
        assert r.distance <= 1e-8
        assert np.allclose(r.coefficients, c, atol=1e-6)
        assert r.verdict == UNIQUE

    def test_identity_against_corner(self):
        r = distance_to_subspace(mat(np.eye(2)), Subspace(R22, [mat(np.diag([1, 0]))]))
        assert r.distance == pytest.approx(1.0, abs=1e-9)
        assert r.verdict == NON_UNIQUE and r.spread >= 1.0

    def test_hilbert_projection(self):
        f = rectangular(1, 2)
        r = distance_to_subspace(Element(f, [1, 1]), Subspace(f, [Element(f, [1, 0])]))
        assert r.distance == pytest.approx(1.0, abs=1e-9)
        assert r.coefficients[0] == pytest.approx(1.0, abs=1e-6)
        assert r.verdict == UNIQUE

    def test_zero_target(self):
        r = distance_to_subspace(Element.zero(R22), Subspace(R22, [mat(np.eye(2))]))
        assert r.distance == 0 and r.verdict == UNIQUE

    @given(st.integers(0, 2**32 - 1), st.sampled_from(["rect:2,2", "spin:4", "sym:2", "sum:rect:1,2,spin:3"]))
    @settings(max_examples=25)
    def test_invariants(self, seed, text):
        rng = np.random.default_rng(seed)
        f = parse_factor(text)
        x = random_element(f, rng)
        V = Subspace(f, [random_element(f, rng) for _ in range(2)])
        cfg = SolverConfig(seed=seed % 1000)
        r = distance_to_subspace(x, V, cfg)
        assert 0 <= r.distance <= norm(x) + 1e-12
        for c, val in r.candidates:
            assert val <= r.distance + cfg.eps_f
            assert objective(x, V, c) == pytest.approx(val, abs=1e-12)
        objs = [val for _, val in r.candidates]
        assert objs == sorted(objs)

    def test_search_bound_contains_minimizers(self, rng):
        f = parse_factor("rect:2,3")
        for _ in range(10):
            x = random_element(f, rng)
            V = Subspace(f, [random_element(f, rng)])
            r = distance_to_subspace(x, V)
            assert np.linalg.norm(r.coefficients) <= search_radius(x)
            # just outside the bound the objective exceeds ||x||
            d = np.array([1.0 + 0j])
            assert objective(x, V, 1.01 * search_radius(x) * d) > norm(x)

    def test_convexity(self, rng):
        f = parse_factor("sum:rect:2,2,spin:3")
        x = random_element(f, rng)
        V = Subspace(f, [random_element(f, rng) for _ in range(2)])
        for _ in range(100):
            a = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            b = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            mid = objective(x, V, 0.5 * (a + b))
            assert mid <= 0.5 * (objective(x, V, a) + objective(x, V, b)) + 1e-10

    def test_deterministic(self, rng):
        x = random_element(R22, rng)
        V = Subspace(R22, [random_element(R22, rng)])
        a = distance_to_subspace(x, V, SolverConfig(seed=4)).to_json()
        b = distance_to_subspace(x, V, SolverConfig(seed=4)).to_json()
        assert json.dumps(a) == json.dumps(b)

    def test_mismatch(self):
        with pytest.raises(FactorMismatchError):
            distance_to_subspace(Element(spin(2), [1, 0]), Subspace(R22, [mat(np.eye(2))]))


class TestProbe:
    def test_bp_line_unique(self, rng):
        V = Subspace(R22, [mat(np.diag([1, 2]))])
        for _ in range(20):
            assert uniqueness_probe(random_element(R22, rng), V).verdict == UNIQUE

    def test_witness_pair(self):
        p = uniqueness_probe(mat(np.eye(2)), Subspace(R22, [mat(np.diag([1, 0]))]))
        assert p.verdict == NON_UNIQUE
        a, b = p.witness
        assert abs(p.witness_objectives[0] - p.witness_objectives[1]) <= 1e-6
        assert p.separation >= 1.0
        # the analytic witnesses lambda = 0 and lambda = 1 are both optimal
        V = Subspace(R22, [mat(np.diag([1, 0]))])
        assert objective(mat(np.eye(2)), V, [0]) == pytest.approx(1.0)
        assert objective(mat(np.eye(2)), V, [1]) == pytest.approx(1.0)

    def test_annihilator_family(self):
        # b = w22 annihilates e = w11; every c + lambda e with |lambda| <= dist is optimal
        V = Subspace(R22, [matrix_unit(R22, 0, 0)])
        p = uniqueness_probe(matrix_unit(R22, 1, 1), V)
        assert p.verdict == NON_UNIQUE
        assert p.approx.distance == pytest.approx(1.0, abs=1e-9)
        for lam in np.exp(2j * np.pi * np.linspace(0, 1, 9)):
            assert objective(matrix_unit(R22, 1, 1), V, [lam]) == pytest.approx(1.0, abs=1e-12)

    def test_inconclusive_when_delta_tiny(self):
        f = rectangular(1, 2)
        p = uniqueness_probe(Element(f, [1, 1]), Subspace(f, [Element(f, [1, 0])]), eps_f=1e-2, delta=1e-3)
        assert p.verdict in (INCONCLUSIVE, NON_UNIQUE)
        assert p.verdict != UNIQUE

    def test_never_unique_with_witness(self, rng):
        for _ in range(10):
            x = random_element(R22, rng)
            p = uniqueness_probe(x, Subspace(R22, [mat(np.diag([1, 0]))]))
            if p.witness is not None:
                assert p.verdict == NON_UNIQUE

    def test_json(self):
        p = uniqueness_probe(mat(np.eye(2)), Subspace(R22, [mat(np.diag([1, 0]))]))
        js = json.loads(json.dumps(p.to_json()))
        assert js["verdict"] == NON_UNIQUE and js["witness"]["separation"] >= 1


class TestEllInfHilbert:
    def test_examples(self):
        r = ellinf_hilbert_best_approx([[1, 0], [0, 1]])
        assert np.allclose(r.coefficients, [0.5, 0.5]) and r.distance == pytest.approx(np.sqrt(2) / 2)
        h = [1 - 2j, 0.5]
        r = ellinf_hilbert_best_approx([h, h, h])
        assert r.distance == 0 and np.allclose(r.coefficients, h)
        r = ellinf_hilbert_best_approx([[1, 0], [-1, 0]])
        assert np.allclose(r.coefficients, 0) and r.distance == pytest.approx(1.0)
        assert r.verdict == UNIQUE

    def test_ragged(self):
        with pytest.raises(ValidationError):
            ellinf_hilbert_best_approx([[1, 0], [1]])

    def test_generic_solver_agrees(self, rng):
        for _ in range(10):
            rows = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
            exact = ellinf_hilbert_best_approx(rows)
            x, V = ellinf_setting(rows)
            r = distance_to_subspace(x, V)
            assert r.distance == pytest.approx(exact.distance, abs=1e-6)
            assert np.linalg.norm(r.coefficients / np.sqrt(3) - exact.coefficients) <= 1e-4


class TestSpinProjection:
    def test_examples(self):
        f = spin(2)
        K = Subspace(f, [Element(f, [1, 0])])
        assert spin_projection_approx(Element(f, [2 - 1j, 3j]), K).allclose(Element(f, [2 - 1j, 0]))
        x = Element(f, [0.5j, 0])
        assert spin_projection_approx(x, K).allclose(x)
        eta, xi = Element(f, [1, 0]), Element(f, [0, 1])
        assert norm(eta + xi) ** 2 == pytest.approx(2) and norm(eta) ** 2 == pytest.approx(1)

    def test_rejects_non_invariant(self):
        f = spin(3)
        with pytest.raises(ValidationError):
            spin_projection_approx(Element(f, [1, 0, 0]), Subspace(f, [Element(f, [1, 1j, 0])]))
        with pytest.raises(FactorMismatchError):
            spin_projection_approx(mat(np.eye(2)), Subspace(R22, [mat(np.eye(2))]))

    def test_optimal(self, rng):
        f = spin(6)
        Q, _ = np.linalg.qr(rng.standard_normal((6, 3)))
        K = Subspace(f, [Element(f, Q[:, j]) for j in range(3)])
        for _ in range(30):
            x = random_element(f, rng)
            px = spin_projection_approx(x, K)
            r = distance_to_subspace(x, K, SolverConfig(starts=4))
            assert r.distance >= norm(x - px) - 1e-6
            assert np.linalg.norm(r.coefficients - K.coordinates(px)) <= 1e-4


class TestContractiveProjection:
    def test_peirce_zero(self, rng):
        f = rectangular(3, 3)
        e = is_tripotent(matrix_unit(f, 0, 0))
        V = Subspace(f, [matrix_unit(f, 1, 1) + matrix_unit(f, 2, 2)])
        xs = [random_element(f, rng) for _ in range(5)]
        out = contractive_projection_check(peirce(e).P0, V, xs)
        assert out.passed, out.to_json()
        assert any(s.get("status") == "holds" for s in out.samples)

    def test_identity_and_zero(self, rng):
        V = Subspace(R22, [mat(np.diag([1, 2]))])
        xs = [random_element(R22, rng) for _ in range(3)]
        assert contractive_projection_check(RealLinearMap.identity(4), V, xs).passed
        # P = 0 satisfies the hypotheses trivially: Px = 0 has best approximation 0
        out = contractive_projection_check(RealLinearMap.zero(4), V, xs)
        assert out.preconditions["idempotent"] and out.preconditions["P(V)⊆V"]
        assert out.passed

    def test_precondition_violation_reported(self, rng):
        V = Subspace(R22, [mat(np.diag([1, 2]))])
        P = RealLinearMap.scalar(4, 2.0)
        out = contractive_projection_check(P, V, [random_element(R22, rng)])
        assert not out.passed and not out.preconditions["idempotent"]
