import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import FACTOR_SHORTHANDS
from jtlab.errors import FactorMismatchError, NotTripotentError, ValidationError
from jtlab.factors import (
    Element,
    L_operator,
    apply,
    direct_sum,
    matrix_unit,
    norm,
    parse_factor,
    rectangular,
    spin,
    triple_product,
)
from jtlab.linalg import RealLinearMap
from jtlab.regularity import Peirce2Algebra
from jtlab.sampling import random_element, random_tripotent, rank_deficient_element
from jtlab.tripotents import (
    AtomicFunctional,
    Relation,
    annihilator_basis,
    complete_extension,
    is_tripotent,
    orthogonality_tests,
    peirce,
    range_tripotent,
    rank,
    relation,
    s_lambda,
    seminorm,
    spin_spectral_decomposition,
)

R22 = rectangular(2, 2)
seeds = st.integers(0, 2**32 - 1)


def w(i, j, f=R22):
    return matrix_unit(f, i - 1, j - 1)


def mat(M, f=R22):
    return Element.from_matrix(f, np.asarray(M, dtype=complex))


class TestCertificates:
    def test_matrix_unit(self):
        c = is_tripotent(w(1, 1))
        assert c.minimal and not c.complete and not c.unitary
        assert c.peirce_dims == (1, 2, 1)

    def test_identity(self):
        c = is_tripotent(mat(np.eye(2)))
        assert c.unitary and c.complete and not c.minimal

    def test_spin_real_unit_vector_is_unitary(self):
        # x = conj(x) makes L(x, x) the identity of spin(2): unitary, hence not minimal here
        c = is_tripotent(Element(spin(2), [1, 0]))
        assert c.residual <= 1e-15
        assert c.unitary and c.complete and not c.minimal

    def test_rejection_carries_residual(self):
        with pytest.raises(NotTripotentError) as info:
            is_tripotent(mat(np.diag([2, 0])))
        assert info.value.residual == pytest.approx(6.0)

    @given(seeds, st.sampled_from(FACTOR_SHORTHANDS))
    def test_random_tripotents(self, seed, text):
        e = random_tripotent(parse_factor(text), np.random.default_rng(seed), rank=1)
        assert e.residual <= 1e-9
        assert sum(e.peirce_dims) == e.factor.dimension
        if e.unitary:
            assert e.complete


class TestPeirce:
    def test_matrix_unit_ranges(self):
        D = peirce(is_tripotent(w(1, 1)))
        for k, members, others in [(2, [w(1, 1)], [w(1, 2), w(2, 1), w(2, 2)]),
                                   (1, [w(1, 2), w(2, 1)], [w(1, 1), w(2, 2)]),
                                   (0, [w(2, 2)], [w(1, 1), w(1, 2), w(2, 1)])]:
            for v in members:
                assert D.component(k, v).allclose(v)
            for v in others:
                assert norm(D.component(k, v)) <= 1e-14

    def test_unitary_and_zero(self):
        D = peirce(is_tripotent(mat(np.eye(2))))
        assert (D.P2 - RealLinearMap.identity(4)).norm() <= 1e-12
        assert D.P1.norm() <= 1e-12 and D.P0.norm() <= 1e-12
        D0 = peirce(is_tripotent(Element.zero(R22)))
        assert (D0.P0 - RealLinearMap.identity(4)).norm() == 0

    @pytest.mark.parametrize("text", FACTOR_SHORTHANDS)
    def test_projection_algebra_and_contractivity(self, text, rng):
        f = parse_factor(text)
        for r in range(1, f.rank + 1):
            e = random_tripotent(f, rng, rank=r)
            D = peirce(e)
            B = f.real_basis
            assert (D.P2 + D.P1 + D.P0 - RealLinearMap.identity(f.ambient_dim)).norm(B) <= 1e-9
            for i in range(3):
                for j in range(3):
                    target = D[i] if i == j else RealLinearMap.zero(f.ambient_dim)
                    assert (D[i] @ D[j] - target).norm(B) <= 1e-9
            for _ in range(20):
                x = random_element(f, rng)
                assert all(norm(D.component(k, x)) <= norm(x) * (1 + 1e-9) for k in range(3))

    @given(seeds, st.sampled_from(FACTOR_SHORTHANDS))
    def test_peirce_rules(self, seed, text):
        rng = np.random.default_rng(seed)
        f = parse_factor(text)
        e = random_tripotent(f, rng, rank=int(rng.integers(1, f.rank + 1)))
        D = peirce(e)
        x, y, z = (random_element(f, rng) for _ in range(3))
        scale = norm(x) * norm(y) * norm(z)
        assert norm(triple_product(D.component(2, x), D.component(0, y), z)) <= 1e-8 * scale
        assert norm(triple_product(D.component(0, x), D.component(2, y), z)) <= 1e-8 * scale
        i, j, k = rng.integers(0, 3, 3)
        p = triple_product(D.component(i, x), D.component(j, y), D.component(k, z))
        t = i - j + k
        expected = D.component(t, p) if t in (0, 1, 2) else Element.zero(f)
        assert norm(p - expected) <= 1e-8 * scale


class TestSLambda:
    def test_examples(self):
        e = is_tripotent(w(1, 1))
        assert (s_lambda(e, 1) - RealLinearMap.identity(4)).norm() <= 1e-12
        S = s_lambda(e, -1)
        assert (S @ S - RealLinearMap.identity(4)).norm() <= 1e-12
        Si = s_lambda(e, 1j)
        assert apply(Si, w(1, 1)).allclose(-w(1, 1))
        assert apply(Si, w(1, 2)).allclose(1j * w(1, 2))
        assert apply(Si, w(2, 2)).allclose(w(2, 2))

    def test_rejects_non_unit(self):
        with pytest.raises(ValidationError):
            s_lambda(is_tripotent(w(1, 1)), 1.1)

    @pytest.mark.parametrize("text", ["rect:2,3", "sym:3", "asym:4", "spin:5"])
    def test_isometric_automorphism(self, text, rng):
        f = parse_factor(text)
        e = random_tripotent(f, rng, rank=1)
        S = s_lambda(e, np.exp(1j * rng.uniform(0, 2 * np.pi)))
        for _ in range(200):
            x = random_element(f, rng)
            assert norm(apply(S, x)) == pytest.approx(norm(x), rel=1e-9)
        for _ in range(100):
            a, b, c = (random_element(f, rng) for _ in range(3))
            lhs = apply(S, triple_product(a, b, c))
            rhs = triple_product(apply(S, a), apply(S, b), apply(S, c))
            assert norm(lhs - rhs) <= 1e-9 * norm(a) * norm(b) * norm(c)


class TestRelation:
    def test_examples(self):
        assert relation(w(1, 1), w(2, 2)) is Relation.ORTHOGONAL
        assert relation(w(1, 1), w(1, 2)) is Relation.COLINEAR
        assert relation(w(1, 1), w(1, 1)) is Relation.NEITHER

    def test_mismatch(self):
        with pytest.raises(FactorMismatchError):
            relation(w(1, 1), Element(spin(2), [1, 0]))

    @pytest.mark.parametrize("text", ["rect:2,3", "sym:3", "asym:4", "spin:5", "sum:rect:2,2,spin:3"])
    def test_characterizations_agree(self, text, rng):
        f = parse_factor(text)
        for k in range(200):
            e = random_tripotent(f, rng, rank=int(rng.integers(1, f.rank + 1)))
            D = peirce(e)
            x, y = random_element(f, rng), random_element(f, rng)
            if k % 2 == 0 and not e.complete:
                a, b = D.component(2, x), D.component(0, y)
                expect = True
            else:
                a, b = x, y
                expect = False
            tests = orthogonality_tests(a, b)
            assert len(set(tests.values())) == 1
            assert all(tests.values()) == expect
            assert (relation(a, b) is Relation.ORTHOGONAL) == expect


class TestRangeTripotent:
    def test_examples(self):
        assert range_tripotent(mat(np.diag([3, 0.5]))).element.allclose(mat(np.eye(2)))
        assert norm(range_tripotent(Element.zero(R22)).element) == 0
        r = range_tripotent(Element(spin(2), [1, 1j])).element
        assert r.allclose(Element(spin(2), [0.5, 0.5j]), 1e-12)
        v = r.coords
        assert np.vdot(v, v).real == pytest.approx(0.5) and abs(np.sum(v * v)) <= 1e-14

    @given(seeds, st.sampled_from(FACTOR_SHORTHANDS), st.booleans())
    def test_dominates_and_positive(self, seed, text, deficient):
        rng = np.random.default_rng(seed)
        f = parse_factor(text)
        a = rank_deficient_element(f, rng) if deficient else random_element(f, rng)
        r = range_tripotent(a)
        D = peirce(r)
        assert norm(D.component(2, a) - a) <= 1e-8 * max(1, norm(a))
        if norm(a) > 0:
            assert Peirce2Algebra(r).is_positive(a, tol=1e-8)


class TestSpinSpectrum:
    def test_examples(self):
        s = spin_spectral_decomposition(Element(spin(2), [1, 1j]))
        assert (s.lam1, s.lam2) == pytest.approx((2, 0))
        assert s.e1.allclose(Element(spin(2), [0.5, 0.5j]), 1e-12)
        s = spin_spectral_decomposition(Element(spin(2), [1, 0]))
        assert (s.lam1, s.lam2) == pytest.approx((1, 1))
        assert s.reconstruct().allclose(Element(spin(2), [1, 0]), 1e-12)
        s = spin_spectral_decomposition(Element.zero(spin(3)))
        assert (s.lam1, s.lam2) == (0, 0)

    def test_rejects_matrix(self):
        with pytest.raises(FactorMismatchError):
            spin_spectral_decomposition(w(1, 1))

    @given(seeds, st.integers(2, 7))
    def test_properties(self, seed, d):
        a = random_element(spin(d), np.random.default_rng(seed))
        s = spin_spectral_decomposition(a)
        v = a.coords
        assert s.reconstruct().allclose(a, 1e-9)
        assert s.lam1 >= s.lam2 >= 0
        assert s.lam1 == pytest.approx(norm(a), rel=1e-9)
        assert s.lam1**2 + s.lam2**2 == pytest.approx(2 * np.vdot(v, v).real, rel=1e-9)
        assert s.lam1 * s.lam2 == pytest.approx(abs(np.sum(v * v)), abs=1e-9)
        for e in (s.e1, s.e2):
            c = is_tripotent(e)
            assert c.minimal
            assert np.vdot(e.coords, e.coords).real == pytest.approx(0.5)
            assert abs(np.sum(e.coords**2)) <= 1e-12
        assert relation(s.e1, s.e2) is Relation.ORTHOGONAL


class TestRank:
    def test_factor_table(self):
        assert rank(rectangular(2, 3)) == 2
        for n in (2, 3, 4):
            assert rank(direct_sum(*[rectangular(1, 2)] * n)) == n
        assert rank(parse_factor("asym:5")) == 2
        assert rank(spin(7)) == 2

    def test_elements(self, rng):
        assert rank(mat(np.diag([1, 0]))) == 1
        assert rank(Element(spin(2), [1, 1j])) == 1
        assert rank(Element(spin(2), [1, 0])) == 2
        for text in FACTOR_SHORTHANDS:
            f = parse_factor(text)
            assert rank(random_element(f, rng)) == f.rank

    def test_orthogonal_family_search_oracle(self, rng):
        # greedy search for pairwise orthogonal minimal tripotents never beats the table
        for text in ["rect:2,3", "sym:3", "asym:4", "asym:5", "spin:4"]:
            f = parse_factor(text)
            family = []
            for _ in range(300):
                c = random_tripotent(f, rng, rank=1).element
                for g in family:
                    c = apply(peirce(is_tripotent(g)).P0, c)
                if norm(c) > 1e-6:
                    family.append(range_tripotent(c).element)
                    family[-1] = spin_minimal(family[-1]) if f.kind == "spin" else minimal_part(family[-1])
            assert len(family) == f.rank


def minimal_part(e):
    """First minimal piece of a tripotent (by singular vectors of the matrix)."""
    f = e.factor
    M = e.matrix
    U, s, Vh = np.linalg.svd(M)
    if f.kind == "antisymmetric":
        P = U[:, :2] @ Vh[:2]
        return Element.projected(f, (0.5 * (P - P.T)).ravel())
    P = np.outer(U[:, 0], Vh[0])
    if f.kind == "symmetric":
        v = U[:, 0] * np.sqrt(np.vdot(U[:, 0].conj(), Vh[0]).conj() + 0j)
        P = np.outer(v, v)
    return range_tripotent(Element.projected(f, P.ravel())).element


def spin_minimal(e):
    return spin_spectral_decomposition(e).e1


class TestAnnihilator:
    def test_examples(self):
        basis = annihilator_basis(w(1, 1))
        assert len(basis) == 1 and abs(abs(basis[0].coords[3]) - 1) <= 1e-12
        assert annihilator_basis(mat(np.eye(2))) == []
        assert len(annihilator_basis(Element.zero(R22))) == 4

    @pytest.mark.parametrize("text", FACTOR_SHORTHANDS)
    def test_complete_tripotents_have_none(self, text, rng):
        f = parse_factor(text)
        e = random_tripotent(f, rng)
        assert e.complete
        assert annihilator_basis(e.element) == []

    @given(seeds, st.sampled_from(FACTOR_SHORTHANDS))
    def test_annihilates(self, seed, text):
        rng = np.random.default_rng(seed)
        a = rank_deficient_element(parse_factor(text), rng)
        B = annihilator_basis(a)
        G = np.array([b.coords for b in B])
        if B:
            assert np.allclose(G.conj() @ G.T, np.eye(len(B)), atol=1e-10)
        for b in B:
            assert L_operator(a, b).norm() <= 1e-8


class TestCompleteExtension:
    def test_examples(self):
        assert complete_extension(mat(np.diag([1, 0]))).element.allclose(mat(np.eye(2)), 1e-12)
        a = mat(np.diag([2, 3]))
        assert complete_extension(a).element.allclose(range_tripotent(a).element)
        assert complete_extension(Element.zero(R22)).element.allclose(mat(np.eye(2)))

    @given(seeds, st.sampled_from(FACTOR_SHORTHANDS))
    def test_extends_range_tripotent(self, seed, text):
        rng = np.random.default_rng(seed)
        x = rank_deficient_element(parse_factor(text), rng)
        e = complete_extension(x)
        r = range_tripotent(x).element
        assert e.complete
        rest = e.element - r
        is_tripotent(rest, tol=1e-8)
        assert L_operator(rest, r).norm() <= 1e-8


class TestAtomicFunctional:
    def test_examples(self):
        phi = AtomicFunctional(R22, [1, 0], [1, 0])
        assert seminorm(phi, phi.support()) == pytest.approx(1.0)
        assert seminorm(phi, Element.zero(R22)) == 0
        assert seminorm(phi, w(1, 2)) == pytest.approx(np.sqrt(0.5))

    def test_validation(self):
        with pytest.raises(ValidationError):
            AtomicFunctional(R22, [1, 1], [1, 0])
        with pytest.raises(ValidationError):
            AtomicFunctional(spin(2), [1, 0], [1, 0])

    @given(seeds)
    def test_inequalities(self, seed):
        rng = np.random.default_rng(seed)
        f = rectangular(2, 3)
        eta = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        xi = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        phi = AtomicFunctional(f, eta / np.linalg.norm(eta), xi / np.linalg.norm(xi))
        s = is_tripotent(phi.support())
        assert s.minimal and phi(phi.support()) == pytest.approx(1.0)
        x = random_element(f, rng)
        assert abs(phi(x)) <= norm(x) + 1e-12
        assert abs(phi(x)) <= seminorm(phi, x) + 1e-10
