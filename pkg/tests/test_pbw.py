import pytest
from hypothesis import given
from hypothesis import strategies as st

from sunprod.lie import abelian, heisenberg, su2
from sunprod.pbw import PbwElement, engine_for, gutt_decompose, gutt_symmetrize
from sunprod.poly import Polynomial, Rational, indices_up_to

ALGEBRAS = {"heisenberg": heisenberg(), "su2": su2(), "abelian": abelian(3)}


def gen(alg, i):
    return PbwElement.generator(alg, i)


def test_commutator_relation():
    for name, alg in ALGEBRAS.items():
        for i in range(3):
            for j in range(3):
                lhs = gen(alg, i) * gen(alg, j) - gen(alg, j) * gen(alg, i)
                rhs = PbwElement(alg)
                for k, c in enumerate(alg.bracket_basis(i, j)):
                    if c:
                        rhs = rhs + gen(alg, k).scale(c)
                assert lhs == rhs, (name, i, j)


def test_normal_order_example():
    alg = heisenberg()
    # e2 e1 = e1 e2 - e3
    assert gen(alg, 1) * gen(alg, 0) == PbwElement(alg, {(1, 1, 0): 1, (0, 0, 1): -1})


def test_symmetrize_two_generators():
    alg = heisenberg()
    want = PbwElement(alg, {(1, 1, 0): 1, (0, 0, 1): Rational(-1, 2)})
    assert gutt_symmetrize(alg, (1, 1, 0)) == want


@pytest.mark.parametrize("name", sorted(ALGEBRAS))
def test_decompose_inverts_symmetrize(name):
    alg = ALGEBRAS[name]
    for k in indices_up_to(3, 4):
        parts = gutt_decompose(alg, gutt_symmetrize(alg, k))
        assert parts == {sum(k): Polynomial.monomial(k)}


def test_abelian_is_commutative():
    alg = ALGEBRAS["abelian"]
    eng = engine_for(alg)
    left, right = (1, 0, 2), (0, 3, 1)
    assert eng.monomial_cochains(left, right) == {0: Polynomial.monomial((1, 3, 3))}


def test_gutt_first_cochain_is_bracket():
    alg = su2()
    eng = engine_for(alg)
    p = alg.poisson()
    for a in indices_up_to(3, 2):
        for b in indices_up_to(3, 2):
            c1 = eng.monomial_cochains(a, b).get(1, Polynomial.zero(3))
            assert c1 == p.bracket(Polynomial.monomial(a), Polynomial.monomial(b))


elements = st.dictionaries(st.sampled_from(list(indices_up_to(3, 2))), st.integers(-3, 3), max_size=3)


@given(elements, elements, elements)
def test_associative(a, b, c):
    alg = su2()
    x, y, z = (PbwElement(alg, t) for t in (a, b, c))
    assert (x * y) * z == x * (y * z)


def test_repr():
    alg = heisenberg()
    assert repr(gen(alg, 1) * gen(alg, 0)) == "PbwElement(e1*e2 - e3)"
