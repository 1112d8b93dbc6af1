import random

import pytest
from hypothesis import given, settings

from conftest import polynomials
from sunprod.diffop import DiffOp, OperatorSeries, operator_exp
from sunprod.lie import PoissonStructure, heisenberg, su2
from sunprod.parser import parse_expression, parse_series
from sunprod.poly import NuSeries, Polynomial, TruncationError, indices_up_to
from sunprod.sampling import random_polynomial
from sunprod.star import GuttStar, MoyalStar, TwistedStar, pointwise_star
from sunprod.sun import (
    ReconstructionError,
    SunProduct,
    build_star_with_cochains,
    check_in_EP,
    check_rho1_coboundary,
    check_strong_equivalence,
    check_strong_multiplicativity,
    check_weak_equivalence,
    check_weak_trivializer,
    equivalence_to_EP,
    extract_sun_cochains,
    lambda_factor,
    monomial_pairs,
    reconstruct_all,
    reconstruct_cochain_diffop,
    sun_mul,
    symmetrized_star,
    weak_trivializer,
)

R2 = PoissonStructure.symplectic(1)


def P(text, dim=2):
    return parse_expression(text, dim)


def d(dim, *index, coeff=1):
    return DiffOp.partial(dim, tuple(index), coeff)


def twisted_moyal(order=4):
    t = OperatorSeries(2, order, [DiffOp.identity(2), d(2, 2, 0)])
    return TwistedStar(MoyalStar(R2), t)


def test_lambda_factor():
    assert lambda_factor((2, 1)).factors() == [0, 0, 1]
    assert lambda_factor((0, 0, 0)).degree == 0
    assert str(lambda_factor((0, 0, 1))) == "{x3:1}"
    with pytest.raises(ValueError):
        lambda_factor((-1, 0))


def test_symmetrized_star_examples():
    moyal = MoyalStar(R2)
    assert symmetrized_star(moyal, (1, 0), 3) == NuSeries.from_poly(P("x1"), 3)
    assert symmetrized_star(moyal, (1, 1), 3) == NuSeries.from_poly(P("x1*x2"), 3)
    gutt = GuttStar(heisenberg())
    x = lambda t: parse_expression(t, 3)
    assert symmetrized_star(gutt, (1, 1, 0), 3) == NuSeries.from_poly(x("x1*x2"), 3)
    assert symmetrized_star(gutt, (0, 0, 0), 3) == NuSeries.from_poly(Polynomial.one(3), 3)


@pytest.mark.parametrize("star", [MoyalStar(R2), twisted_moyal(3)], ids=["moyal", "twisted"])
def test_recursion_matches_oracle(star):
    sun = SunProduct(star, 3)
    for k in indices_up_to(2, 5):
        assert sun.symmetrized_star(k) == sun.symmetrized_star_oracle(k)


def test_sun_examples():
    sun = SunProduct(MoyalStar(R2), 3)
    assert sun_mul(sun, P("x1^2"), P("x2^2")) == NuSeries.from_poly(P("x1^2*x2^2"), 3)
    assert sun.multiply(parse_series("nu*x1", 2, 3), P("x2")).is_zero()
    gutt = SunProduct(GuttStar(heisenberg()), 3)
    x = lambda t: parse_expression(t, 3)
    assert gutt.multiply(gutt.multiply(x("x1"), x("x2")), x("x3")) == NuSeries.from_poly(x("x1*x2*x3"), 3)
    with pytest.raises(TruncationError):
        sun.multiply(NuSeries.zero(2, 2), P("x1"))


@settings(max_examples=20)
@given(polynomials(2, 3), polynomials(2, 3))
def test_sun_is_commutative(f, g):
    sun = SunProduct(twisted_moyal(3), 3)
    assert sun.multiply(f, g) == sun.multiply(g, f)
    assert sun.multiply(f, g)[0] == f * g


def test_raw_table_for_twist():
    table = extract_sun_cochains(SunProduct(twisted_moyal(2), 2), 2, 4)
    assert table.entry(1, (2, 0)) == Polynomial.constant(2, -2)
    for k in indices_up_to(2, 1):
        assert table.entry(1, k).is_zero() and table.entry(2, k).is_zero()
    assert not table.is_zero()


def test_extract_rejects_bad_bounds():
    with pytest.raises(ValueError):
        extract_sun_cochains(SunProduct(MoyalStar(R2), 2), 0, 3)


def test_reconstruction_of_twist():
    cochains = reconstruct_all(twisted_moyal(3), 3, 6)
    assert cochains.rho[0] == d(2, 2, 0).scale(-1)
    assert cochains.rho[1] == d(2, 4, 0)
    assert cochains.rho[2] == d(2, 6, 0).scale(-1)


def test_reconstruction_in_EP_gives_zero():
    cochains = reconstruct_all(MoyalStar(R2), 3, 5)
    assert all(op.is_zero() for op in cochains.rho)
    assert cochains.operator_series().is_identity()


def test_reconstruction_needs_lower_cochains():
    star = twisted_moyal(2)
    table = extract_sun_cochains(SunProduct(star, 2), 2, 4)
    with pytest.raises(ValueError):
        reconstruct_cochain_diffop(star, table, 2, 4)


def test_reconstruction_mismatch_raises():
    star = twisted_moyal(2)
    table = extract_sun_cochains(SunProduct(star, 2), 2, 4)
    table.table[(1, (1, 1))] = P("x1")
    with pytest.raises(ReconstructionError):
        reconstruct_cochain_diffop(star, table, 1, 4)


def test_in_EP():
    assert check_in_EP(MoyalStar(R2), 3, 5)
    assert check_in_EP(GuttStar(su2()), 3, 4)
    rep = check_in_EP(twisted_moyal(3), 3, 4)
    assert not rep and rep.order == 1 and rep.witness == P("x1^2")
    t = OperatorSeries(2, 3, [DiffOp.identity(2), DiffOp.zero(2), d(2, 0, 3)])
    rep = check_in_EP(TwistedStar(MoyalStar(R2), t), 3, 4)
    assert not rep and rep.order == 2


def test_equivalence_to_EP():
    moyal = MoyalStar(R2)
    t, same = equivalence_to_EP(moyal, 3, 4)
    assert t.is_identity() and same is moyal
    t, fixed = equivalence_to_EP(twisted_moyal(3), 3, 6)
    assert check_in_EP(fixed, 3, 6)
    for left, right in monomial_pairs(2, 5):
        f, g = Polynomial.monomial(left), Polynomial.monomial(right)
        assert fixed.product(f, g, 3) == moyal.product(f, g, 3)


def test_build_star_with_cochains():
    moyal = MoyalStar(R2)
    assert build_star_with_cochains(moyal, [DiffOp.zero(2)], 2) is moyal
    star = build_star_with_cochains(moyal, [d(2, 2, 0)], 2)
    table = extract_sun_cochains(SunProduct(star, 2), 2, 5)
    assert table.entry(1, (2, 0)) == Polynomial.constant(2, 2)
    with pytest.raises(ValueError):
        build_star_with_cochains(moyal, [d(2, 1, 0)], 2)
    with pytest.raises(ValueError):
        build_star_with_cochains(moyal, [d(2, 2, 0)] * 3, 2)


def test_weak_trivializer():
    sun = SunProduct(twisted_moyal(3), 3)
    s = weak_trivializer(sun, 3, 6)
    assert s[1] == d(2, 2, 0)
    x1 = P("x1")
    assert s.apply(sun.multiply(x1, x1)) == NuSeries.from_poly(P("x1^2"), 3)
    rng = random.Random(1)
    pairs = [(random_polynomial(rng, 2, 3), random_polynomial(rng, 2, 3)) for _ in range(10)]
    assert check_weak_trivializer(sun, s, pairs)
    plain = SunProduct(MoyalStar(R2), 3)
    assert weak_trivializer(plain, 3, 4).is_identity()


def test_weak_equivalence():
    tw = SunProduct(twisted_moyal(3), 3)
    flat = SunProduct(pointwise_star(2), 3)
    ident = OperatorSeries.identity(2, 3)
    assert check_weak_equivalence(tw, tw, ident, 3, 4)
    assert check_weak_equivalence(tw, flat, weak_trivializer(tw, 3, 6), 3, 5)
    rep = check_weak_equivalence(tw, flat, ident, 3, 4)
    assert not rep and rep.order == 1


def test_strong_checks():
    flat = SunProduct(pointwise_star(2), 4)
    s = operator_exp(d(2, 1, 0, coeff=P("x1")), 4)
    assert check_strong_multiplicativity(s, 4, 5)
    assert check_strong_equivalence(flat, flat, s, 4, 5)
    bad = OperatorSeries(2, 4, [DiffOp.identity(2), d(2, 2, 0)])
    rep = check_strong_multiplicativity(bad, 4, 5)
    assert not rep and rep.witness == (P("x1"), P("x1"))
    rep = check_strong_equivalence(flat, flat, bad, 4, 5)
    assert not rep and rep.witness == (P("x1"), P("x1")) and rep.residual == Polynomial.constant(2, 2)


def test_rho1_coboundary():
    star = twisted_moyal(2)
    rho1 = reconstruct_all(star, 1, 4).rho[0]
    rng = random.Random(2)
    pairs = [(random_polynomial(rng, 2, 4), random_polynomial(rng, 2, 4)) for _ in range(10)]
    assert check_rho1_coboundary(star, rho1, pairs)
    rep = check_rho1_coboundary(star, DiffOp.zero(2), [(P("x1"), P("x1"))])
    assert not rep


def test_monomial_pairs_order():
    pairs = list(monomial_pairs(2, 2))
    assert pairs[0] == ((0, 0), (0, 0))
    assert pairs[1:3] == [((0, 0), (1, 0)), ((0, 0), (0, 1))]
    assert len(pairs) == sum(1 for i in indices_up_to(2, 2) for j in indices_up_to(2, 2) if sum(i) + sum(j) <= 2)
