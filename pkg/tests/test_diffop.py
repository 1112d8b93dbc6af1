import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import polynomials
from sunprod.diffop import (
    BiDiffOp,
    DiffOp,
    FitError,
    OperatorSeries,
    apply_bidiffop,
    apply_diffop,
    compose_operator_series,
    diffop_from_exchange,
    fit_diffop,
    hochschild_coboundary,
    invert_operator_series,
    operator_exp,
    series_from_exchange,
    series_to_exchange,
)
from sunprod.parser import parse_expression
from sunprod.poly import NuSeries, Polynomial, indices_up_to


def P(text, dim=2):
    return parse_expression(text, dim)


def d(dim, *index, coeff=1):
    return DiffOp.partial(dim, tuple(index), coeff)


def series(dim, order, *ops):
    return OperatorSeries(dim, order, [DiffOp.identity(dim)] + list(ops))


def diffops(dim, max_order=2, coeff_degree=1):
    keys = [k for k in indices_up_to(dim, max_order) if any(k)]
    return st.dictionaries(st.sampled_from(keys), polynomials(dim, coeff_degree, 2), max_size=3).map(
        lambda t: DiffOp(dim, t))


def test_apply_examples():
    assert apply_diffop(d(2, 1, 0, coeff=P("x2")), P("x1^2")) == P("2*x1*x2")
    f = P("x1^3 - 1/2*x2")
    assert apply_diffop(DiffOp.identity(2), f) == f
    assert apply_diffop(d(2, 0, 2), Polynomial.one(2)).is_zero()


def test_bidiff_examples():
    b = BiDiffOp(2, {((1, 0), (0, 1)): 1})
    assert apply_bidiffop(b, P("x1^2"), P("x2^2")) == P("4*x1*x2")
    assert apply_bidiffop(b, Polynomial.one(2), P("x2^5")).is_zero()
    assert apply_bidiffop(BiDiffOp.pointwise(2), P("x1 + 1"), P("x2")) == P("x1*x2 + x2")


def test_coboundary_hand_value():
    delta = hochschild_coboundary(d(1, 2).apply, 1)
    x = P("x1", 1)
    assert delta(x, x) == Polynomial.constant(1, -2)


def test_coboundary_arity():
    with pytest.raises(ValueError):
        hochschild_coboundary(lambda f: f, 3)


@given(diffops(2, max_order=1, coeff_degree=2), polynomials(2), polynomials(2), polynomials(2))
def test_coboundary_squares_to_zero(op, f, g, h):
    dd = hochschild_coboundary(hochschild_coboundary(op.apply, 1), 2)
    assert dd(f, g, h).is_zero()


@given(diffops(2, 3), polynomials(2, 4))
def test_coboundary_unit(op, f):
    assert hochschild_coboundary(op.apply, 1)(Polynomial.one(2), f).is_zero()


def test_geometric_inverse():
    inv = invert_operator_series(series(1, 4, d(1, 1)))
    for r in range(5):
        assert inv[r] == d(1, r).scale((-1) ** r)
    assert invert_operator_series(OperatorSeries.identity(2, 3)).is_identity()


def test_inverse_needs_identity():
    with pytest.raises(ValueError):
        invert_operator_series(OperatorSeries(1, 2, [d(1, 1)]))


def test_composition_examples():
    a = series(1, 2, d(1, 1))
    b = series(1, 2, d(1, 1).scale(-1))
    assert compose_operator_series(a, b) == series(1, 2, DiffOp.zero(1), d(1, 2).scale(-1))
    assert compose_operator_series(a, OperatorSeries.identity(1, 2)) == a


def test_commutator_by_leibniz():
    x_d = d(1, 1, coeff=P("x1", 1))
    assert x_d @ d(1, 1) - d(1, 1) @ x_d == d(1, 1).scale(-1)


@given(diffops(2, 2), diffops(2, 2), polynomials(2, 4))
def test_composition_matches_application(a, b, f):
    assert (a @ b).apply(f) == a.apply(b.apply(f))


@given(diffops(2, 2), diffops(2, 2), polynomials(2, 4))
def test_inverse_round_trip(t1, t2, f):
    t = series(2, 3, t1, t2)
    inv = invert_operator_series(t)
    assert compose_operator_series(t, inv).is_identity()
    assert compose_operator_series(inv, t).is_identity()
    assert t.apply(inv.apply(f)) == NuSeries.from_poly(f, 3)


def test_exp_of_derivation_is_multiplicative():
    s = operator_exp(d(2, 1, 0, coeff=P("x2")), 4)
    f, g = P("x1^2 + x2"), P("x1^3*x2")
    assert s.apply(f * g) == s.apply(f) * s.apply(g)


def test_fit_examples():
    assert fit_diffop(lambda f: f.diff(0).scale(2), 2, 3) == d(2, 1, 0).scale(2)
    assert fit_diffop(lambda f: P("x1") * f.diff(0), 2, 4) == d(2, 1, 0, coeff=P("x1"))
    with pytest.raises(FitError):
        fit_diffop(lambda f: f, 2, 2)
    assert fit_diffop(lambda f: f, 2, 2, allow_constant=True) == DiffOp.identity(2)


def test_fit_rejects_high_order():
    with pytest.raises(FitError):
        fit_diffop(lambda f: f.diff(0, 3), 1, 4, max_order=2)


@given(diffops(2, 3, coeff_degree=2))
def test_fit_inverts_apply(op):
    assert fit_diffop(op.apply, 2, 5) == op


def test_exchange_round_trip():
    t = series(2, 2, d(2, 2, 0), d(2, 0, 3, coeff=P("x1 - 1/2")))
    data = series_to_exchange(t)
    assert data[0] == {"order": 1, "terms": [{"coeff": "1", "derivs": [2, 0]}]}
    assert series_from_exchange(data, 2) == t
    assert diffop_from_exchange([{"coeff": 3, "derivs": [0, 1]}], 2) == d(2, 0, 1).scale(3)
    with pytest.raises(ValueError):
        series_from_exchange([{"order": 0, "terms": []}], 2)
