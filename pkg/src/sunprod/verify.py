"""Named invariant suites run by ``sunprod verify <suite>``.

Each suite takes the session's star-product and returns a list of reports.
Random inputs come from a ``random.Random`` seeded by the caller.
"""

from __future__ import annotations

import random
from math import comb, factorial
from typing import Callable

from .diffop import DiffOp, OperatorSeries, operator_exp
from .lie import (
    BchContext,
    LieAlgebra,
    LinearForm,
    abelian,
    ad_power,
    bernoulli,
    f_by_partitions,
    f_by_recursion,
)
from .poly import Polynomial, Rational, unit_index
from .report import CheckReport, combine
from .sampling import random_linear_form, random_polynomial
from .star import (
    StarProduct,
    check_associativity,
    check_chs,
    check_covariance,
    check_eco,
    check_star_axioms,
    pointwise_star,
)
from .sun import (
    ReconstructionError,
    SunProduct,
    check_rho1_coboundary,
    check_strong_equivalence,
    check_strong_multiplicativity,
    check_weak_equivalence,
    check_weak_trivializer,
    reconstruct_all,
    reconstruct_cochain_diffop,
    extract_sun_cochains,
    weak_trivializer,
)


class SuiteError(ValueError):
    """The suite does not apply to this configuration (a usage error)."""


def _need_algebra(algebra: LieAlgebra | None, star: StarProduct, suite: str) -> LieAlgebra:
    if algebra is not None:
        return algebra
    if all(not p for row in star.poisson.matrix for p in row):
        return abelian(star.dim)
    raise SuiteError(f"suite {suite!r} needs Lie algebra structure constants")


def suite_associativity(star, algebra, order, degree, rng, samples=10):
    deg = min(degree, 3)
    axioms, assoc = [], []
    for _ in range(samples):
        f, g, h = (random_polynomial(rng, star.dim, deg) for _ in range(3))
        axioms.append(check_star_axioms(star, f, g, order))
        assoc.append(check_associativity(star, f, g, h, order))
    return [combine("star axioms", axioms), combine("associativity", assoc)]


def suite_covariance(star, algebra, order, degree, rng):
    alg = _need_algebra(algebra, star, "covariance")
    rep = check_covariance(star, alg, order)
    if rep:
        return [CheckReport("covariance", True, alg.dim * (alg.dim - 1) // 2)]
    i, j, r, res = rep.witnesses[0]
    return [CheckReport("covariance", False, 0,
                        (Polynomial.var(star.dim, i), Polynomial.var(star.dim, j)), r, res)]


def reconstruction_reports(star: StarProduct, order: int, degree: int, refit: int) -> list[CheckReport]:
    """Fit every rho_r at ``degree``, validate, then refit at ``refit`` and compare."""
    try:
        low = reconstruct_all(star, order, degree)
    except ReconstructionError as exc:
        return [CheckReport("reconstruction", False, 0, detail=str(exc))]
    out = [CheckReport("reconstruction", True, order)]
    try:
        high = reconstruct_all(star, order, refit)
    except ReconstructionError as exc:
        return out + [CheckReport("refit", False, 0, detail=str(exc))]
    for r, (a, b) in enumerate(zip(low.rho, high.rho), start=1):
        if a == b:
            out.append(CheckReport(f"refit rho_{r}", True, 1))
        else:
            out.append(CheckReport(f"refit rho_{r}", False, 1, None, r, b - a,
                                   f"degree {degree} fit {a} vs degree {refit} fit {b}"))
    return out


def suite_theorem1(star, algebra, order, degree, rng):
    return reconstruction_reports(star, order, degree, degree + 2)


def suite_lemma3(star, algebra, order, degree, rng, samples=20):
    sun = SunProduct(star, 1)
    table = extract_sun_cochains(sun, 1, degree)
    try:
        rho1 = reconstruct_cochain_diffop(star, table, 1, degree)
    except ReconstructionError as exc:
        return [CheckReport("rho_1 coboundary", False, 0, detail=str(exc))]
    deg = max(1, min(3, degree // 2))
    pairs = [(random_polynomial(rng, star.dim, deg), random_polynomial(rng, star.dim, deg))
             for _ in range(samples)]
    return [check_rho1_coboundary(star, rho1, pairs)]


def suite_eco(star, algebra, order, degree, rng, samples=10):
    alg = _need_algebra(algebra, star, "eco")
    reports = []
    for _ in range(samples):
        x, y = random_linear_form(rng, alg.dim), random_linear_form(rng, alg.dim)
        for m in range(degree + 1):
            for r in range(min(order, 4, m) + 1):
                reports.append(check_eco(star, alg, x, y, r, m))
    return [combine("eco", reports)]


def suite_chs(star, algebra, order, degree, rng, samples=3):
    alg = _need_algebra(algebra, star, "chs")
    reports = []
    for _ in range(samples):
        x, y = random_linear_form(rng, alg.dim), random_linear_form(rng, alg.dim)
        reports.append(check_chs(star, alg, x, y, min(order, 3), min(degree, 5)))
    return [combine("chs", reports)]


def check_bch_derivative(algebra: LieAlgebra, x: LinearForm, y: LinearForm, i: int) -> CheckReport:
    """c_i(0,X) = c_i(X,0) = 0 and the s-linear part of c_i(sX, Y) is B_{i-1}/(i-1)! ad_Y^{i-1} X."""
    ctx = BchContext(algebra, max_order=max(i, 8))
    zero = LinearForm.zero(algebra.dim)
    for a, b in ((zero, x), (x, zero)):
        v = ctx.c(i, a, b)
        if not v.is_zero():
            return CheckReport("c_i derivative", False, 1, (a.to_poly(), b.to_poly()), i, v.to_poly(),
                               "c_i vanishes when one argument is zero")
    got = ctx.components(i, x, y).get((1, i - 1), zero)
    want = ad_power(algebra, y, i - 1, x) * (bernoulli(i - 1) / factorial(i - 1))
    if got != want:
        return CheckReport("c_i derivative", False, 1, (x.to_poly(), y.to_poly()), i,
                           (got - want).to_poly(), "s-derivative identity")
    return CheckReport("c_i derivative", True, 1)


def check_fseries(algebra: LieAlgebra, x: LinearForm, y: LinearForm, max_r: int) -> CheckReport:
    ctx = BchContext(algebra, max_order=max(max_r + 1, 8))
    zs = [Polynomial.zero(algebra.dim)] + [ctx.z(m, x, y).to_poly() for m in range(1, max_r + 1)]
    for r in range(max_r + 1):
        a, b = f_by_recursion(zs, r), f_by_partitions(zs, r)
        if a != b:
            return CheckReport("fseries", False, r + 1, (x.to_poly(), y.to_poly()), r, a - b)
    return CheckReport("fseries", True, max_r + 1)


def check_bernoulli(max_n: int) -> CheckReport:
    for n in range(1, max_n + 1):
        s = sum(comb(n + 1, k) * bernoulli(k) for k in range(n + 1))
        if s:
            return CheckReport("bernoulli", False, n, None, n, s)
    if bernoulli(1) != Rational(-1, 2):
        return CheckReport("bernoulli", False, max_n, None, 1, bernoulli(1), "B_1 convention")
    return CheckReport("bernoulli", True, max_n)


def suite_fseries(star, algebra, order, degree, rng, samples=5):
    alg = _need_algebra(algebra, star, "fseries")
    fs, ch = [], []
    for _ in range(samples):
        x, y = random_linear_form(rng, alg.dim), random_linear_form(rng, alg.dim)
        fs.append(check_fseries(alg, x, y, 6))
        ch.extend(check_bch_derivative(alg, x, y, i) for i in range(2, 6))
    return [combine("fseries", fs), combine("c_i derivative", ch), check_bernoulli(12)]


def suite_weak(star, algebra, order, degree, rng, samples=20):
    sun = SunProduct(star, order)
    try:
        s = weak_trivializer(sun, order, degree)
    except ReconstructionError as exc:
        return [CheckReport("weak trivializer", False, 0, detail=str(exc))]
    deg = max(1, degree // 2)
    pairs = [(random_polynomial(rng, star.dim, deg), random_polynomial(rng, star.dim, deg))
             for _ in range(samples)]
    plain = SunProduct(pointwise_star(star.dim), order)
    return [check_weak_trivializer(sun, s, pairs),
            check_weak_equivalence(sun, plain, s, order, degree)]


def derivation_exponentials(dim: int, order: int) -> list[tuple[str, OperatorSeries]]:
    """exp(nu x_i d_j) for every (i, j)."""
    out = []
    for i in range(dim):
        for j in range(dim):
            delta = DiffOp.partial(dim, unit_index(dim, j), Polynomial.var(dim, i))
            out.append((f"exp(nu*x{i + 1}*d{j + 1})", operator_exp(delta, order)))
    return out


def suite_strong(star, algebra, order, degree, rng):
    n = star.dim
    mult, eq = [], []
    plain = SunProduct(pointwise_star(n), order)
    for _name, s in derivation_exponentials(n, order):
        mult.append(check_strong_multiplicativity(s, order, degree))
        eq.append(check_strong_equivalence(plain, plain, s, order, degree))
    sun = SunProduct(star, order)
    self_eq = check_strong_equivalence(sun, sun, OperatorSeries.identity(n, order), order, degree)
    return [combine("strong multiplicativity", mult), combine("strong equivalence", eq), self_eq]


SUITES: dict[str, Callable] = {
    "associativity": suite_associativity,
    "covariance": suite_covariance,
    "theorem1": suite_theorem1,
    "lemma3": suite_lemma3,
    "eco": suite_eco,
    "chs": suite_chs,
    "fseries": suite_fseries,
    "weak": suite_weak,
    "strong": suite_strong,
}


def run_suite(name: str, star: StarProduct, algebra: LieAlgebra | None, order: int, degree: int,
              seed: int) -> list[CheckReport]:
    if name not in SUITES:
        raise SuiteError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    rng = random.Random(seed)
    return SUITES[name](star, algebra, order, degree, rng)
