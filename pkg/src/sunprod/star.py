"""Star-products on polynomial algebras as families of cochains C_r.

Every product here is bilinear, so the work happens on monomial pairs and is
memoized there; values on general polynomials are assembled term by term.
"""

from __future__ import annotations

import threading
from math import factorial
from typing import Sequence

from .diffop import (
    BiDiffOp,
    OperatorSeries,
    invert_operator_series,
)
from .lie import (
    BchContext,
    LieAlgebra,
    LinearForm,
    PoissonStructure,
    ad_power,
    bernoulli,
    f_by_partitions,
    f_by_recursion,
    poisson_bracket,
    scaled_z_polys,
)
from .pbw import engine_for
from .poly import (
    DimensionError,
    NuSeries,
    Polynomial,
    Rational,
    falling_factorial,
)
from .report import CheckReport, CovarianceReport


def _accumulate(acc: dict, poly: Polynomial, c):
    for k, v in poly.items():
        w = acc.get(k, 0) + v * c
        if w:
            acc[k] = w
        else:
            acc.pop(k, None)


class StarProduct:
    """Base class: subclasses supply ``_monomial_cochains``.

    ``terminates`` promises C_r(x^I, x^J) = 0 for r > |I| + |J|, which lets
    the cache store complete cochain lists.
    """

    terminates = True
    kind = "star"

    def __init__(self, poisson: PoissonStructure, label: str):
        self.poisson = poisson
        self.dim = poisson.dim
        self.label = label
        self._cache: dict[tuple, tuple] = {}
        self._lock = threading.Lock()

    def _monomial_cochains(self, left: tuple, right: tuple, order: int) -> list[Polynomial]:
        raise NotImplementedError

    def monomial_cochains(self, left: tuple, right: tuple, order: int) -> tuple:
        """(C_0, ..., C_order) evaluated on (x^left, x^right)."""
        key = (left, right)
        hit = self._cache.get(key)
        if hit is not None and len(hit) > order:
            return hit[: order + 1]
        if self.terminates:
            top = sum(left) + sum(right)
            vals = list(self._monomial_cochains(left, right, top))
            zero = Polynomial.zero(self.dim)
            full = tuple(vals) + (zero,) * (order - top)
            with self._lock:
                if len(full) > len(self._cache.get(key, ())):
                    self._cache[key] = full
            return full[: order + 1]
        vals = tuple(self._monomial_cochains(left, right, order))
        with self._lock:
            if len(vals) > len(self._cache.get(key, ())):
                self._cache[key] = vals
        return vals

    def cochain_values(self, f: Polynomial, g: Polynomial, order: int) -> list[Polynomial]:
        if f.dim != self.dim or g.dim != self.dim:
            raise DimensionError("dimension mismatch in star-product")
        accs = [dict() for _ in range(order + 1)]
        for a, ca in f.items():
            for b, cb in g.items():
                c = ca * cb
                for r, val in enumerate(self.monomial_cochains(a, b, order)):
                    if val:
                        _accumulate(accs[r], val, c)
        return [Polynomial(self.dim, acc, _trusted=True) for acc in accs]

    def cochain(self, r: int, f: Polynomial, g: Polynomial) -> Polynomial:
        return self.cochain_values(f, g, r)[r]

    def product(self, f: Polynomial, g: Polynomial, order: int) -> NuSeries:
        return NuSeries(self.dim, order, self.cochain_values(f, g, order))

    def multiply(self, a: NuSeries, b: NuSeries) -> NuSeries:
        """Extension to formal series: nu^t coefficient is sum_{r+s+u=t} C_r(a_s, b_u)."""
        if a.dim != self.dim or b.dim != self.dim:
            raise DimensionError("dimension mismatch in star-product")
        a._check(b)
        R = a.order
        accs = [dict() for _ in range(R + 1)]
        for s, fa in enumerate(a.coeffs):
            if not fa:
                continue
            for u, gb in enumerate(b.coeffs[: R + 1 - s]):
                if not gb:
                    continue
                for r, val in enumerate(self.cochain_values(fa, gb, R - s - u)):
                    if val:
                        _accumulate(accs[r + s + u], val, 1)
        return NuSeries(self.dim, R, [Polynomial(self.dim, acc, _trusted=True) for acc in accs])

    __call__ = multiply

    def describe(self) -> dict:
        return {"type": self.kind, "label": self.label}

    def __repr__(self):
        return f"{type(self).__name__}({self.label})"


def star_mul(star: StarProduct, a, b, order: int | None = None) -> NuSeries:
    """f * g for polynomials (``order`` required) or nu-series."""
    if isinstance(a, Polynomial):
        if order is None:
            if isinstance(b, NuSeries):
                order = b.order
            else:
                raise ValueError("order is required when both operands are polynomials")
        a = NuSeries.from_poly(a, order)
    if isinstance(b, Polynomial):
        b = NuSeries.from_poly(b, a.order)
    return star.multiply(a, b)


# -- Moyal ---------------------------------------------------------------------

def _pair_distributions(pairs: list, r: int):
    """Multiplicity vectors m over ``pairs`` with sum r."""
    if not pairs:
        if r == 0:
            yield ()
        return
    if len(pairs) == 1:
        yield (r,)
        return
    for m in range(r, -1, -1):
        for rest in _pair_distributions(pairs[1:], r - m):
            yield (m,) + rest


class MoyalStar(StarProduct):
    """C_r = (1/r!) (P^{ij} d_i (x) d_j)^r for constant P."""

    kind = "moyal"

    def __init__(self, poisson: PoissonStructure):
        if not poisson.is_constant():
            raise ValueError("the Moyal product needs a Poisson structure with constant coefficients")
        super().__init__(poisson, "moyal")
        m = poisson.constant_matrix()
        n = self.dim
        self._pairs = [(i, j, m[i][j]) for i in range(n) for j in range(n) if m[i][j]]
        self._ops: dict[int, BiDiffOp] = {}

    def bidiff_cochain(self, r: int) -> BiDiffOp:
        op = self._ops.get(r)
        if op is not None:
            return op
        n = self.dim
        terms: dict[tuple, Rational] = {}
        for ms in _pair_distributions(self._pairs, r):
            left = [0] * n
            right = [0] * n
            c = Rational(1)
            for (i, j, p), k in zip(self._pairs, ms):
                if k:
                    left[i] += k
                    right[j] += k
                    c *= p ** k / factorial(k)
            key = (tuple(left), tuple(right))
            terms[key] = terms.get(key, 0) + c
        op = BiDiffOp(n, {k: v for k, v in terms.items() if v})
        with self._lock:
            self._ops[r] = op
        return op

    def bidiff_cochains(self, order: int) -> list[BiDiffOp]:
        return [self.bidiff_cochain(r) for r in range(order + 1)]

    def _monomial_cochains(self, left, right, order):
        f, g = Polynomial.monomial(left), Polynomial.monomial(right)
        return [self.bidiff_cochain(r).apply(f, g) for r in range(order + 1)]


def moyal_cochain(poisson: PoissonStructure, r: int, f: Polynomial, g: Polynomial) -> Polynomial:
    if r < 0:
        raise ValueError("cochain index must be non-negative")
    return MoyalStar(poisson).bidiff_cochain(r).apply(f, g)


# -- Gutt ----------------------------------------------------------------------

class GuttStar(StarProduct):
    """Gutt's product on the dual of a Lie algebra, through the PBW engine."""

    kind = "gutt"

    def __init__(self, algebra: LieAlgebra):
        super().__init__(algebra.poisson(), "gutt")
        self.algebra = algebra
        self._engine = engine_for(algebra)

    def _monomial_cochains(self, left, right, order):
        table = self._engine.monomial_cochains(left, right)
        zero = Polynomial.zero(self.dim)
        return [table.get(r, zero) for r in range(order + 1)]


def gutt_cochain(algebra: LieAlgebra, r: int, f: Polynomial, g: Polynomial) -> Polynomial:
    return GuttStar(algebra).cochain(r, f, g)


# -- explicit cochains ---------------------------------------------------------

class BiDiffStar(StarProduct):
    """A product given by an explicit finite list of bidifferential cochains.

    No axioms are enforced here; this is how deliberately broken products are
    built for negative tests.
    """

    kind = "bidiff"

    def __init__(self, poisson: PoissonStructure, cochains: Sequence[BiDiffOp], label: str = "bidiff"):
        super().__init__(poisson, label)
        self.cochains = tuple(cochains)

    def _monomial_cochains(self, left, right, order):
        f, g = Polynomial.monomial(left), Polynomial.monomial(right)
        zero = Polynomial.zero(self.dim)
        return [self.cochains[r].apply(f, g) if r < len(self.cochains) else zero
                for r in range(order + 1)]


def pointwise_star(dim: int) -> BiDiffStar:
    """The undeformed product, P = 0."""
    return BiDiffStar(PoissonStructure.zero(dim), [BiDiffOp.pointwise(dim)], "pointwise")


# -- equivalences --------------------------------------------------------------

class TwistedStar(StarProduct):
    """f *' g = T^{-1}(T f * T g) for T = I + sum nu^r T_r.

    T is treated as the finite series it was given as; higher orders pad with
    zero operators.
    """

    kind = "twist"
    terminates = False

    def __init__(self, base: StarProduct, twist: OperatorSeries, label: str | None = None):
        if twist.dim != base.dim:
            raise DimensionError("twist and star-product live in different dimensions")
        if not twist.is_normalized():
            raise ValueError("twist must be I + sum nu^r T_r with every T_r null on constants")
        super().__init__(base.poisson, label or f"twist({base.label})")
        self.base = base
        self.twist = twist
        self._inverses: dict[int, OperatorSeries] = {}

    def _series(self, order: int) -> tuple[OperatorSeries, OperatorSeries]:
        t = self.twist.with_order(order)
        inv = self._inverses.get(order)
        if inv is None:
            inv = invert_operator_series(t)
            with self._lock:
                self._inverses[order] = inv
        return t, inv

    def _monomial_cochains(self, left, right, order):
        t, inv = self._series(order)
        tf = t.apply(Polynomial.monomial(left))
        tg = t.apply(Polynomial.monomial(right))
        return list(inv.apply(self.base.multiply(tf, tg)).coeffs)

    def describe(self) -> dict:
        from .diffop import series_to_exchange

        return {"type": "twist", "label": self.label, "base": self.base.describe(),
                "operators": series_to_exchange(self.twist)}


def apply_equivalence(twist: OperatorSeries, star: StarProduct) -> StarProduct:
    """The product *' with T(f *' g) = T(f) * T(g)."""
    if twist.is_identity():
        return star
    return TwistedStar(star, twist)


# -- checks --------------------------------------------------------------------

def check_star_axioms(star: StarProduct, f: Polynomial, g: Polynomial, order: int) -> CheckReport:
    """C_0 = fg, unit on constants, and C_1(f,g) - C_1(g,f) = 2 P(f,g)."""
    n = star.dim
    one = Polynomial.one(n)
    fg = star.cochain_values(f, g, order)
    if fg[0] != f * g:
        return CheckReport("star axioms", False, 1, (f, g), 0, fg[0] - f * g, "C_0 is not pointwise")
    for r in range(1, order + 1):
        for a, b in ((one, f), (f, one), (one, g), (g, one)):
            v = star.cochain(r, a, b)
            if v:
                return CheckReport("star axioms", False, 1, (a, b), r, v, "C_r not null on constants")
    if order >= 1:
        gf = star.cochain(1, g, f)
        res = fg[1] - gf - poisson_bracket(star.poisson, f, g).scale(2)
        if res:
            return CheckReport("star axioms", False, 1, (f, g), 1, res, "antisymmetrized C_1 is not 2P")
    return CheckReport("star axioms", True, 1)


def check_associativity(star: StarProduct, f: Polynomial, g: Polynomial, h: Polynomial,
                        order: int) -> CheckReport:
    a, b, c = (NuSeries.from_poly(p, order) for p in (f, g, h))
    left = star.multiply(star.multiply(a, b), c)
    right = star.multiply(a, star.multiply(b, c))
    diff = left - right
    r = diff.first_nonzero()
    if r is None:
        return CheckReport("associativity", True, 1)
    return CheckReport("associativity", False, 1, (f, g, h), r, diff[r])


def check_covariance(star: StarProduct, algebra: LieAlgebra, order: int = 3) -> CovarianceReport:
    """x_i * x_j - x_j * x_i = 2 nu [x_i, x_j] as formal series."""
    n = algebra.dim
    if n != star.dim:
        raise DimensionError("algebra and star-product dimensions differ")
    order = max(order, 1)
    witnesses = []
    for i in range(n):
        for j in range(i + 1, n):
            xi, xj = Polynomial.var(n, i), Polynomial.var(n, j)
            comm = star.product(xi, xj, order) - star.product(xj, xi, order)
            bracket = algebra.bracket(LinearForm.basis(n, i), LinearForm.basis(n, j)).to_poly()
            expected = NuSeries(n, order, [Polynomial.zero(n), bracket.scale(2)])
            diff = comm - expected
            r = diff.first_nonzero()
            if r is not None:
                witnesses.append((i, j, r, diff[r]))
    return CovarianceReport(not witnesses, witnesses)


def _st_degree(k: tuple, n: int) -> int:
    return k[n] + k[n + 1]


def check_chs(star: StarProduct, algebra: LieAlgebra, x: LinearForm, y: LinearForm,
              max_r: int, max_st: int) -> CheckReport:
    """C_r(exp sX, exp tY) against F_r(sX, tY) exp(sX + tY), coefficientwise in s^a t^b."""
    n = algebra.dim
    ctx = BchContext(algebra, max_order=max(max_r + 2, 8))
    zs = scaled_z_polys(ctx, max_r, x, y)
    s = Polynomial.var(n + 2, n)
    t = Polynomial.var(n + 2, n + 1)
    z0 = s * x.to_poly().embed(n + 2) + t * y.to_poly().embed(n + 2)
    expo = Polynomial.zero(n + 2)
    power = Polynomial.one(n + 2)
    for k in range(max_st + 1):
        expo = expo + power.scale(Rational(1, factorial(k)))
        power = power * z0
    xp, yp = x.to_poly(), y.to_poly()
    checked = 0
    for r in range(max_r + 1):
        fr = f_by_recursion(zs, r)
        if fr != f_by_partitions(zs, r):
            return CheckReport("chs", False, checked, None, r, fr - f_by_partitions(zs, r),
                               "F_r recursion and explicit sum disagree")
        rhs = fr * expo
        coeffs: dict[tuple, dict] = {}
        for k, c in rhs.items():
            if _st_degree(k, n) <= max_st:
                coeffs.setdefault((k[n], k[n + 1]), {})[k[:n]] = c
        for total in range(max_st + 1):
            for a in range(total + 1):
                b = total - a
                lhs = star.cochain(r, xp ** a, yp ** b).scale(Rational(1, factorial(a) * factorial(b)))
                expected = Polynomial(n, coeffs.get((a, b), {}))
                checked += 1
                if lhs != expected:
                    return CheckReport("chs", False, checked, (x.to_poly(), y.to_poly()), r,
                                       lhs - expected, f"coefficient of s^{a} t^{b}")
    return CheckReport("chs", True, checked)


def eco_expected(algebra: LieAlgebra, x: LinearForm, y: LinearForm, r: int, m: int) -> Polynomial:
    """2^r B_r / r! * m!/(m-r)! * (ad_Y)^r(X) * Y^(m-r)."""
    n = algebra.dim
    ff = falling_factorial(m, r)
    if ff == 0:
        return Polynomial.zero(n)
    c = Rational(2 ** r) * bernoulli(r) / factorial(r) * ff
    if not c:
        return Polynomial.zero(n)
    return ad_power(algebra, y, r, x).to_poly().scale(c) * y.to_poly() ** (m - r)


def check_eco(star: StarProduct, algebra: LieAlgebra, x: LinearForm, y: LinearForm,
              r: int, m: int) -> CheckReport:
    lhs = star.cochain(r, x.to_poly(), y.to_poly() ** m)
    rhs = eco_expected(algebra, x, y, r, m)
    if lhs == rhs:
        return CheckReport("eco", True, 1)
    return CheckReport("eco", False, 1, (x.to_poly(), y.to_poly()), r, lhs - rhs, f"m={m}")


def star_power(star: StarProduct, f: Polynomial, m: int, order: int) -> NuSeries:
    out = NuSeries.from_poly(Polynomial.one(star.dim), order)
    base = NuSeries.from_poly(f, order)
    for _ in range(m):
        out = star.multiply(out, base)
    return out


__all__ = [
    "BiDiffStar",
    "GuttStar",
    "MoyalStar",
    "StarProduct",
    "TwistedStar",
    "apply_equivalence",
    "check_associativity",
    "check_chs",
    "check_covariance",
    "check_eco",
    "check_star_axioms",
    "eco_expected",
    "gutt_cochain",
    "moyal_cochain",
    "pointwise_star",
    "star_mul",
    "star_power",
]
