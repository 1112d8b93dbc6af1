"""Sun-products: commutative deformations obtained by symmetrizing a star-product.

A monomial is split into its linear factors, the factors are star-multiplied
in every order and averaged.  The nu-coefficients of the result, viewed as
maps on polynomials, are the cochains rho_r; they are recovered here as
explicit differential operators.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .diffop import (
    DiffOp,
    FitError,
    OperatorSeries,
    fit_diffop,
    hochschild_coboundary,
    invert_operator_series,
)
from .poly import (
    DimensionError,
    NuSeries,
    Polynomial,
    Rational,
    index_add,
    indices_of_degree,
    indices_up_to,
    project_pi,
    unit_index,
    zero_index,
)
from .report import CheckReport
from .star import StarProduct, TwistedStar, apply_equivalence


class ReconstructionError(ValueError):
    """A fitted cochain operator disagrees with the raw cochain table."""


@dataclass(frozen=True)
class FactorMultiset:
    """Multiplicities of the linear factors x_1, ..., x_n of a monomial."""

    counts: tuple

    @property
    def degree(self) -> int:
        return sum(self.counts)

    def factors(self) -> list[int]:
        """0-based variable indices, ascending, with repetition."""
        return [i for i, k in enumerate(self.counts) for _ in range(k)]

    def __str__(self):
        body = ", ".join(f"x{i + 1}:{k}" for i, k in enumerate(self.counts) if k)
        return "{" + body + "}"


def lambda_factor(index: tuple) -> FactorMultiset:
    if any(k < 0 for k in index):
        raise ValueError(f"negative exponent in {index}")
    return FactorMultiset(tuple(index))


def _distinct_words(counts: list[int], prefix: tuple = ()) -> Iterator[tuple]:
    if not any(counts):
        yield prefix
        return
    for i, k in enumerate(counts):
        if k:
            counts[i] -= 1
            yield from _distinct_words(counts, prefix + (i,))
            counts[i] += 1


class SunProduct:
    """The sun-product of ``star`` truncated at nu^order."""

    def __init__(self, star: StarProduct, order: int):
        if order < 0:
            raise ValueError("truncation order must be non-negative")
        self.star = star
        self.dim = star.dim
        self.order = order
        one = NuSeries.from_poly(Polynomial.one(self.dim), order)
        self._memo: dict[tuple, NuSeries] = {zero_index(self.dim): one}
        self._words: dict[tuple, NuSeries] = {(): one}
        self._vars = [NuSeries.from_poly(Polynomial.var(self.dim, i), order) for i in range(self.dim)]
        self._lock = threading.Lock()

    def symmetrized_star(self, factors) -> NuSeries:
        """Average of all star-products of the factors, via the cyclic recursion.

        value(K) = (1/k) sum_i K_i x_i * value(K - e_i)
        """
        key = factors.counts if isinstance(factors, FactorMultiset) else tuple(factors)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        k = sum(key)
        acc = NuSeries.zero(self.dim, self.order)
        for i, mult in enumerate(key):
            if not mult:
                continue
            rest = list(key)
            rest[i] -= 1
            term = self.star.multiply(self._vars[i], self.symmetrized_star(tuple(rest)))
            acc = acc + term.scale(mult)
        out = acc.scale(Rational(1, k))
        with self._lock:
            self._memo[key] = out
        return out

    def _word_product(self, word: tuple) -> NuSeries:
        hit = self._words.get(word)
        if hit is not None:
            return hit
        out = self.star.multiply(self._word_product(word[:-1]), self._vars[word[-1]])
        with self._lock:
            self._words[word] = out
        return out

    def symmetrized_star_oracle(self, factors) -> NuSeries:
        """Same value from the explicit sum over every ordering of the factors."""
        key = factors.counts if isinstance(factors, FactorMultiset) else tuple(factors)
        acc = NuSeries.zero(self.dim, self.order)
        count = 0
        for word in _distinct_words(list(key)):
            acc = acc + self._word_product(word)
            count += 1
        # each distinct word stands for prod(K_i!) permutations; the average is unchanged
        return acc.scale(Rational(1, count))

    def rho_series(self, p: Polynomial) -> NuSeries:
        """sum_r nu^r rho_r(p), extended linearly over the monomials of p."""
        if p.dim != self.dim:
            raise DimensionError("dimension mismatch in sun-product")
        accs = [dict() for _ in range(self.order + 1)]
        for k, c in p.items():
            for r, val in enumerate(self.symmetrized_star(k).coeffs):
                for m, v in val.items():
                    w = accs[r].get(m, 0) + v * c
                    if w:
                        accs[r][m] = w
                    else:
                        accs[r].pop(m, None)
        return NuSeries(self.dim, self.order, [Polynomial(self.dim, a, _trusted=True) for a in accs])

    def rho(self, r: int, p: Polynomial) -> Polynomial:
        return self.rho_series(p)[r]

    def multiply(self, f, g) -> NuSeries:
        """f (.) g; only the nu^0 parts of the inputs matter."""
        pf = project_pi(f) if isinstance(f, NuSeries) else f
        pg = project_pi(g) if isinstance(g, NuSeries) else g
        for a in (f, g):
            if isinstance(a, NuSeries) and a.order != self.order:
                from .poly import TruncationError

                raise TruncationError(f"series order {a.order} vs sun-product order {self.order}")
        return self.rho_series(pf * pg)

    __call__ = multiply

    def __repr__(self):
        return f"SunProduct({self.star.label}, order={self.order})"


def sun_mul(sun: SunProduct, f, g) -> NuSeries:
    return sun.multiply(f, g)


def symmetrized_star(star: StarProduct, factors, order: int) -> NuSeries:
    return SunProduct(star, order).symmetrized_star(factors)


# -- cochain tables ----------------------------------------------------------

@dataclass
class SunCochains:
    """Raw values rho_r(x^K) for 1 <= r <= order, |K| <= degree, plus fitted operators."""

    dim: int
    order: int
    degree: int
    table: dict = field(default_factory=dict)  # (r, K) -> Polynomial
    rho: list | None = None  # DiffOps rho_1..rho_order once reconstructed

    def entry(self, r: int, index: tuple) -> Polynomial:
        return self.table.get((r, tuple(index)), Polynomial.zero(self.dim))

    def nonzero(self) -> Iterator[tuple]:
        for r in range(1, self.order + 1):
            for k in indices_up_to(self.dim, self.degree):
                v = self.table.get((r, k))
                if v:
                    yield r, k, v

    def is_zero(self) -> bool:
        return next(self.nonzero(), None) is None

    def operator_series(self) -> OperatorSeries:
        if self.rho is None:
            raise ValueError("cochains have not been reconstructed")
        return OperatorSeries(self.dim, self.order, [DiffOp.identity(self.dim)] + list(self.rho))


def extract_sun_cochains(sun: SunProduct, order: int, degree: int) -> SunCochains:
    if order < 1 or degree < 0:
        raise ValueError("need order >= 1 and degree >= 0")
    if sun.order < order:
        sun = SunProduct(sun.star, order)
    out = SunCochains(sun.dim, order, degree)
    for k in indices_up_to(sun.dim, degree):
        val = sun.symmetrized_star(k)
        for r in range(1, order + 1):
            if val[r]:
                out.table[(r, k)] = val[r]
    return out


def _phi_probe(star: StarProduct, r: int, i: int, rho: Sequence[DiffOp]):
    """g -> phi_r(x_i, g) = -C_r(x_i, g) - sum_{a+b=r} C_a(x_i, rho_b(g))."""
    xi = Polynomial.var(star.dim, i)

    def probe(g: Polynomial) -> Polynomial:
        out = -star.cochain(r, xi, g)
        for b in range(1, r):
            rg = rho[b - 1].apply(g)
            if rg:
                out = out - star.cochain(r - b, xi, rg)
        return out

    return probe


def reconstruct_cochain_diffop(star: StarProduct, cochains: SunCochains, r: int, degree: int,
                               rho: Sequence[DiffOp] = ()) -> DiffOp:
    """Fit rho_r as a differential operator from the first r - 1 operators.

    ``rho`` holds rho_1 .. rho_{r-1}.  The result is validated against the raw
    table on every monomial of degree <= min(degree, cochains.degree).
    """
    if len(rho) < r - 1:
        raise ValueError(f"rho_1..rho_{r - 1} are needed to reconstruct rho_{r}")
    n = star.dim
    psi: dict[tuple, Polynomial] = {}
    for i in range(n):
        try:
            op = fit_diffop(_phi_probe(star, r, i, rho), n, degree)
        except FitError as exc:
            raise ReconstructionError(f"phi_{r}(x{i + 1}, .) is not differential up to degree {degree}: {exc}") from exc
        for j, c in op.items():
            if not any(j):
                continue
            key = index_add(j, unit_index(n, i))
            term = c.scale(Rational(-1, sum(j) + 1))
            psi[key] = psi[key] + term if key in psi else term
    result = DiffOp(n, psi)
    for k in indices_up_to(n, min(degree, cochains.degree)):
        got = result.apply(Polynomial.monomial(k))
        want = cochains.entry(r, k)
        if got != want:
            raise ReconstructionError(
                f"reconstructed rho_{r} gives {got} on {Polynomial.monomial(k)}, table has {want}")
    return result


def reconstruct_all(star: StarProduct, order: int, degree: int,
                    sun: SunProduct | None = None) -> SunCochains:
    sun = sun if sun is not None and sun.order >= order else SunProduct(star, order)
    cochains = extract_sun_cochains(sun, order, degree)
    ops: list[DiffOp] = []
    for r in range(1, order + 1):
        ops.append(reconstruct_cochain_diffop(star, cochains, r, degree, ops))
    cochains.rho = ops
    return cochains


# -- E(P) and equivalences ---------------------------------------------------

def check_in_EP(star: StarProduct, order: int, degree: int, sun: SunProduct | None = None) -> CheckReport:
    sun = sun if sun is not None and sun.order >= order else SunProduct(star, order)
    table = extract_sun_cochains(sun, order, degree)
    checked = sum(1 for _ in indices_up_to(star.dim, degree)) * order
    first = next(table.nonzero(), None)
    if first is None:
        return CheckReport("in E(P)", True, checked)
    r, k, v = first
    return CheckReport("in E(P)", False, checked, Polynomial.monomial(k), r, v)


def equivalence_to_EP(star: StarProduct, order: int, degree: int,
                      cochains: SunCochains | None = None) -> tuple[OperatorSeries, StarProduct]:
    """T = I + sum nu^r rho_r and the product *' with T(f *' g) = T(f) * T(g)."""
    if cochains is None or cochains.rho is None:
        cochains = reconstruct_all(star, order, degree)
    t = cochains.operator_series().with_order(order)
    return t, apply_equivalence(t, star)


def build_star_with_cochains(base: StarProduct, etas: Sequence[DiffOp], order: int) -> StarProduct:
    """A product equivalent to ``base`` (assumed in E(P)) whose sun cochains are the etas.

    The twist T = I + sum nu^i eta_i enters as f *' g = T(T^{-1} f * T^{-1} g).
    """
    n = base.dim
    for i, eta in enumerate(etas, start=1):
        if eta.dim != n:
            raise DimensionError("eta dimension mismatch")
        if not eta.null_on_constants() or not eta.vanishes_on_linear():
            raise ValueError(f"eta_{i} must vanish on constants and on linear monomials")
    if len(etas) > order:
        raise ValueError("more etas than the truncation order")
    t = OperatorSeries(n, order, [DiffOp.identity(n)] + list(etas))
    if t.is_identity():
        return base
    return TwistedStar(base, invert_operator_series(t), label=f"etas({base.label})")


def weak_trivializer(sun: SunProduct, order: int, degree: int,
                     cochains: SunCochains | None = None) -> OperatorSeries:
    """S = (I + sum nu^r rho_r)^{-1}; S(f (.) g) = pi(f) pi(g)."""
    if cochains is None or cochains.rho is None:
        cochains = reconstruct_all(sun.star, order, degree, sun)
    return invert_operator_series(cochains.operator_series().with_order(order))


def monomial_pairs(dim: int, degree: int) -> Iterator[tuple[tuple, tuple]]:
    """(I, J) with |I| + |J| <= degree: total degree ascending, then I in graded order."""
    for total in range(degree + 1):
        for left in indices_up_to(dim, total):
            for right in indices_of_degree(dim, total - sum(left)):
                yield left, right


def check_weak_trivializer(sun: SunProduct, s: OperatorSeries, pairs) -> CheckReport:
    """S(f (.) g) == pi(f) pi(g) on the given polynomial pairs."""
    s = s.with_order(sun.order)
    checked = 0
    for f, g in pairs:
        got = s.apply(sun.multiply(f, g))
        want = NuSeries.from_poly(f * g, sun.order)
        checked += 1
        diff = got - want
        r = diff.first_nonzero()
        if r is not None:
            return CheckReport("weak trivializer", False, checked, (f, g), r, diff[r])
    return CheckReport("weak trivializer", True, checked)


def check_weak_equivalence(sun_a: SunProduct, sun_b: SunProduct, s: OperatorSeries,
                           order: int, degree: int) -> CheckReport:
    """S(f (.)_A g) == f (.)_B g on monomial pairs with |I| + |J| <= degree."""
    if sun_a.dim != sun_b.dim:
        raise DimensionError("sun-products live in different dimensions")
    s = s.with_order(order)
    a = sun_a if sun_a.order == order else SunProduct(sun_a.star, order)
    b = sun_b if sun_b.order == order else SunProduct(sun_b.star, order)
    checked = 0
    for left, right in monomial_pairs(a.dim, degree):
        f, g = Polynomial.monomial(left), Polynomial.monomial(right)
        diff = s.apply(a.multiply(f, g)) - b.multiply(f, g)
        checked += 1
        r = diff.first_nonzero()
        if r is not None:
            return CheckReport("weak equivalence", False, checked, (f, g), r, diff[r])
    return CheckReport("weak equivalence", True, checked)


def check_strong_equivalence(sun_a: SunProduct, sun_b: SunProduct, s: OperatorSeries,
                             order: int, degree: int) -> CheckReport:
    """Order by order: sum_{r+s=t} S_r rho_s(fg) == sum_{r+a+b=t} rho'_r(S_a(f) S_b(g))."""
    if sun_a.dim != sun_b.dim:
        raise DimensionError("sun-products live in different dimensions")
    s = s.with_order(order)
    a = sun_a if sun_a.order == order else SunProduct(sun_a.star, order)
    b = sun_b if sun_b.order == order else SunProduct(sun_b.star, order)
    n = a.dim
    checked = 0
    for left, right in monomial_pairs(n, degree):
        f, g = Polynomial.monomial(left), Polynomial.monomial(right)
        lhs = s.apply(a.rho_series(f * g))
        q = s.apply(f) * s.apply(g)
        rhs_coeffs = [Polynomial.zero(n) for _ in range(order + 1)]
        for u, qu in enumerate(q.coeffs):
            if not qu:
                continue
            for r, val in enumerate(b.rho_series(qu).coeffs[: order + 1 - u]):
                rhs_coeffs[r + u] = rhs_coeffs[r + u] + val
        diff = lhs - NuSeries(n, order, rhs_coeffs)
        checked += 1
        r = diff.first_nonzero()
        if r is not None:
            return CheckReport("strong equivalence", False, checked, (f, g), r, diff[r])
    return CheckReport("strong equivalence", True, checked)


def check_strong_multiplicativity(s: OperatorSeries, order: int, degree: int) -> CheckReport:
    """S(fg) == S(f) S(g) through nu^order on monomial pairs."""
    s = s.with_order(order)
    checked = 0
    for left, right in monomial_pairs(s.dim, degree):
        f, g = Polynomial.monomial(left), Polynomial.monomial(right)
        diff = s.apply(f * g) - s.apply(f) * s.apply(g)
        checked += 1
        r = diff.first_nonzero()
        if r is not None:
            return CheckReport("strong multiplicativity", False, checked, (f, g), r, diff[r])
    return CheckReport("strong multiplicativity", True, checked)


def check_rho1_coboundary(star: StarProduct, rho1: DiffOp, pairs) -> CheckReport:
    """delta rho_1 = P - C_1 on the given pairs."""
    delta = hochschild_coboundary(rho1.apply, 1)
    checked = 0
    for f, g in pairs:
        res = delta(f, g) - (star.poisson.bracket(f, g) - star.cochain(1, f, g))
        checked += 1
        if res:
            return CheckReport("rho_1 coboundary", False, checked, (f, g), 1, res)
    return CheckReport("rho_1 coboundary", True, checked)


__all__ = [
    "FactorMultiset",
    "ReconstructionError",
    "SunCochains",
    "SunProduct",
    "build_star_with_cochains",
    "check_in_EP",
    "check_rho1_coboundary",
    "check_strong_equivalence",
    "check_strong_multiplicativity",
    "check_weak_equivalence",
    "check_weak_trivializer",
    "equivalence_to_EP",
    "extract_sun_cochains",
    "lambda_factor",
    "monomial_pairs",
    "reconstruct_all",
    "reconstruct_cochain_diffop",
    "sun_mul",
    "symmetrized_star",
    "weak_trivializer",
]
