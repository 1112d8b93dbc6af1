"""Differential and bidifferential operators with polynomial coefficients.

A ``DiffOp`` is sum_J phi^J(x) d_J with derivatives written to the right of the
coefficients.  Operator series in nu (equivalence operators, trivializers)
are ``OperatorSeries``.
"""

from __future__ import annotations


from math import factorial
from typing import Callable, Iterable, Mapping

from .poly import (
    SCALAR_TYPES,
    Rational,
    DimensionError,
    NuSeries,
    Polynomial,
    TruncationError,
    falling_factorial,
    format_monomial,
    format_term,
    index_add,
    index_binomial,
    index_factorial,
    index_le,
    index_sub,
    indices_up_to,
    sub_indices,
    to_rational,
    unit_index,
    zero_index,
)


class FitError(ValueError):
    """A probe map is not a differential operator of the requested shape."""


def _clean(terms: Mapping) -> dict:
    return {k: v for k, v in terms.items() if not v.is_zero()}


def _accumulate(out: dict, key, value: Polynomial):
    if key in out:
        out[key] = out[key] + value
    else:
        out[key] = value


class DiffOp:
    """Linear differential operator sum_J phi^J d_J, immutable."""

    __slots__ = ("dim", "_terms")

    def __init__(self, dim: int, terms: Mapping[tuple, Polynomial] | None = None):
        self.dim = dim
        clean = {}
        for j, c in (terms or {}).items():
            j = tuple(j)
            if len(j) != dim:
                raise DimensionError(f"derivative index {j} in dimension {dim}")
            if not isinstance(c, Polynomial):
                c = Polynomial.constant(dim, c)
            if c.dim != dim:
                raise DimensionError("coefficient dimension mismatch")
            if j in clean:
                c = clean[j] + c
            clean[j] = c
        self._terms = _clean(clean)

    @classmethod
    def zero(cls, dim: int) -> DiffOp:
        return cls(dim)

    @classmethod
    def identity(cls, dim: int) -> DiffOp:
        return cls(dim, {zero_index(dim): Polynomial.one(dim)})

    @classmethod
    def partial(cls, dim: int, index: tuple, coeff: Polynomial | int | Rational = 1) -> DiffOp:
        return cls(dim, {tuple(index): coeff})

    @property
    def terms(self) -> dict[tuple, Polynomial]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    @property
    def order(self) -> int:
        """Highest derivative order present (-1 for the zero operator)."""
        return max((sum(j) for j in self._terms), default=-1)

    def is_zero(self) -> bool:
        return not self._terms

    def null_on_constants(self) -> bool:
        return zero_index(self.dim) not in self._terms

    def vanishes_on_linear(self) -> bool:
        """True iff the operator kills 1 and every x_i."""
        return all(sum(j) >= 2 for j in self._terms)

    def __call__(self, f):
        return self.apply(f)

    def apply(self, f):
        if isinstance(f, NuSeries):
            return NuSeries(f.dim, f.order, [self.apply(c) for c in f.coeffs])
        if f.dim != self.dim:
            raise DimensionError(f"dimension mismatch: operator {self.dim}, polynomial {f.dim}")
        out = Polynomial.zero(self.dim)
        for j, c in self._terms.items():
            d = f.derivative(j)
            if d:
                out = out + c * d
        return out

    def __add__(self, other: DiffOp) -> DiffOp:
        self._check(other)
        out = dict(self._terms)
        for j, c in other._terms.items():
            _accumulate(out, j, c)
        return DiffOp(self.dim, out)

    def __neg__(self):
        return DiffOp(self.dim, {j: -c for j, c in self._terms.items()})

    def __sub__(self, other: DiffOp) -> DiffOp:
        return self + (-other)

    def scale(self, c) -> DiffOp:
        return DiffOp(self.dim, {j: v.scale(c) for j, v in self._terms.items()})

    def left_multiply(self, p: Polynomial) -> DiffOp:
        """The operator f -> p * D(f)."""
        return DiffOp(self.dim, {j: p * v for j, v in self._terms.items()})

    def compose(self, other: DiffOp) -> DiffOp:
        """self o other, normalized with derivatives on the right (Leibniz)."""
        self._check(other)
        out: dict[tuple, Polynomial] = {}
        for i, a in self._terms.items():
            for k in sub_indices(i):
                rest = index_sub(i, k)
                binom = index_binomial(i, k)
                for j, b in other._terms.items():
                    db = b.derivative(k)
                    if db:
                        _accumulate(out, index_add(rest, j), (a * db).scale(binom))
        return DiffOp(self.dim, out)

    def __matmul__(self, other: DiffOp) -> DiffOp:
        return self.compose(other)

    def _check(self, other: DiffOp):
        if self.dim != other.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __eq__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self.dim == other.dim and self._terms == other._terms

    def __hash__(self):
        return hash((self.dim, frozenset(self._terms.items())))

    def to_text(self) -> str:
        if not self._terms:
            return "0"
        names = [f"d{i + 1}" for i in range(self.dim)]
        pieces = []
        for j in sorted(self._terms, key=lambda j: (sum(j), j), reverse=True):
            coeff = self._terms[j]
            deriv = format_monomial(j, names)
            if len(coeff) == 1:
                ((k, c),) = coeff.items()
                body = "*".join(p for p in (format_monomial(k), deriv) if p)
                pieces.append(format_term(c, body, first=not pieces))
            else:
                body = f"({coeff})" + (f"*{deriv}" if deriv else "")
                pieces.append(body if not pieces else f" + {body}")
        return "".join(pieces)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"DiffOp({self.dim}, {self.to_text()!r})"


def apply_diffop(op: DiffOp, f: Polynomial) -> Polynomial:
    return op.apply(f)


class BiDiffOp:
    """Bidifferential operator sum_{I,J} phi^{I,J} d_I f d_J g."""

    __slots__ = ("dim", "_terms")

    def __init__(self, dim: int, terms: Mapping[tuple[tuple, tuple], Polynomial] | None = None):
        self.dim = dim
        clean = {}
        for (i, j), c in (terms or {}).items():
            i, j = tuple(i), tuple(j)
            if len(i) != dim or len(j) != dim:
                raise DimensionError(f"derivative indices {(i, j)} in dimension {dim}")
            if not isinstance(c, Polynomial):
                c = Polynomial.constant(dim, c)
            if (i, j) in clean:
                c = clean[(i, j)] + c
            clean[(i, j)] = c
        self._terms = _clean(clean)

    @classmethod
    def pointwise(cls, dim: int) -> BiDiffOp:
        z = zero_index(dim)
        return cls(dim, {(z, z): Polynomial.one(dim)})

    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def null_on_constants(self) -> bool:
        z = zero_index(self.dim)
        return all(i != z and j != z for i, j in self._terms)

    def __call__(self, f, g):
        return self.apply(f, g)

    def apply(self, f: Polynomial, g: Polynomial) -> Polynomial:
        if f.dim != self.dim or g.dim != self.dim:
            raise DimensionError("dimension mismatch in bidifferential operator")
        out = Polynomial.zero(self.dim)
        df: dict[tuple, Polynomial] = {}
        dg: dict[tuple, Polynomial] = {}
        for (i, j), c in self._terms.items():
            if i not in df:
                df[i] = f.derivative(i)
            if not df[i]:
                continue
            if j not in dg:
                dg[j] = g.derivative(j)
            if dg[j]:
                out = out + c * df[i] * dg[j]
        return out

    def __add__(self, other: BiDiffOp) -> BiDiffOp:
        out = dict(self._terms)
        for k, c in other._terms.items():
            _accumulate(out, k, c)
        return BiDiffOp(self.dim, out)

    def scale(self, c) -> BiDiffOp:
        return BiDiffOp(self.dim, {k: v.scale(c) for k, v in self._terms.items()})

    def transpose(self) -> BiDiffOp:
        return BiDiffOp(self.dim, {(j, i): c for (i, j), c in self._terms.items()})

    def __eq__(self, other):
        if not isinstance(other, BiDiffOp):
            return NotImplemented
        return self.dim == other.dim and self._terms == other._terms

    def __hash__(self):
        return hash((self.dim, frozenset(self._terms.items())))

    def __repr__(self):
        return f"BiDiffOp({self.dim}, {len(self._terms)} terms)"


def apply_bidiffop(op: BiDiffOp, f: Polynomial, g: Polynomial) -> Polynomial:
    return op.apply(f, g)


def hochschild_coboundary(cochain: Callable, r: int) -> Callable:
    """Coboundary of a multidifferential r-cochain, r in {1, 2}.

    ``cochain`` is any callable taking ``r`` polynomials.  The result takes
    ``r + 1`` polynomials.
    """
    if r == 1:
        def delta1(f0, f1):
            return f0 * cochain(f1) - cochain(f0 * f1) + cochain(f0) * f1
        return delta1
    if r == 2:
        def delta2(f0, f1, f2):
            return (f0 * cochain(f1, f2) - cochain(f0 * f1, f2)
                    + cochain(f0, f1 * f2) - cochain(f0, f1) * f2)
        return delta2
    raise ValueError(f"coboundary implemented for 1- and 2-cochains only, got r={r}")


def fit_diffop(probe: Callable[[Polynomial], Polynomial], dim: int, max_degree: int,
               max_order: int | None = None, *, allow_constant: bool = False) -> DiffOp:
    """Recover the differential operator behind a linear map on polynomials.

    Works upward through the monomials of degree <= ``max_degree``: the
    coefficient of d_K is whatever the probe leaves on x^K after subtracting
    the lower-order terms already found, divided by K!.  Monomials of degree
    above ``max_order`` must leave no remainder.
    """
    if max_order is None:
        max_order = max_degree
    if max_order > max_degree:
        raise ValueError("max_order cannot exceed max_degree")
    coeffs: dict[tuple, Polynomial] = {}
    for k in indices_up_to(dim, max_degree):
        xk = Polynomial.monomial(k)
        residual = probe(xk)
        if residual.dim != dim:
            raise DimensionError("probe returned a polynomial of the wrong dimension")
        for j, c in coeffs.items():
            if index_le(j, k):
                w = 1
                for e, d in zip(k, j):
                    w *= falling_factorial(e, d)
                residual = residual - c * Polynomial.monomial(index_sub(k, j), w)
        if residual.is_zero():
            continue
        if not any(k) and not allow_constant:
            raise FitError(f"probe is not null on constants: maps 1 to {residual}")
        if sum(k) > max_order:
            raise FitError(
                f"probe is not a differential operator of order <= {max_order}: "
                f"residual {residual} on {Polynomial.monomial(k)}")
        coeffs[k] = residual.scale(Rational(1, index_factorial(k)))
    return DiffOp(dim, coeffs)


class OperatorSeries:
    """T = sum_{r<=R} nu^r T_r, each T_r a DiffOp; usually T_0 = I."""

    __slots__ = ("dim", "order", "terms")

    def __init__(self, dim: int, order: int, terms: Iterable[DiffOp] = ()):
        terms = list(terms)[: order + 1]
        for t in terms:
            if t.dim != dim:
                raise DimensionError("operator dimension mismatch")
        if not terms:
            terms = [DiffOp.identity(dim)]
        terms += [DiffOp.zero(dim)] * (order + 1 - len(terms))
        self.dim = dim
        self.order = order
        self.terms = tuple(terms)

    @classmethod
    def identity(cls, dim: int, order: int) -> OperatorSeries:
        return cls(dim, order, [DiffOp.identity(dim)])

    def __getitem__(self, r: int) -> DiffOp:
        return self.terms[r]

    def is_normalized(self) -> bool:
        """T_0 = I and every higher term null on constants."""
        return self.terms[0] == DiffOp.identity(self.dim) and all(
            t.null_on_constants() for t in self.terms[1:])

    def is_identity(self) -> bool:
        return self.terms[0] == DiffOp.identity(self.dim) and all(t.is_zero() for t in self.terms[1:])

    def fixes_linear(self) -> bool:
        return all(t.vanishes_on_linear() for t in self.terms[1:])

    def with_order(self, order: int) -> OperatorSeries:
        """Pad with zeros or truncate; padding is exact only for finite series."""
        return OperatorSeries(self.dim, order, self.terms)

    def apply(self, f) -> NuSeries:
        if isinstance(f, Polynomial):
            f = NuSeries.from_poly(f, self.order)
        if f.order != self.order:
            raise TruncationError(f"series order {f.order} vs operator order {self.order}")
        out = []
        for t in range(self.order + 1):
            acc = Polynomial.zero(self.dim)
            for r in range(t + 1):
                if f.coeffs[t - r] and not self.terms[r].is_zero():
                    acc = acc + self.terms[r].apply(f.coeffs[t - r])
            out.append(acc)
        return NuSeries(self.dim, self.order, out)

    __call__ = apply

    def __eq__(self, other):
        if not isinstance(other, OperatorSeries):
            return NotImplemented
        return (self.dim, self.order, self.terms) == (other.dim, other.order, other.terms)

    def __hash__(self):
        return hash((self.dim, self.order, self.terms))

    def __repr__(self):
        body = ", ".join(f"nu^{r}: {t}" for r, t in enumerate(self.terms) if not t.is_zero())
        return f"OperatorSeries(order={self.order}, {body})"


def compose_operator_series(a: OperatorSeries, b: OperatorSeries) -> OperatorSeries:
    if a.dim != b.dim:
        raise DimensionError("dimension mismatch")
    if a.order != b.order:
        raise TruncationError(f"truncation mismatch: {a.order} vs {b.order}")
    out = []
    for t in range(a.order + 1):
        acc = DiffOp.zero(a.dim)
        for r in range(t + 1):
            if not a.terms[r].is_zero() and not b.terms[t - r].is_zero():
                acc = acc + a.terms[r].compose(b.terms[t - r])
        out.append(acc)
    return OperatorSeries(a.dim, a.order, out)


def invert_operator_series(t: OperatorSeries) -> OperatorSeries:
    """Formal inverse of I + sum nu^r T_r, order by order."""
    if t.terms[0] != DiffOp.identity(t.dim):
        raise ValueError("operator series must start with the identity")
    inv = [DiffOp.identity(t.dim)]
    for n in range(1, t.order + 1):
        acc = DiffOp.zero(t.dim)
        for r in range(1, n + 1):
            if not t.terms[r].is_zero() and not inv[n - r].is_zero():
                acc = acc + t.terms[r].compose(inv[n - r])
        inv.append(-acc)
    return OperatorSeries(t.dim, t.order, inv)


def operator_exp(delta: DiffOp, order: int) -> OperatorSeries:
    """Truncated exp(nu * delta) = sum nu^r delta^r / r!."""
    terms = [DiffOp.identity(delta.dim)]
    power = DiffOp.identity(delta.dim)
    for r in range(1, order + 1):
        power = delta.compose(power)
        terms.append(power.scale(Rational(1, factorial(r))))
    return OperatorSeries(delta.dim, order, terms)


# -- exchange format ---------------------------------------------------------

def series_to_exchange(t: OperatorSeries) -> list[dict]:
    """[{order, terms: [{coeff, derivs}]}] for every nonzero T_r, r >= 1."""
    out = []
    for r, op in enumerate(t.terms):
        if r == 0 or op.is_zero():
            continue
        out.append({"order": r, "terms": diffop_to_exchange(op)})
    return out


def diffop_to_exchange(op: DiffOp) -> list[dict]:
    return [
        {"coeff": str(c), "derivs": list(j)}
        for j, c in sorted(op.items(), key=lambda kv: (sum(kv[0]), kv[0]), reverse=True)
    ]


def diffop_from_exchange(terms: list[dict], dim: int) -> DiffOp:
    from .parser import parse_expression

    out: dict[tuple, Polynomial] = {}
    for term in terms:
        derivs = tuple(int(d) for d in term["derivs"])
        if len(derivs) != dim or any(d < 0 for d in derivs):
            raise ValueError(f"bad derivative multi-index {term['derivs']!r} for dimension {dim}")
        coeff = term.get("coeff", "1")
        poly = parse_expression(str(coeff), dim) if not isinstance(coeff, SCALAR_TYPES) \
            else Polynomial.constant(dim, to_rational(coeff))
        _accumulate(out, derivs, poly)
    return DiffOp(dim, out)


def series_from_exchange(data: list[dict], dim: int, order: int | None = None) -> OperatorSeries:
    """Build I + sum nu^r T_r from the exchange format."""
    ops: dict[int, DiffOp] = {}
    for entry in data:
        r = int(entry["order"])
        if r < 1:
            raise ValueError("exchange entries must have order >= 1")
        op = diffop_from_exchange(entry.get("terms", []), dim)
        ops[r] = ops[r] + op if r in ops else op
    top = max(ops, default=0)
    order = top if order is None else order
    if top > order:
        raise ValueError(f"operator has a term of order {top} beyond the requested truncation {order}")
    terms = [DiffOp.identity(dim)] + [ops.get(r, DiffOp.zero(dim)) for r in range(1, order + 1)]
    return OperatorSeries(dim, order, terms)


def unit_derivative(dim: int, i: int, times: int = 1) -> tuple:
    return tuple(times if k == i else 0 for k in range(dim))


__all__ = [
    "BiDiffOp",
    "DiffOp",
    "FitError",
    "OperatorSeries",
    "apply_bidiffop",
    "apply_diffop",
    "compose_operator_series",
    "diffop_from_exchange",
    "diffop_to_exchange",
    "fit_diffop",
    "hochschild_coboundary",
    "invert_operator_series",
    "operator_exp",
    "series_from_exchange",
    "series_to_exchange",
    "unit_derivative",
    "unit_index",
]
