"""Exact multivariate polynomials over Q and nu-truncated formal series.

Multi-indices are plain tuples of non-negative ints.  Variables are 0-based
internally and printed 1-based (``x1``, ``x2``, ...).
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product as _cartesian
from math import comb, factorial
from typing import Iterable, Iterator, Mapping, Union

from gmpy2 import mpq

Rational = mpq
_MPQ = type(mpq())
SCALAR_TYPES = (int, Fraction, _MPQ)
_ZERO = mpq(0)
_ONE = mpq(1)
MultiIndex = tuple
Scalar = Union[int, Fraction, "mpq"]


class DimensionError(ValueError):
    """Operands live in different ambient dimensions."""


class TruncationError(ValueError):
    """Formal series with different truncation orders were combined."""


def to_rational(value) -> Rational:
    """Coerce ints, Fractions and ``"p/q"`` strings to an exact rational."""
    if isinstance(value, _MPQ):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, Fraction)):
        return mpq(value)
    if isinstance(value, str):
        try:
            return mpq(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def format_rational(c: Rational) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


# -- multi-indices -----------------------------------------------------------

def zero_index(n: int) -> tuple:
    return (0,) * n


def unit_index(n: int, i: int) -> tuple:
    return tuple(1 if k == i else 0 for k in range(n))


def index_add(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def index_sub(a: tuple, b: tuple) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


def index_le(a: tuple, b: tuple) -> bool:
    return all(x <= y for x, y in zip(a, b))


def index_factorial(a: tuple) -> int:
    out = 1
    for k in a:
        out *= factorial(k)
    return out


def falling_factorial(k: int, j: int) -> int:
    """k (k-1) ... (k-j+1); zero when j > k."""
    if j > k:
        return 0
    out = 1
    for t in range(j):
        out *= k - t
    return out


def index_binomial(a: tuple, b: tuple) -> int:
    out = 1
    for x, y in zip(a, b):
        out *= comb(x, y)
    return out


def grlex_key(index: tuple):
    """Sort key for graded lexicographic order (use with ``reverse=True``)."""
    return (sum(index), index)


def indices_of_degree(n: int, d: int) -> list[tuple]:
    """All multi-indices of total degree ``d``, in descending grlex order."""
    if n == 0:
        return [()] if d == 0 else []
    out = []
    for first in range(d, -1, -1):
        for rest in indices_of_degree(n - 1, d - first):
            out.append((first,) + rest)
    return out


def indices_up_to(n: int, d: int) -> list[tuple]:
    """Multi-indices with ``|K| <= d``: degree ascending, grlex descending within a degree."""
    out = []
    for k in range(d + 1):
        out.extend(indices_of_degree(n, k))
    return out


def sub_indices(a: tuple) -> Iterator[tuple]:
    """Every multi-index ``b <= a`` componentwise."""
    return _cartesian(*(range(k + 1) for k in a))


def format_monomial(index: tuple, names: Iterable[str] | None = None) -> str:
    names = list(names) if names is not None else [f"x{i + 1}" for i in range(len(index))]
    parts = []
    for name, k in zip(names, index):
        if k == 1:
            parts.append(name)
        elif k > 1:
            parts.append(f"{name}^{k}")
    return "*".join(parts)


def format_term(c: Rational, body: str, first: bool) -> str:
    """Render ``c * body`` with its sign as a separator (or prefix when first)."""
    sign = "-" if c < 0 else "+"
    a = -c if c < 0 else c
    if not body:
        text = format_rational(a)
    elif a == 1:
        text = body
    else:
        text = f"{format_rational(a)}*{body}"
    if first:
        return f"-{text}" if sign == "-" else text
    return f" {sign} {text}"


# -- polynomials -------------------------------------------------------------

class Polynomial:
    """Exact polynomial in ``dim`` variables with rational coefficients.

    Instances are immutable; every operation returns a new polynomial.
    Zero coefficients are never stored.
    """

    __slots__ = ("dim", "_terms", "_hash")

    def __init__(self, dim: int, terms: Mapping[tuple, Scalar] | None = None, *, _trusted=False):
        self.dim = dim
        if _trusted:
            self._terms = terms
        else:
            clean = {}
            for k, c in (terms or {}).items():
                k = tuple(int(e) for e in k)
                if len(k) != dim or any(e < 0 for e in k):
                    raise DimensionError(f"bad multi-index {k} for dimension {dim}")
                c = to_rational(c)
                if c:
                    clean[k] = clean.get(k, _ZERO) + c
                    if not clean[k]:
                        del clean[k]
            self._terms = clean
        self._hash = None

    # construction helpers
    @classmethod
    def zero(cls, dim: int) -> Polynomial:
        return cls(dim, {}, _trusted=True)

    @classmethod
    def constant(cls, dim: int, c: Scalar) -> Polynomial:
        c = to_rational(c)
        return cls(dim, {zero_index(dim): c} if c else {}, _trusted=True)

    @classmethod
    def one(cls, dim: int) -> Polynomial:
        return cls.constant(dim, 1)

    @classmethod
    def var(cls, dim: int, i: int) -> Polynomial:
        if not 0 <= i < dim:
            raise DimensionError(f"variable index {i} out of range for dimension {dim}")
        return cls(dim, {unit_index(dim, i): _ONE}, _trusted=True)

    @classmethod
    def monomial(cls, index: tuple, c: Scalar = 1) -> Polynomial:
        c = to_rational(c)
        return cls(len(index), {tuple(index): c} if c else {}, _trusted=True)

    # accessors
    @property
    def terms(self) -> Mapping[tuple, Rational]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, index: tuple) -> Rational:
        return self._terms.get(tuple(index), _ZERO)

    def sorted_terms(self) -> list[tuple[tuple, Rational]]:
        return sorted(self._terms.items(), key=lambda kv: grlex_key(kv[0]), reverse=True)

    @property
    def degree(self) -> float:
        """Total degree; ``-inf`` for the zero polynomial."""
        if not self._terms:
            return float("-inf")
        return max(sum(k) for k in self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not any(k) for k in self._terms)

    def constant_term(self) -> Rational:
        return self._terms.get(zero_index(self.dim), _ZERO)

    def homogeneous_part(self, d: int) -> Polynomial:
        return Polynomial(self.dim, {k: c for k, c in self._terms.items() if sum(k) == d}, _trusted=True)

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    # arithmetic
    def _check(self, other: Polynomial):
        if self.dim != other.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def _coerce(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, SCALAR_TYPES) and not isinstance(other, bool):
            return Polynomial.constant(self.dim, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for k, c in other._terms.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return Polynomial(self.dim, out, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.dim, {k: -c for k, c in self._terms.items()}, _trusted=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: Scalar) -> Polynomial:
        c = to_rational(c)
        if not c:
            return Polynomial.zero(self.dim)
        return Polynomial(self.dim, {k: v * c for k, v in self._terms.items()}, _trusted=True)

    def __mul__(self, other):
        if isinstance(other, SCALAR_TYPES) and not isinstance(other, bool):
            return self.scale(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check(other)
        out: dict[tuple, Rational] = {}
        for a, ca in self._terms.items():
            for b, cb in other._terms.items():
                k = tuple(x + y for x, y in zip(a, b))
                v = out.get(k, 0) + ca * cb
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
        return Polynomial(self.dim, out, _trusted=True)

    def __rmul__(self, other):
        if isinstance(other, SCALAR_TYPES) and not isinstance(other, bool):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, SCALAR_TYPES) and not isinstance(other, bool):
            return self.scale(1 / to_rational(other))
        return NotImplemented

    def __pow__(self, m: int):
        if not isinstance(m, int) or m < 0:
            raise ValueError("only non-negative integer powers are supported")
        result = Polynomial.one(self.dim)
        base = self
        while m:
            if m & 1:
                result = result * base
            base = base * base
            m >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.dim == other.dim and self._terms == other._terms
        if isinstance(other, SCALAR_TYPES) and not isinstance(other, bool):
            return self._terms == Polynomial.constant(self.dim, other)._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.dim, frozenset(self._terms.items())))
        return self._hash

    # calculus
    def derivative(self, index: tuple) -> Polynomial:
        """Iterated partial derivative by the multi-index ``index``."""
        index = tuple(index)
        if len(index) != self.dim:
            raise DimensionError(f"derivative index {index} does not match dimension {self.dim}")
        if not any(index):
            return self
        out = {}
        for k, c in self._terms.items():
            coef = 1
            for e, j in zip(k, index):
                if j > e:
                    coef = 0
                    break
                coef *= falling_factorial(e, j)
            if coef:
                key = tuple(e - j for e, j in zip(k, index))
                out[key] = out.get(key, 0) + c * coef
        return Polynomial(self.dim, {k: v for k, v in out.items() if v}, _trusted=True)

    def diff(self, i: int, times: int = 1) -> Polynomial:
        idx = [0] * self.dim
        idx[i] = times
        return self.derivative(tuple(idx))

    def embed(self, dim: int, offset: int = 0) -> Polynomial:
        """Re-express in ``dim`` variables, shifting variable ``k`` to ``k + offset``."""
        if offset + self.dim > dim:
            raise DimensionError("embedding does not fit")
        out = {}
        for k, c in self._terms.items():
            key = [0] * dim
            key[offset:offset + self.dim] = k
            out[tuple(key)] = c
        return Polynomial(dim, out, _trusted=True)

    def __str__(self):
        return self.to_text()

    def to_text(self, names: Iterable[str] | None = None) -> str:
        if not self._terms:
            return "0"
        names = list(names) if names is not None else None
        pieces = [
            format_term(c, format_monomial(k, names), first=(n == 0))
            for n, (k, c) in enumerate(self.sorted_terms())
        ]
        return "".join(pieces)

    def __repr__(self):
        return f"Polynomial({self.dim}, {self.to_text()!r})"


def poly_mul(f: Polynomial, g: Polynomial) -> Polynomial:
    return f * g


def partial_derivative(f: Polynomial, index: tuple) -> Polynomial:
    return f.derivative(index)


# -- truncated nu-series -----------------------------------------------------

class NuSeries:
    """Formal series sum_{r<=R} nu^r a_r with polynomial coefficients.

    Arithmetic discards every term of order above ``order``.  Combining series
    of different orders raises ``TruncationError``.
    """

    __slots__ = ("dim", "order", "coeffs")

    def __init__(self, dim: int, order: int, coeffs: Iterable[Polynomial] = ()):
        if order < 0:
            raise ValueError("truncation order must be non-negative")
        coeffs = list(coeffs)[: order + 1]
        for c in coeffs:
            if c.dim != dim:
                raise DimensionError(f"coefficient of dimension {c.dim} in a series of dimension {dim}")
        coeffs += [Polynomial.zero(dim)] * (order + 1 - len(coeffs))
        self.dim = dim
        self.order = order
        self.coeffs = tuple(coeffs)

    @classmethod
    def from_poly(cls, f: Polynomial, order: int) -> NuSeries:
        return cls(f.dim, order, [f])

    @classmethod
    def zero(cls, dim: int, order: int) -> NuSeries:
        return cls(dim, order)

    def __getitem__(self, r: int) -> Polynomial:
        if r > self.order:
            raise IndexError(f"order {r} beyond truncation {self.order}")
        return self.coeffs[r]

    def __iter__(self):
        return iter(self.coeffs)

    def _check(self, other: NuSeries):
        if self.dim != other.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")
        if self.order != other.order:
            raise TruncationError(f"truncation mismatch: {self.order} vs {other.order}")

    def __add__(self, other: NuSeries) -> NuSeries:
        self._check(other)
        return NuSeries(self.dim, self.order, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: NuSeries) -> NuSeries:
        self._check(other)
        return NuSeries(self.dim, self.order, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return NuSeries(self.dim, self.order, [-a for a in self.coeffs])

    def scale(self, c: Scalar) -> NuSeries:
        return NuSeries(self.dim, self.order, [a.scale(c) for a in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, SCALAR_TYPES) and not isinstance(other, bool):
            return self.scale(other)
        if not isinstance(other, NuSeries):
            return NotImplemented
        self._check(other)
        out = []
        for t in range(self.order + 1):
            acc = Polynomial.zero(self.dim)
            for r in range(t + 1):
                if self.coeffs[r] and other.coeffs[t - r]:
                    acc = acc + self.coeffs[r] * other.coeffs[t - r]
            out.append(acc)
        return NuSeries(self.dim, self.order, out)

    __rmul__ = scale

    def shift(self, k: int = 1) -> NuSeries:
        """Multiply by nu^k (truncating)."""
        zeros = [Polynomial.zero(self.dim)] * k
        return NuSeries(self.dim, self.order, zeros + list(self.coeffs))

    def truncate(self, order: int) -> NuSeries:
        return NuSeries(self.dim, order, self.coeffs)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def first_nonzero(self) -> int | None:
        for r, c in enumerate(self.coeffs):
            if c:
                return r
        return None

    def __eq__(self, other):
        if not isinstance(other, NuSeries):
            return NotImplemented
        return self.dim == other.dim and self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.dim, self.order, self.coeffs))

    def __str__(self):
        return self.to_text()

    def to_text(self) -> str:
        pieces = []
        for r, poly in enumerate(self.coeffs):
            nu = "" if r == 0 else ("nu" if r == 1 else f"nu^{r}")
            for k, c in poly.sorted_terms():
                mono = format_monomial(k)
                body = "*".join(p for p in (nu, mono) if p)
                pieces.append(format_term(c, body, first=not pieces))
        return "".join(pieces) if pieces else "0"

    def __repr__(self):
        return f"NuSeries(dim={self.dim}, order={self.order}, {self.to_text()!r})"


def series_mul(a: NuSeries, b: NuSeries) -> NuSeries:
    return a * b


def project_pi(a: NuSeries) -> Polynomial:
    """The nu^0 coefficient."""
    return a.coeffs[0]
