"""Normal-ordered arithmetic in the universal enveloping algebra U(g).

Elements are finite sums of ordered monomials e_1^{k_1} ... e_n^{k_n}, keyed
by the exponent tuple.  Products are reduced with e_j e_i = e_i e_j + [e_j, e_i]
for j > i.  All tables are memoized per Lie algebra; entries are only ever
added, under a lock.
"""

from __future__ import annotations

import threading
from typing import Mapping

from .lie import LieAlgebra
from .poly import Polynomial, Rational, zero_index

Element = dict  # tuple -> Rational, no zero values


def _add_into(out: dict, src: Mapping, scale: Rational = Rational(1)):
    for k, c in src.items():
        v = out.get(k, 0) + c * scale
        if v:
            out[k] = v
        else:
            out.pop(k, None)


class PbwEngine:
    """Symmetrization, products and graded decomposition in U(g)."""

    def __init__(self, algebra: LieAlgebra):
        self.algebra = algebra
        self.dim = algebra.dim
        n = self.dim
        self._brackets = {
            (i, j): [(k, c) for k, c in enumerate(algebra.bracket_basis(i, j)) if c]
            for i in range(n) for j in range(n)
        }
        self._lmul: dict[tuple, Element] = {}
        self._symprod: dict[tuple, Element] = {}
        self._inverse: dict[tuple, Polynomial] = {}
        self._cochains: dict[tuple, dict[int, Polynomial]] = {}
        self._lock = threading.RLock()

    # generator times ordered monomial
    def lmul_gen(self, j: int, a: tuple) -> Element:
        """e_j * e^a in normal order."""
        key = (j, a)
        hit = self._lmul.get(key)
        if hit is not None:
            return hit
        m = next((i for i, k in enumerate(a) if k), None)
        if m is None or j <= m:
            b = list(a)
            b[j] += 1
            out = {tuple(b): Rational(1)}
        else:
            rest = list(a)
            rest[m] -= 1
            rest = tuple(rest)
            out = {}
            for b, c in self.lmul_gen(j, rest).items():
                _add_into(out, self.lmul_gen(m, b), c)
            for l, c in self._brackets[(j, m)]:
                _add_into(out, self.lmul_gen(l, rest), c)
        with self._lock:
            self._lmul[key] = out
        return out

    def lmul_gen_element(self, j: int, u: Mapping) -> Element:
        out: Element = {}
        for a, c in u.items():
            _add_into(out, self.lmul_gen(j, a), c)
        return out

    def multiply(self, u: Mapping, v: Mapping) -> Element:
        """General product u * v of normal-ordered elements."""
        out: Element = {}
        for a, c in u.items():
            w = dict(v)
            for i in range(self.dim - 1, -1, -1):
                for _ in range(a[i]):
                    w = self.lmul_gen_element(i, w)
            _add_into(out, w, c)
        return out

    # symmetrization
    def sym_product(self, left: tuple, right: tuple) -> Element:
        """phi(x^left) * phi(x^right), using phi(x^K) = (1/|K|) sum_i K_i e_i phi(x^{K - e_i})."""
        key = (left, right)
        hit = self._symprod.get(key)
        if hit is not None:
            return hit
        k = sum(left)
        if k == 0:
            if any(right):
                out = self.sym_product(right, zero_index(self.dim))
            else:
                out = {right: Rational(1)}
        else:
            out = {}
            for i, mult in enumerate(left):
                if not mult:
                    continue
                smaller = list(left)
                smaller[i] -= 1
                _add_into(out, self.lmul_gen_element(i, self.sym_product(tuple(smaller), right)),
                          Rational(mult, k))
        with self._lock:
            self._symprod[key] = out
        return out

    def symmetrize(self, index: tuple) -> Element:
        return self.sym_product(tuple(index), zero_index(self.dim))

    # inverse of the symmetrization map
    def inverse_basis(self, a: tuple) -> Polynomial:
        """phi^{-1}(e^a): subtract the lower-order tail of phi(x^a) recursively."""
        hit = self._inverse.get(a)
        if hit is not None:
            return hit
        acc = {a: Rational(1)}
        for b, c in self.symmetrize(a).items():
            if b != a:
                _add_into(acc, self.inverse_basis(b)._terms, -c)
        out = Polynomial(self.dim, acc, _trusted=True)
        with self._lock:
            self._inverse[a] = out
        return out

    def to_symmetric(self, u: Mapping) -> Polynomial:
        acc: dict = {}
        for a, c in u.items():
            _add_into(acc, self.inverse_basis(a)._terms, c)
        return Polynomial(self.dim, acc, _trusted=True)

    def decompose(self, u: Mapping) -> dict[int, Polynomial]:
        """{r: p_r} with u = sum_r phi(p_r), p_r homogeneous of degree r."""
        total = self.to_symmetric(u)
        out: dict[int, dict] = {}
        for k, c in total.items():
            out.setdefault(sum(k), {})[k] = c
        return {r: Polynomial(self.dim, t) for r, t in sorted(out.items())}

    def monomial_cochains(self, left: tuple, right: tuple) -> dict[int, Polynomial]:
        """{r: C_r(x^left, x^right)} for the Gutt product, nonzero entries only."""
        key = (left, right)
        hit = self._cochains.get(key)
        if hit is not None:
            return hit
        top = sum(left) + sum(right)
        parts = self.decompose(self.sym_product(left, right))
        out = {top - d: p.scale(2 ** (top - d)) for d, p in parts.items() if p}
        with self._lock:
            self._cochains[key] = out
        return out


_engines: dict[LieAlgebra, PbwEngine] = {}
_engines_lock = threading.Lock()


def engine_for(algebra: LieAlgebra) -> PbwEngine:
    eng = _engines.get(algebra)
    if eng is None:
        with _engines_lock:
            eng = _engines.setdefault(algebra, PbwEngine(algebra))
    return eng


class PbwElement:
    """An element of U(g) in the ordered PBW basis."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: LieAlgebra, terms: Mapping[tuple, object] | None = None):
        self.algebra = algebra
        self.terms = {tuple(k): Rational(c) for k, c in (terms or {}).items() if c}

    @classmethod
    def generator(cls, algebra: LieAlgebra, i: int) -> PbwElement:
        k = [0] * algebra.dim
        k[i] = 1
        return cls(algebra, {tuple(k): 1})

    def __mul__(self, other: PbwElement) -> PbwElement:
        return PbwElement(self.algebra, engine_for(self.algebra).multiply(self.terms, other.terms))

    def __add__(self, other: PbwElement) -> PbwElement:
        out = dict(self.terms)
        _add_into(out, other.terms)
        return PbwElement(self.algebra, out)

    def __sub__(self, other: PbwElement) -> PbwElement:
        out = dict(self.terms)
        _add_into(out, other.terms, Rational(-1))
        return PbwElement(self.algebra, out)

    def scale(self, c) -> PbwElement:
        return PbwElement(self.algebra, {k: v * c for k, v in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, PbwElement):
            return NotImplemented
        return self.algebra == other.algebra and self.terms == other.terms

    def __repr__(self):
        names = [f"e{i + 1}" for i in range(self.algebra.dim)]
        from .poly import format_monomial, format_term

        items = sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]), reverse=True)
        body = "".join(format_term(c, format_monomial(k, names), first=(n == 0))
                       for n, (k, c) in enumerate(items))
        return f"PbwElement({body or '0'})"


def gutt_symmetrize(algebra: LieAlgebra, index: tuple) -> PbwElement:
    return PbwElement(algebra, engine_for(algebra).symmetrize(tuple(index)))


def gutt_decompose(algebra: LieAlgebra, u: PbwElement) -> dict[int, Polynomial]:
    return engine_for(algebra).decompose(u.terms)
