"""Poisson structures, Lie algebras, Bernoulli numbers and Campbell-Hausdorff data.

The BCH coefficients c_r(X, Y) are evaluated in a concrete Lie algebra with
Dynkin's nested-commutator formula, split by bidegree in (X, Y) so that
formal scalings sX, tY reduce to reading off components.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from math import comb, factorial
from typing import Iterator, Mapping, Sequence

from .diffop import BiDiffOp
from .poly import DimensionError, Polynomial, Rational, to_rational, unit_index, zero_index


class JacobiError(ValueError):
    """A bracket fails the Jacobi identity."""


class ConsistencyError(RuntimeError):
    """Two independent evaluation routes disagree (an implementation bug)."""


# -- linear forms ------------------------------------------------------------

@dataclass(frozen=True)
class LinearForm:
    """sum_i a_i x_i, an element of the Lie algebra / of Lin."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(to_rational(c) for c in self.coeffs))

    @classmethod
    def zero(cls, dim: int) -> LinearForm:
        return cls((0,) * dim)

    @classmethod
    def basis(cls, dim: int, i: int) -> LinearForm:
        return cls(unit_index(dim, i))

    @classmethod
    def from_poly(cls, p: Polynomial) -> LinearForm:
        if p.degree > 1 or p.constant_term():
            raise ValueError(f"{p} is not a homogeneous linear polynomial")
        return cls(tuple(p.coefficient(unit_index(p.dim, i)) for i in range(p.dim)))

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    def __add__(self, other: LinearForm) -> LinearForm:
        return LinearForm(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: LinearForm) -> LinearForm:
        return LinearForm(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return LinearForm(tuple(-a for a in self.coeffs))

    def __mul__(self, c) -> LinearForm:
        c = to_rational(c)
        return LinearForm(tuple(a * c for a in self.coeffs))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def to_poly(self) -> Polynomial:
        n = self.dim
        return Polynomial(n, {unit_index(n, i): c for i, c in enumerate(self.coeffs) if c})

    def __str__(self):
        return str(self.to_poly())


# -- Poisson structures ------------------------------------------------------

@dataclass
class JacobiReport:
    passed: bool
    triple: tuple | None = None  # 1-based (i, j, k) of the first failure
    residual: Polynomial | None = None

    def __bool__(self):
        return self.passed


class PoissonStructure:
    """Antisymmetric bivector P^{ij}(x) satisfying Jacobi."""

    def __init__(self, dim: int, matrix: Sequence[Sequence], *, check_jacobi: bool = True):
        if len(matrix) != dim or any(len(row) != dim for row in matrix):
            raise DimensionError(f"Poisson matrix must be {dim}x{dim}")
        rows = []
        for row in matrix:
            rows.append(tuple(
                p if isinstance(p, Polynomial) else Polynomial.constant(dim, p) for p in row))
        for i in range(dim):
            if rows[i][i]:
                raise ValueError(f"Poisson matrix has nonzero diagonal entry at ({i + 1},{i + 1})")
            for j in range(i + 1, dim):
                if rows[i][j] != -rows[j][i]:
                    raise ValueError(f"Poisson matrix is not antisymmetric at ({i + 1},{j + 1})")
        self.dim = dim
        self.matrix = tuple(rows)
        if check_jacobi:
            report = jacobi_check(self)
            if not report:
                raise JacobiError(f"Jacobi identity fails for triple {report.triple}: {report.residual}")

    @classmethod
    def zero(cls, dim: int) -> PoissonStructure:
        return cls(dim, [[0] * dim for _ in range(dim)])

    @classmethod
    def symplectic(cls, pairs: int) -> PoissonStructure:
        """Canonical constant structure on R^{2m}: P^{i,i+m} = 1."""
        n = 2 * pairs
        m = [[0] * n for _ in range(n)]
        for i in range(pairs):
            m[i][i + pairs] = 1
            m[i + pairs][i] = -1
        return cls(n, m)

    def entry(self, i: int, j: int) -> Polynomial:
        return self.matrix[i][j]

    def is_constant(self) -> bool:
        return all(p.is_constant() for row in self.matrix for p in row)

    def constant_matrix(self) -> list[list[Rational]]:
        if not self.is_constant():
            raise ValueError("Poisson structure does not have constant coefficients")
        return [[p.constant_term() for p in row] for row in self.matrix]

    def bracket(self, f: Polynomial, g: Polynomial) -> Polynomial:
        return poisson_bracket(self, f, g)

    __call__ = bracket

    def as_bidiffop(self) -> BiDiffOp:
        n = self.dim
        return BiDiffOp(n, {
            (unit_index(n, i), unit_index(n, j)): self.matrix[i][j]
            for i in range(n) for j in range(n) if self.matrix[i][j]
        })

    def __eq__(self, other):
        if not isinstance(other, PoissonStructure):
            return NotImplemented
        return self.matrix == other.matrix

    def __repr__(self):
        return f"PoissonStructure(dim={self.dim})"


def poisson_bracket(p: PoissonStructure, f: Polynomial, g: Polynomial) -> Polynomial:
    if f.dim != p.dim or g.dim != p.dim:
        raise DimensionError("dimension mismatch in Poisson bracket")
    n = p.dim
    df = [f.diff(i) for i in range(n)]
    dg = [g.diff(j) for j in range(n)]
    out = Polynomial.zero(n)
    for i in range(n):
        if not df[i]:
            continue
        for j in range(n):
            if p.matrix[i][j] and dg[j]:
                out = out + p.matrix[i][j] * df[i] * dg[j]
    return out


def jacobi_check(p: PoissonStructure) -> JacobiReport:
    """Cyclic sum sum_l P^{il} d_l P^{jk} + cyc for every i < j < k."""
    n = p.dim
    m = p.matrix
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                total = Polynomial.zero(n)
                for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
                    for l in range(n):
                        if m[a][l]:
                            total = total + m[a][l] * m[b][c].diff(l)
                if total:
                    return JacobiReport(False, (i + 1, j + 1, k + 1), total)
    return JacobiReport(True)


# -- Lie algebras ------------------------------------------------------------

class LieAlgebra:
    """Finite-dimensional Lie algebra given by structure constants [e_i, e_j] = sum_k C_ij^k e_k."""

    def __init__(self, dim: int, brackets: Mapping[tuple[int, int], Mapping[int, object]] | None = None):
        """``brackets`` maps 0-based pairs (i, j) to {k: C_ij^k}; antisymmetry is implied."""
        self.dim = dim
        table: dict[tuple[int, int], tuple] = {}
        for (i, j), row in (brackets or {}).items():
            if not (0 <= i < dim and 0 <= j < dim):
                raise DimensionError(f"bracket index ({i + 1},{j + 1}) out of range")
            if i == j:
                if any(to_rational(v) for v in row.values()):
                    raise ValueError(f"[e_{i + 1}, e_{i + 1}] must vanish")
                continue
            vec = [Rational(0)] * dim
            for k, c in row.items():
                if not 0 <= k < dim:
                    raise DimensionError(f"structure constant index {k + 1} out of range")
                vec[k] += to_rational(c)
            key, sign = ((i, j), 1) if i < j else ((j, i), -1)
            old = table.get(key, (Rational(0),) * dim)
            table[key] = tuple(o + sign * v for o, v in zip(old, vec))
        self._table = {k: v for k, v in table.items() if any(v)}
        self._poisson = None
        report = jacobi_check(self.poisson())
        if not report:
            raise JacobiError(f"structure constants violate Jacobi at {report.triple}")

    @classmethod
    def from_entries(cls, dim: int, entries: Sequence[Mapping]) -> LieAlgebra:
        """From 1-based records {i, j, k, c} meaning C_ij^k = c."""
        brackets: dict[tuple[int, int], dict[int, Rational]] = {}
        for e in entries:
            i, j, k = int(e["i"]) - 1, int(e["j"]) - 1, int(e["k"]) - 1
            row = brackets.setdefault((i, j), {})
            row[k] = row.get(k, Rational(0)) + to_rational(e.get("c", 1))
        return cls(dim, brackets)

    def structure_constant(self, i: int, j: int, k: int) -> Rational:
        return self.bracket_basis(i, j)[k]

    def bracket_basis(self, i: int, j: int) -> tuple:
        if i == j:
            return (Rational(0),) * self.dim
        if i < j:
            return self._table.get((i, j), (Rational(0),) * self.dim)
        return tuple(-c for c in self._table.get((j, i), (Rational(0),) * self.dim))

    def nonzero_brackets(self):
        """(i, j, vector) for i < j with nonzero bracket."""
        return [(i, j, v) for (i, j), v in sorted(self._table.items())]

    def is_abelian(self) -> bool:
        return not self._table

    def bracket(self, x: LinearForm, y: LinearForm) -> LinearForm:
        out = [Rational(0)] * self.dim
        for (i, j), vec in self._table.items():
            w = x.coeffs[i] * y.coeffs[j] - x.coeffs[j] * y.coeffs[i]
            if w:
                for k, c in enumerate(vec):
                    if c:
                        out[k] += w * c
        return LinearForm(tuple(out))

    def poisson(self) -> PoissonStructure:
        """The linear Poisson structure P^{ij} = sum_k C_ij^k x_k."""
        if self._poisson is None:
            n = self.dim
            m = [[Polynomial.zero(n)] * n for _ in range(n)]
            for (i, j), vec in self._table.items():
                p = LinearForm(vec).to_poly()
                m[i][j] = p
                m[j][i] = -p
            self._poisson = PoissonStructure(n, m, check_jacobi=False)
        return self._poisson

    def __eq__(self, other):
        if not isinstance(other, LieAlgebra):
            return NotImplemented
        return self.dim == other.dim and self._table == other._table

    def __hash__(self):
        return hash((self.dim, frozenset(self._table.items())))

    def __repr__(self):
        return f"LieAlgebra(dim={self.dim}, brackets={len(self._table)})"


def abelian(dim: int) -> LieAlgebra:
    return LieAlgebra(dim)


def heisenberg() -> LieAlgebra:
    """[e1, e2] = e3."""
    return LieAlgebra(3, {(0, 1): {2: 1}})


def su2() -> LieAlgebra:
    """[e1, e2] = e3 and cyclic."""
    return LieAlgebra(3, {(0, 1): {2: 1}, (1, 2): {0: 1}, (2, 0): {1: 1}})


def ad_power(algebra: LieAlgebra, y: LinearForm, r: int, x: LinearForm) -> LinearForm:
    """(ad_Y)^r (X) with ad_Y X = [Y, X]."""
    if r < 0:
        raise ValueError("power must be non-negative")
    for _ in range(r):
        x = algebra.bracket(y, x)
    return x


# -- Bernoulli numbers -------------------------------------------------------

_bernoulli_memo: list[Rational] = [Rational(1)]
_bernoulli_lock = threading.Lock()


def bernoulli(n: int) -> Rational:
    """B_n with B_1 = -1/2, from sum_{k<=n} C(n+1, k) B_k = 0."""
    if n < 0:
        raise ValueError("Bernoulli index must be non-negative")
    if n < len(_bernoulli_memo):
        return _bernoulli_memo[n]
    with _bernoulli_lock:
        while len(_bernoulli_memo) <= n:
            m = len(_bernoulli_memo)
            s = sum(comb(m + 1, k) * _bernoulli_memo[k] for k in range(m))
            _bernoulli_memo.append(-s / (m + 1))
    return _bernoulli_memo[n]


# -- Campbell-Hausdorff ------------------------------------------------------

def _dynkin_blocks(total: int) -> Iterator[tuple]:
    """Sequences ((r1, s1), ..., (rk, sk)) with ri + si >= 1 summing to ``total``."""
    if total == 0:
        yield ()
        return
    for w in range(1, total + 1):
        for r in range(w + 1):
            for rest in _dynkin_blocks(total - w):
                yield ((r, w - r),) + rest


_dynkin_cache: dict[int, dict[str, Rational]] = {}
_dynkin_lock = threading.Lock()


def dynkin_word_coefficients(r: int) -> dict[str, Rational]:
    """Coefficient of each right-nested bracket word (letters 'X', 'Y') in c_r."""
    if r in _dynkin_cache:
        return _dynkin_cache[r]
    words: dict[str, Rational] = {}
    for blocks in _dynkin_blocks(r):
        k = len(blocks)
        denom = r * k
        for a, b in blocks:
            denom *= factorial(a) * factorial(b)
        word = "".join("X" * a + "Y" * b for a, b in blocks)
        if len(word) >= 2 and word[-1] == word[-2]:
            continue
        coeff = Rational((-1) ** (k - 1), denom)
        words[word] = words.get(word, Rational(0)) + coeff
    words = {w: c for w, c in words.items() if c}
    with _dynkin_lock:
        _dynkin_cache[r] = words
    return words


class BchContext:
    """Memoized Campbell-Hausdorff coefficients for one Lie algebra."""

    def __init__(self, algebra: LieAlgebra, max_order: int = 8):
        self.algebra = algebra
        self.max_order = max_order
        self._memo: dict[tuple, dict[tuple[int, int], LinearForm]] = {}
        self._lock = threading.Lock()

    def components(self, r: int, x: LinearForm, y: LinearForm) -> dict[tuple[int, int], LinearForm]:
        """c_r(X, Y) split by bidegree: {(deg_X, deg_Y): value}."""
        if r < 1:
            raise ValueError("BCH coefficients start at r = 1")
        if r > self.max_order:
            raise ValueError(f"BCH order {r} exceeds the configured cap {self.max_order}")
        key = (r, x.coeffs, y.coeffs)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        alg = self.algebra
        nested: dict[str, LinearForm] = {}

        def evaluate(word: str) -> LinearForm:
            if word in nested:
                return nested[word]
            letter = x if word[0] == "X" else y
            value = letter if len(word) == 1 else alg.bracket(letter, evaluate(word[1:]))
            nested[word] = value
            return value

        out: dict[tuple[int, int], LinearForm] = {}
        for word, c in dynkin_word_coefficients(r).items():
            v = evaluate(word)
            if v.is_zero():
                continue
            bideg = (word.count("X"), word.count("Y"))
            out[bideg] = out[bideg] + v * c if bideg in out else v * c
        out = {k: v for k, v in out.items() if not v.is_zero()}
        with self._lock:
            self._memo[key] = out
        return out

    def c(self, r: int, x: LinearForm, y: LinearForm) -> LinearForm:
        total = LinearForm.zero(self.algebra.dim)
        for v in self.components(r, x, y).values():
            total = total + v
        return total

    def z(self, r: int, x: LinearForm, y: LinearForm) -> LinearForm:
        return self.c(r + 1, x, y) * (2 ** r)


def bch_coefficient(ctx: BchContext, r: int, x: LinearForm, y: LinearForm) -> LinearForm:
    return ctx.c(r, x, y)


def z_coefficient(ctx: BchContext, r: int, x: LinearForm, y: LinearForm) -> LinearForm:
    """Z_r = 2^r c_{r+1}."""
    if r < 0:
        raise ValueError("Z index must be non-negative")
    return ctx.z(r, x, y)


# -- F_r series --------------------------------------------------------------

def _partitions(r: int, largest: int | None = None) -> Iterator[dict[int, int]]:
    """Integer partitions of r as {part: multiplicity}, parts <= largest."""
    if largest is None:
        largest = r
    if r == 0:
        yield {}
        return
    for m in range(min(r, largest), 0, -1):
        for count in range(r // m, 0, -1):
            for rest in _partitions(r - m * count, m - 1):
                out = {m: count}
                out.update(rest)
                yield out


def f_by_recursion(zs: Sequence[Polynomial], r: int) -> Polynomial:
    """F_r = (1/r) sum_{k<r} (r - k) Z_{r-k} F_k with F_0 = 1; zs[m] = Z_m."""
    dim = zs[0].dim
    fs = [Polynomial.one(dim)]
    for n in range(1, r + 1):
        acc = Polynomial.zero(dim)
        for k in range(n):
            acc = acc + (zs[n - k] * fs[k]).scale(n - k)
        fs.append(acc.scale(Rational(1, n)))
    return fs[r]


def f_by_partitions(zs: Sequence[Polynomial], r: int) -> Polynomial:
    """Sum over partitions of r of prod Z_m^{n_m} / n_m!."""
    dim = zs[0].dim
    if r == 0:
        return Polynomial.one(dim)
    out = Polynomial.zero(dim)
    for part in _partitions(r):
        term = Polynomial.one(dim)
        denom = 1
        for m, n in part.items():
            term = term * zs[m] ** n
            denom *= factorial(n)
        out = out + term.scale(Rational(1, denom))
    return out


def f_series(ctx: BchContext, r: int, x: LinearForm, y: LinearForm) -> Polynomial:
    """F_r(X, Y) as a polynomial; both evaluation routes must agree."""
    if r < 0:
        raise ValueError("F index must be non-negative")
    zs = [ctx.z(m, x, y).to_poly() if m else Polynomial.zero(x.dim) for m in range(r + 1)]
    a = f_by_recursion(zs, r)
    b = f_by_partitions(zs, r)
    if a != b:
        raise ConsistencyError(f"F_{r} recursion {a} differs from explicit sum {b}")
    return a


def scaled_z_polys(ctx: BchContext, order: int, x: LinearForm, y: LinearForm) -> list[Polynomial]:
    """Z_m(sX, tY) for m <= order as polynomials in (x_1..x_n, s, t)."""
    n = x.dim
    out = [Polynomial.zero(n + 2)]
    for m in range(1, order + 1):
        acc = Polynomial.zero(n + 2)
        for (a, b), v in ctx.components(m + 1, x, y).items():
            st = [0] * (n + 2)
            st[n], st[n + 1] = a, b
            acc = acc + v.to_poly().embed(n + 2) * Polynomial.monomial(tuple(st), 2 ** m)
        out.append(acc)
    return out


__all__ = [
    "BchContext",
    "ConsistencyError",
    "JacobiError",
    "JacobiReport",
    "LieAlgebra",
    "LinearForm",
    "PoissonStructure",
    "abelian",
    "ad_power",
    "bch_coefficient",
    "bernoulli",
    "dynkin_word_coefficients",
    "f_by_partitions",
    "f_by_recursion",
    "f_series",
    "heisenberg",
    "jacobi_check",
    "poisson_bracket",
    "scaled_z_polys",
    "su2",
    "z_coefficient",
    "zero_index",
]
