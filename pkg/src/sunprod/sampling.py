"""Seeded random inputs for property checks."""

from __future__ import annotations

import random

from .lie import LinearForm
from .poly import Polynomial, Rational, indices_up_to


def random_rational(rng: random.Random, bound: int = 5) -> Rational:
    num = 0
    while num == 0:
        num = rng.randint(-bound, bound)
    return Rational(num, rng.randint(1, 3))


def random_polynomial(rng: random.Random, dim: int, max_degree: int, max_terms: int = 3,
                      *, min_degree: int = 0) -> Polynomial:
    """Sparse polynomial with 1..max_terms terms of degree in [min_degree, max_degree]."""
    pool = [k for k in indices_up_to(dim, max_degree) if sum(k) >= min_degree]
    count = rng.randint(1, max_terms)
    return Polynomial(dim, {rng.choice(pool): random_rational(rng) for _ in range(count)})


def random_linear_form(rng: random.Random, dim: int) -> LinearForm:
    while True:
        coeffs = tuple(Rational(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(dim))
        if any(coeffs):
            return LinearForm(coeffs)
