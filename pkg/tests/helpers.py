"""Independent oracles and random fixtures shared by the test modules.

Nothing here calls the Buchberger code or the Taylor-coefficient path of the
derivative engine; these are the brute-force routes the library is checked
against.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from hypothesis import strategies as st

from multbound.polynomial import Polynomial, monomials_of_degree


def exponents_up_to(n: int, degree: int):
    for d in range(degree + 1):
        yield from monomials_of_degree(n, d)


def rank(rows: list[list[Fraction]]) -> int:
    """Rank over Q by Gaussian elimination."""
    rows = [list(r) for r in rows if any(r)]
    if not rows:
        return 0
    ncols = len(rows[0])
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        pv = rows[r][c]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c] / pv
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        r += 1
        if r == len(rows):
            break
    return r


def truncated_colength(generators: list[Polynomial], n: int, N: int) -> int:
    """``dim_Q A / (I + m^N)`` with ``m`` the origin, by linear algebra.

    ``(I + m^N)/m^N`` is spanned by ``X^b g`` truncated below degree ``N``
    for ``|b| < N``.
    """
    basis = list(exponents_up_to(n, N - 1))
    col = {e: i for i, e in enumerate(basis)}
    rows = []
    for g in generators:
        for b in basis:
            row = [Fraction(0)] * len(basis)
            for e, c in g.items():
                m = tuple(x + y for x, y in zip(e, b))
                if m in col:
                    row[col[m]] += c
            rows.append(row)
    return len(basis) - rank(rows)


def partial(f: Polynomial, i: int) -> Polynomial:
    """Single-variable derivative ``d/dx_i`` done the schoolbook way."""
    out = {}
    for e, c in f.items():
        if e[i]:
            e2 = list(e)
            e2[i] -= 1
            out[tuple(e2)] = c * e[i]
    return Polynomial(f.n, out)


def iterated_derivative(f: Polynomial, gamma) -> Polynomial:
    for i, k in enumerate(gamma):
        for _ in range(k):
            f = partial(f, i)
    return f


def box_colength(leading, n: int) -> int:
    """Standard monomials counted over the full pure-power box."""
    caps = []
    for i in range(n):
        pure = [lt[i] for lt in leading if lt[i] and sum(lt) == lt[i]]
        caps.append(min(pure))
    return sum(
        1
        for e in itertools.product(*(range(c) for c in caps))
        if not any(all(a <= b for a, b in zip(lt, e)) for lt in leading)
    )


def random_polynomial(rng: random.Random, n: int, max_degree: int, max_terms: int = 6) -> Polynomial:
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        d = rng.randint(0, max_degree)
        parts = [0] * n
        for _ in range(d):
            parts[rng.randrange(n)] += 1
        terms[tuple(parts)] = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
    return Polynomial(n, terms)


def random_point(rng: random.Random, n: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(n))


def random_mprimary(rng: random.Random, max_n: int = 3, max_degree: int = 6):
    """A random ideal primary to the maximal ideal of a random rational point.

    Built as random combinations of monomials in ``X - a`` of degree above
    ``t`` plus every monomial ``(X - a)^b`` with ``|b| = t + 2``.  Returns
    ``(generators, point, t)``.
    """
    n = rng.randint(1, max_n)
    t = rng.randint(0, max_degree - 3)
    a = random_point(rng, n)
    neg = tuple(-x for x in a)
    gens = []
    for _ in range(rng.randint(1, 3)):
        terms = {}
        for _ in range(rng.randint(1, 4)):
            d = rng.randint(t + 1, min(max_degree, t + 3))
            e = rng.choice(list(monomials_of_degree(n, d)))
            terms[e] = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]))
        gens.append(Polynomial(n, terms).translate(neg))
    for e in monomials_of_degree(n, t + 2):
        gens.append(Polynomial.monomial(e).translate(neg))
    return gens, a, t


def compositions(gamma, r):
    """All ``(g_1, ..., g_r)`` with ``g_1 + ... + g_r = gamma``."""
    if r == 1:
        yield (tuple(gamma),)
        return
    for first in itertools.product(*(range(g + 1) for g in gamma)):
        rest = tuple(g - f for g, f in zip(gamma, first))
        for tail in compositions(rest, r - 1):
            yield (first,) + tail


def leibniz_rhs(factors, gamma):
    n = factors[0].n
    total = Polynomial.zero(n)
    for parts in compositions(gamma, len(factors)):
        term = Polynomial.constant(n, 1)
        for f, g in zip(factors, parts):
            term = term * f.normalized_diff(g)
        total = total + term
    return total


# hypothesis strategies

fractions = st.builds(
    Fraction, st.integers(-6, 6), st.integers(1, 4)
)


def polynomials(n: int, max_degree: int = 4, max_terms: int = 6):
    exps = st.lists(st.integers(0, max_degree), min_size=n, max_size=n).map(tuple).filter(
        lambda e: sum(e) <= max_degree
    )
    return st.dictionaries(exps, fractions, max_size=max_terms).map(lambda t: Polynomial(n, t))


def staircase_generators(n: int, max_coord: int = 4, max_gens: int = 5):
    return st.lists(
        st.lists(st.integers(0, max_coord), min_size=n, max_size=n).map(tuple),
        max_size=max_gens,
    )
