"""Gröbner bases over Q and the colength / local-length oracle.

This is the independent ground truth for the derivative bounds: exact
Buchberger with the normal selection strategy, full normal forms, counting
of standard monomials, elimination ideals, Krull dimension of the quotient,
and local length at a rational point via ``colength(I + m_a^N)``.

Internally polynomials are plain ``dict[exponent, Fraction]`` maps; the
public surface takes and returns :class:`~multbound.polynomial.Polynomial`.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .polynomial import (
    DimensionError,
    Polynomial,
    parse_polynomial,
    power_of_maximal_ideal,
)
from .staircase import StaircaseSet

Exponent = tuple[int, ...]
Terms = dict[Exponent, Fraction]

INFINITE = math.inf

DEFAULT_MAX_STEPS = 200_000
DEFAULT_MAX_DEGREE = 512
DEFAULT_CONFIRM = 2
DEFAULT_MAX_ORDER = 64


class GroebnerLimitError(RuntimeError):
    """Buchberger hit its step or degree cap.

    ``partial`` holds the (not yet complete) generating set reached so far.
    """

    def __init__(self, message: str, partial: list[Polynomial]):
        super().__init__(message)
        self.partial = partial


class NonStabilizationError(RuntimeError):
    """Local length did not stabilize before the order cap."""

    def __init__(self, message: str, trace: list[tuple[int, int]]):
        super().__init__(message)
        self.trace = trace


class EmptyVarietyError(ValueError):
    pass


@dataclass(frozen=True)
class MonomialOrder:
    """Lexicographic or graded reverse lexicographic order.

    ``permutation`` lists 0-based variable indices from most to least
    significant; ``None`` means ``x1 > x2 > ... > xn``.
    """

    kind: str = "grevlex"
    permutation: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.kind not in ("lex", "grevlex"):
            raise ValueError(f"unknown monomial order {self.kind!r}")
        if self.permutation is not None:
            perm = tuple(int(p) for p in self.permutation)
            if sorted(perm) != list(range(len(perm))):
                raise ValueError(f"{perm} is not a permutation")
            object.__setattr__(self, "permutation", perm)

    def key(self, n: int) -> Callable[[Exponent], tuple]:
        perm = self.permutation or tuple(range(n))
        if len(perm) != n:
            raise DimensionError(f"order permutation has length {len(perm)}, n={n}")
        if self.kind == "lex":
            if perm == tuple(range(n)):
                return lambda e: e
            return lambda e: tuple(e[i] for i in perm)
        rev = perm[::-1]
        return lambda e: (sum(e), tuple(-e[i] for i in rev))

    def to_json(self) -> dict:
        return {"kind": self.kind, "permutation": list(self.permutation or [])}


LEX = MonomialOrder("lex")
GREVLEX = MonomialOrder("grevlex")


@dataclass(frozen=True)
class IdealPresentation:
    """Generators of an ideal of ``Q[x1..xn]``; zero generators are dropped.

    An empty generator list presents the zero ideal.
    """

    n: int
    generators: tuple[Polynomial, ...]

    def __post_init__(self):
        gens = []
        for g in self.generators:
            if g.n != self.n:
                raise DimensionError(f"generator in {g.n} variables, ideal has n={self.n}")
            if not g.is_zero():
                gens.append(g)
        object.__setattr__(self, "generators", tuple(gens))

    @classmethod
    def from_strings(cls, n: int, generators: Iterable[str]) -> "IdealPresentation":
        return cls(n, tuple(parse_polynomial(s, n) for s in generators))

    @classmethod
    def from_json(cls, payload: dict) -> "IdealPresentation":
        return cls.from_strings(int(payload["n"]), payload["generators"])

    def to_json(self) -> dict:
        return {"n": self.n, "generators": [str(g) for g in self.generators]}

    def translate(self, point: Sequence) -> "IdealPresentation":
        """Move ``point`` to the origin: each ``g`` becomes ``g(X + point)``."""
        return IdealPresentation(self.n, tuple(g.translate(point) for g in self.generators))

    def __len__(self) -> int:
        return len(self.generators)


@dataclass(frozen=True)
class GroebnerBasis:
    """A reduced Gröbner basis: monic, inter-reduced, sorted by leading term."""

    n: int
    order: MonomialOrder
    elements: tuple[Polynomial, ...]
    leading: tuple[Exponent, ...] = field(compare=False)

    def is_unit(self) -> bool:
        return any(not any(e) for e in self.leading)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def to_json(self) -> dict:
        return {"order": self.order.to_json(), "elements": [str(g) for g in self.elements]}


# term-map helpers


def _lead(p: Terms, key) -> Exponent:
    return max(p, key=key)


def _divides(a: Exponent, b: Exponent) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: Exponent, b: Exponent) -> Exponent:
    return tuple(max(x, y) for x, y in zip(a, b))


def _sub_multiple(p: Terms, c: Fraction, shift: Exponent, g: Terms) -> None:
    """In place: ``p -= c * X^shift * g``."""
    for e, v in g.items():
        m = tuple(x + y for x, y in zip(e, shift))
        w = p.get(m, 0) - c * v
        if w:
            p[m] = w
        else:
            p.pop(m, None)


def _monic(p: Terms, key) -> Terms:
    lc = p[_lead(p, key)]
    if lc == 1:
        return p
    return {e: v / lc for e, v in p.items()}


def _reduce(p: Terms, basis: list[tuple[Exponent, Terms]], key) -> Terms:
    """Full normal form of ``p`` by monic reducers ``(lt, terms)``."""
    p = dict(p)
    rem: Terms = {}
    while p:
        lm = _lead(p, key)
        c = p[lm]
        for lt, g in basis:
            if _divides(lt, lm):
                _sub_multiple(p, c, tuple(x - y for x, y in zip(lm, lt)), g)
                break
        else:
            rem[lm] = c
            del p[lm]
    return rem


def _spoly(f: Terms, lf: Exponent, g: Terms, lg: Exponent) -> Terms:
    lcm = _lcm(lf, lg)
    out: Terms = {}
    _sub_multiple(out, Fraction(-1), tuple(x - y for x, y in zip(lcm, lf)), f)
    _sub_multiple(out, Fraction(1), tuple(x - y for x, y in zip(lcm, lg)), g)
    return out


def buchberger(
    ideal: IdealPresentation,
    order: MonomialOrder = GREVLEX,
    max_steps: int = DEFAULT_MAX_STEPS,
    max_degree: int = DEFAULT_MAX_DEGREE,
) -> GroebnerBasis:
    """Reduced Gröbner basis of ``ideal`` under ``order``.

    Pairs are processed by the normal strategy (smallest lcm degree, then
    smallest lcm in the order) with Buchberger's coprime and chain criteria.
    Raises :class:`GroebnerLimitError` if more than ``max_steps`` pairs are
    reduced or an element exceeds ``max_degree``.
    """
    if max_steps <= 0 or max_degree <= 0:
        raise ValueError("limits must be positive")
    n = ideal.n
    key = order.key(n)
    zero = (0,) * n
    polys: list[Terms] = []
    lts: list[Exponent] = []
    for g in ideal.generators:
        t = _monic(g.terms, key)
        polys.append(t)
        lts.append(_lead(t, key))
    if any(lt == zero for lt in lts):
        return _finish(n, order, [{zero: Fraction(1)}], key)

    pending: set[tuple[int, int]] = set()
    heap: list = []

    def push(i: int, j: int) -> None:
        lcm = _lcm(lts[i], lts[j])
        pending.add((i, j))
        heapq.heappush(heap, (sum(lcm), key(lcm), i, j))

    for j in range(len(polys)):
        for i in range(j):
            push(i, j)

    steps = 0
    while heap:
        _, _, i, j = heapq.heappop(heap)
        pending.discard((i, j))
        li, lj = lts[i], lts[j]
        if all(a == 0 or b == 0 for a, b in zip(li, lj)):
            continue
        lcm = _lcm(li, lj)
        if any(
            k != i
            and k != j
            and _divides(lts[k], lcm)
            and (min(i, k), max(i, k)) not in pending
            and (min(j, k), max(j, k)) not in pending
            for k in range(len(polys))
        ):
            continue
        steps += 1
        if steps > max_steps:
            raise GroebnerLimitError(
                f"Buchberger exceeded {max_steps} pair reductions",
                [Polynomial(n, p) for p in polys],
            )
        s = _spoly(polys[i], li, polys[j], lj)
        r = _reduce(s, list(zip(lts, polys)), key)
        if not r:
            continue
        r = _monic(r, key)
        lt = _lead(r, key)
        if lt == zero:
            return _finish(n, order, [{zero: Fraction(1)}], key)
        if sum(lt) > max_degree:
            raise GroebnerLimitError(
                f"basis element of degree {sum(lt)} exceeds cap {max_degree}",
                [Polynomial(n, p) for p in polys],
            )
        polys.append(r)
        lts.append(lt)
        new = len(polys) - 1
        for k in range(new):
            push(k, new)
    return _finish(n, order, polys, key)


def _finish(n: int, order: MonomialOrder, polys: list[Terms], key) -> GroebnerBasis:
    """Minimalize, inter-reduce, normalize and sort."""
    items = [(_lead(p, key), p) for p in polys if p]
    items.sort(key=lambda t: key(t[0]))
    minimal: list[tuple[Exponent, Terms]] = []
    for lt, p in items:
        if not any(_divides(m, lt) for m, _ in minimal):
            minimal.append((lt, p))
    reduced = []
    for idx, (lt, p) in enumerate(minimal):
        others = minimal[:idx] + minimal[idx + 1 :]
        r = _monic(_reduce(p, others, key), key)
        reduced.append((lt, r))
    reduced.sort(key=lambda t: key(t[0]), reverse=True)
    return GroebnerBasis(
        n,
        order,
        tuple(Polynomial(n, p) for _, p in reduced),
        tuple(lt for lt, _ in reduced),
    )


def basis_terms(G: GroebnerBasis) -> list[tuple[Exponent, Terms]]:
    return [(lt, g.terms) for lt, g in zip(G.leading, G.elements)]


def normal_form(f: Polynomial, G: GroebnerBasis) -> Polynomial:
    """Unique remainder of ``f`` modulo ``G``; zero iff ``f`` lies in the ideal."""
    if f.n != G.n:
        raise DimensionError(f"polynomial in {f.n} variables, basis in {G.n}")
    return Polynomial(G.n, _reduce(f.terms, basis_terms(G), G.order.key(G.n)))


def s_polynomial(f: Polynomial, g: Polynomial, order: MonomialOrder) -> Polynomial:
    key = order.key(f.n)
    ft, gt = _monic(f.terms, key), _monic(g.terms, key)
    return Polynomial(f.n, _spoly(ft, _lead(ft, key), gt, _lead(gt, key)))


def standard_monomials(G: GroebnerBasis) -> StaircaseSet | None:
    """Monomials outside the leading-term ideal, or ``None`` if infinitely many."""
    n = G.n
    if G.is_unit():
        return None
    for i in range(n):
        if not any(lt[i] > 0 and sum(lt) == lt[i] for lt in G.leading):
            return None
    seen: set[Exponent] = set()
    stack = [(0,) * n]
    while stack:
        e = stack.pop()
        if e in seen or any(_divides(lt, e) for lt in G.leading):
            continue
        seen.add(e)
        for i in range(n):
            stack.append(e[:i] + (e[i] + 1,) + e[i + 1 :])
    return StaircaseSet(n, frozenset(seen))


def colength(G: GroebnerBasis) -> int | float:
    """``dim_Q(A / <G>)``: 0 for the unit ideal, :data:`INFINITE` if not zero-dimensional."""
    if G.is_unit():
        return 0
    std = standard_monomials(G)
    return INFINITE if std is None else len(std)


@dataclass(frozen=True)
class LengthReport:
    """Local length with its ``(N, colength(I + m_a^N))`` stabilization trace."""

    value: int | float
    trace: tuple[tuple[int, int], ...] = ()
    point: tuple[Fraction, ...] = ()
    confirm: int = DEFAULT_CONFIRM
    max_order: int = DEFAULT_MAX_ORDER
    note: str = ""

    @property
    def stabilized_at(self) -> int | None:
        """Smallest N from which the trace is constant."""
        if not self.trace:
            return None
        n_first = self.trace[-1][0]
        for N, c in reversed(self.trace):
            if c != self.value:
                break
            n_first = N
        return n_first

    def to_json(self) -> dict:
        return {
            "value": "infinite" if self.value == INFINITE else self.value,
            "point": [_frac_str(x) for x in self.point],
            "trace": [[N, c] for N, c in self.trace],
            "stabilized_at": self.stabilized_at,
            "policy": {
                "confirm": self.confirm,
                "max_order": self.max_order,
                "rule": "accept after confirm+1 consecutive equal colengths",
            },
            "note": self.note,
        }


def _frac_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def local_length_at_point(
    ideal: IdealPresentation,
    point: Sequence,
    confirm: int = DEFAULT_CONFIRM,
    max_order: int = DEFAULT_MAX_ORDER,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> LengthReport:
    """Length of ``(A/I)`` localized at the maximal ideal ``m_a`` of ``point``.

    Computes ``colength(I + m_a^N)`` for ``N = 1, 2, ...`` and accepts the
    value once ``confirm + 1`` consecutive colengths agree.  A generator
    that does not vanish at ``point`` gives length 0.  Raises
    :class:`NonStabilizationError` if ``N`` passes ``max_order``.
    """
    if confirm < 0:
        raise ValueError("confirm must be non-negative")
    a = tuple(Fraction(x) for x in point)
    if len(a) != ideal.n:
        raise DimensionError(f"point of length {len(a)} for n={ideal.n}")
    if any(g.evaluate(a) for g in ideal.generators):
        return LengthReport(0, (), a, confirm, max_order, "point not in zero set")
    local = ideal.translate(a)
    trace: list[tuple[int, int]] = []
    for N in range(1, max_order + 1):
        shifted = IdealPresentation(
            ideal.n, local.generators + tuple(power_of_maximal_ideal(ideal.n, N))
        )
        value = colength(buchberger(shifted, GREVLEX, max_steps=max_steps))
        trace.append((N, value))
        tail = [c for _, c in trace[-(confirm + 1) :]]
        if len(tail) == confirm + 1 and len(set(tail)) == 1:
            return LengthReport(value, tuple(trace), a, confirm, max_order)
    raise NonStabilizationError(
        f"colength of I + m^N did not stabilize for N <= {max_order}", trace
    )


def elimination_basis(ideal: IdealPresentation, keep: int, max_steps: int = DEFAULT_MAX_STEPS) -> GroebnerBasis:
    """Lex basis of ``I ∩ Q[x_keep, ..., x_n]`` (``keep`` is 1-based)."""
    n = ideal.n
    if not 1 <= keep <= n + 1:
        raise ValueError(f"keep must lie in 1..{n + 1}")
    G = buchberger(ideal, LEX, max_steps=max_steps)
    drop = range(keep - 1)
    kept = [
        (lt, g)
        for lt, g in zip(G.leading, G.elements)
        if all(e[i] == 0 for e in g.support() for i in drop)
    ]
    return GroebnerBasis(n, LEX, tuple(g for _, g in kept), tuple(lt for lt, _ in kept))


def elimination_ideal(ideal: IdealPresentation, keep: int, max_steps: int = DEFAULT_MAX_STEPS) -> IdealPresentation:
    """Generators of ``I ∩ Q[x_keep, ..., x_n]``; empty for the zero ideal."""
    return IdealPresentation(ideal.n, elimination_basis(ideal, keep, max_steps).elements)


def krull_dimension(G: GroebnerBasis, variables: Sequence[int] | None = None) -> int:
    """Krull dimension of ``Q[variables] / <G>``.

    The maximum size of a set ``S`` of variables such that no leading
    exponent is supported inside ``S``.  ``variables`` are 0-based indices
    and default to all of them; ``G`` must then lie in that subring.
    """
    if G.is_unit():
        raise EmptyVarietyError("unit ideal: empty variety")
    pool = tuple(range(G.n)) if variables is None else tuple(variables)
    supports = [frozenset(i for i, e in enumerate(lt) if e) for lt in G.leading]
    for size in range(len(pool), -1, -1):
        for subset in itertools.combinations(pool, size):
            s = frozenset(subset)
            if not any(sup <= s for sup in supports):
                return size
    return 0  # pragma: no cover - the empty set always qualifies for proper ideals


def is_groebner_basis(G: GroebnerBasis) -> bool:
    """Check that every S-polynomial of ``G`` reduces to zero."""
    key = G.order.key(G.n)
    items = basis_terms(G)
    for (li, fi), (lj, fj) in itertools.combinations(items, 2):
        if _reduce(_spoly(fi, li, fj, lj), items, key):
            return False
    return True
