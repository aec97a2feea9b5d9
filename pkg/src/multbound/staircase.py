"""Staircases: finite downward-closed subsets of the non-negative lattice.

A staircase ``S`` in ``Z>=0^n`` contains the origin and, with every point,
every point below it componentwise.  Two real regions are attached to it:

* the closed region ``delta(S)``, the union of the boxes ``[0, g]`` for
  ``g`` in ``S`` (membership: ``phi <= g`` for some maximal ``g``), and
* the half-open region ``delta'(S)``, the union of unit cells
  ``[g, g + 1)`` (membership: ``floor(phi)`` lies in ``S``).

Every lower saturated region whose lattice points are exactly ``S`` sits
between the two, so its volume is at most ``#S``.

Real points are exact rationals throughout; nothing here touches floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .polynomial import DimensionError

Exponent = tuple[int, ...]


def _leq(a: Sequence, b: Sequence) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _as_exponent(values: Iterable[int]) -> Exponent:
    exp = tuple(int(v) for v in values)
    if any(v < 0 for v in exp):
        raise ValueError(f"exponent {exp} has a negative coordinate")
    return exp


def _maximal_elements(points: frozenset[Exponent]) -> tuple[Exponent, ...]:
    # a point is maximal iff none of its unit successors is present
    out = []
    for p in points:
        if not any(p[:i] + (p[i] + 1,) + p[i + 1 :] in points for i in range(len(p))):
            out.append(p)
    return tuple(sorted(out))


@dataclass(frozen=True)
class StaircaseSet:
    """A finite lower Z>=0-saturated set of exponents.

    Build with :func:`downward_closure` rather than directly; the
    constructor checks saturation and raises ``ValueError`` otherwise.
    ``axes`` records, for restricted staircases, which original 1-based
    coordinate each coordinate came from.
    """

    n: int
    points: frozenset[Exponent]
    axes: tuple[int, ...] | None = field(default=None, compare=False)
    maximal: tuple[Exponent, ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        points = frozenset(_as_exponent(p) for p in self.points)
        for p in points:
            if len(p) != self.n:
                raise DimensionError(f"point {p} does not have length {self.n}")
        if not is_lower_saturated_grid(points, self.n):
            raise ValueError("point set is not lower Z>=0-saturated")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "maximal", _maximal_elements(points))

    def __contains__(self, gamma) -> bool:
        return tuple(gamma) in self.points

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[Exponent]:
        return iter(self.sorted_points())

    def sorted_points(self) -> list[Exponent]:
        """Points ordered by total degree, then lexicographically."""
        return sorted(self.points, key=lambda p: (sum(p), p))

    @property
    def cardinality(self) -> int:
        return len(self.points)

    def bounding_box(self) -> Exponent:
        """Componentwise maximum over the staircase."""
        if self.n == 0:
            return ()
        return tuple(max(p[i] for p in self.points) for i in range(self.n))

    def to_json(self) -> dict:
        return {"n": self.n, "points": [list(p) for p in self.sorted_points()]}


@dataclass(frozen=True)
class AxisSubset:
    """A subset of the coordinate axes ``{1, ..., n}`` (1-based)."""

    n: int
    indices: frozenset[int]

    def __post_init__(self):
        idx = frozenset(int(i) for i in self.indices)
        if any(not 1 <= i <= self.n for i in idx):
            raise ValueError(f"axis indices {sorted(idx)} not within 1..{self.n}")
        object.__setattr__(self, "indices", idx)

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self.indices))


def downward_closure(generators: Iterable[Sequence[int]], n: int) -> StaircaseSet:
    """Smallest staircase in dimension ``n`` containing every generator."""
    gens = [_as_exponent(g) for g in generators]
    for g in gens:
        if len(g) != n:
            raise DimensionError(f"generator {g} does not have length {n}")
    points: set[Exponent] = {(0,) * n}
    stack = list(gens)
    while stack:
        p = stack.pop()
        if p in points:
            continue
        points.add(p)
        for i in range(n):
            if p[i]:
                stack.append(p[:i] + (p[i] - 1,) + p[i + 1 :])
    return StaircaseSet(n, frozenset(points))


def is_lower_saturated_grid(points: Iterable[Sequence[int]], n: int) -> bool:
    """True iff the set contains the origin and is closed under unit decrements."""
    pts = {tuple(p) for p in points}
    if (0,) * n not in pts:
        return False
    for p in pts:
        if len(p) != n:
            return False
        for i in range(n):
            if p[i] > 0 and p[:i] + (p[i] - 1,) + p[i + 1 :] not in pts:
                return False
    return True


def _check_dim(sigma: StaircaseSet, phi: Sequence) -> tuple[Fraction, ...]:
    phi = tuple(Fraction(x) for x in phi)
    if len(phi) != sigma.n:
        raise DimensionError(f"point of length {len(phi)} for n={sigma.n}")
    if any(x < 0 for x in phi):
        raise ValueError("real points must have non-negative coordinates")
    return phi


def delta_contains(sigma: StaircaseSet, phi: Sequence) -> bool:
    """Membership in the closed region: ``phi <= g`` for some maximal ``g``."""
    phi = _check_dim(sigma, phi)
    return any(_leq(phi, g) for g in sigma.maximal)


def delta_prime_contains(sigma: StaircaseSet, phi: Sequence) -> bool:
    """Membership in the half-open region: ``floor(phi)`` lies in the staircase."""
    phi = _check_dim(sigma, phi)
    return tuple(math.floor(x) for x in phi) in sigma.points


def volume_delta(sigma: StaircaseSet) -> int:
    """Lebesgue volume of the closed region, ``#{e : e + (1,...,1) in S}``."""
    return sum(1 for p in sigma.points if all(p))


def volume_delta_prime(sigma: StaircaseSet) -> int:
    return len(sigma.points)


def restrict(sigma: StaircaseSet, upsilon: AxisSubset) -> StaircaseSet:
    """Points supported on the axes in ``upsilon``, reindexed to ``#upsilon`` coordinates."""
    if upsilon.n != sigma.n:
        raise DimensionError(f"axis subset for n={upsilon.n}, staircase has n={sigma.n}")
    keep = sorted(i - 1 for i in upsilon.indices)
    drop = [i for i in range(sigma.n) if i not in set(keep)]
    pts = frozenset(
        tuple(p[i] for i in keep) for p in sigma.points if all(p[j] == 0 for j in drop)
    )
    base_axes = sigma.axes or tuple(range(1, sigma.n + 1))
    return StaircaseSet(len(keep), pts, axes=tuple(base_axes[i] for i in keep))


def weighted_norm(gamma: Sequence, d: Sequence) -> Fraction:
    """``sum(gamma_i / d_i)`` as an exact rational."""
    if len(gamma) != len(d):
        raise DimensionError(f"point of length {len(gamma)} vs weights of length {len(d)}")
    weights = _check_weights(d)
    return sum((Fraction(g) / w for g, w in zip(gamma, weights)), Fraction(0))


def _check_weights(d: Sequence) -> tuple[Fraction, ...]:
    weights = tuple(Fraction(w) for w in d)
    if any(w <= 0 for w in weights):
        raise ValueError("weights must be positive")
    return weights


def simplex_staircase(d: Sequence, eps, n: int | None = None) -> StaircaseSet:
    """Lattice points of ``{phi >= 0 : sum(phi_i / d_i) <= eps}``."""
    weights = _check_weights(d)
    if n is None:
        n = len(weights)
    if len(weights) != n:
        raise DimensionError(f"{len(weights)} weights for n={n}")
    eps = Fraction(eps)
    if eps < 0:
        raise ValueError("eps must be non-negative")
    points: list[Exponent] = []

    def walk(prefix: Exponent, budget: Fraction) -> None:
        i = len(prefix)
        if i == n:
            points.append(prefix)
            return
        e = 0
        while e / weights[i] <= budget:
            walk(prefix + (e,), budget - e / weights[i])
            e += 1

    walk((), eps)
    return StaircaseSet(n, frozenset(points))


def staircase_from_json(payload: dict) -> StaircaseSet:
    """Read ``{"n": int, "points": [...], "expect_cardinality"?: int}``.

    Points may be any generating set; the downward closure is taken.
    """
    n = int(payload["n"])
    sigma = downward_closure(payload.get("points", []), n)
    expected = payload.get("expect_cardinality")
    if expected is not None and int(expected) != len(sigma):
        raise ValueError(
            f"closure has {len(sigma)} points but expect_cardinality is {expected}"
        )
    return sigma
