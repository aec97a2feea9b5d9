"""Grid sandwich estimates for volumes of lower saturated regions.

For a region ``D`` in the non-negative orthant that is closed downward,
the grid points ``G = D ∩ {j/m : 0 <= j <= mN}^n`` give two unions of boxes:
the inner union of ``[0, p]`` over ``p`` in ``G`` and the outer union of
cells ``[p, p + 1/m]``.  They bracket ``vol(D ∩ [0, N]^n)`` and differ in
volume by at most ``n (1 + N)^(n - 1) / m``.

Grid coordinates are kept as integers ``j``; predicates see exact
rationals ``j/m``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Sequence

from .staircase import StaircaseSet, delta_contains, delta_prime_contains, weighted_norm

Index = tuple[int, ...]

DEFAULT_SPOT_CHECKS = 256
EXHAUSTIVE_LIMIT = 4096


class SaturationError(ValueError):
    """The membership predicate is not lower saturated."""


class ToleranceError(ValueError):
    """Requested tolerance needs a finer grid than allowed."""

    def __init__(self, message: str, required_m: int):
        super().__init__(message)
        self.required_m = required_m


@dataclass(frozen=True)
class RegionPredicate:
    """A region of ``R>=0^n`` given by a pure membership test on rational points."""

    n: int
    contains: Callable[[tuple[Fraction, ...]], bool]
    lower_saturated: bool = True
    description: str = ""

    def __call__(self, phi: Sequence[Fraction]) -> bool:
        return bool(self.contains(tuple(phi)))


@dataclass(frozen=True)
class GridSpec:
    N: int
    m: int

    def __post_init__(self):
        if self.N < 1 or self.m < 1:
            raise ValueError("N and m must be positive integers")

    @property
    def side(self) -> int:
        """Largest grid index ``mN`` along each axis."""
        return self.m * self.N


class GridPoints:
    """Downward-closed set of grid indices stored as columns.

    ``heights`` maps each index prefix (first ``n - 1`` coordinates) to the
    largest last coordinate present, so the column is ``0..height``.
    Prefixes with an empty column are absent.
    """

    def __init__(self, n: int, spec: GridSpec, heights: dict[Index, int]):
        self.n = n
        self.spec = spec
        self.heights = heights

    def __contains__(self, idx) -> bool:
        idx = tuple(idx)
        if self.n == 0:
            return idx == ()
        h = self.heights.get(idx[:-1])
        return h is not None and 0 <= idx[-1] <= h

    def __len__(self) -> int:
        if self.n == 0:
            return 1
        return sum(h + 1 for h in self.heights.values())

    def __iter__(self) -> Iterator[Index]:
        if self.n == 0:
            yield ()
            return
        for prefix in sorted(self.heights):
            for j in range(self.heights[prefix] + 1):
                yield prefix + (j,)

    def interior_count(self) -> int:
        """Number of points with every coordinate at least 1."""
        if self.n == 0:
            return 1
        return sum(h for p, h in self.heights.items() if all(p) and h >= 1)

    def is_downward_closed(self) -> bool:
        if self.n == 0:
            return True
        if (0,) * (self.n - 1) not in self.heights:
            return False
        for prefix, h in self.heights.items():
            for i in range(self.n - 1):
                if prefix[i]:
                    below = prefix[:i] + (prefix[i] - 1,) + prefix[i + 1 :]
                    if self.heights.get(below, -1) < h:
                        return False
        return True


def _point(idx: Index, m: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(j, m) for j in idx)


def _spot_check(pred: RegionPredicate, spec: GridSpec, checks: int, seed: int) -> None:
    rng = random.Random(seed)
    side = spec.side
    n = pred.n
    hits = 0
    for _ in range(checks * 4):
        if hits >= checks:
            break
        upper = tuple(rng.randint(0, side) for _ in range(n))
        if not pred(_point(upper, spec.m)):
            continue
        hits += 1
        lower = tuple(rng.randint(0, u) for u in upper)
        if not pred(_point(lower, spec.m)):
            raise SaturationError(
                f"predicate contains {_point(upper, spec.m)} but not {_point(lower, spec.m)}"
            )


def _exhaustive(pred: RegionPredicate, spec: GridSpec) -> GridPoints:
    n, side = pred.n, spec.side
    inside = {
        idx
        for idx in itertools.product(range(side + 1), repeat=n)
        if pred(_point(idx, spec.m))
    }
    for idx in inside:
        for i in range(n):
            if idx[i] and idx[:i] + (idx[i] - 1,) + idx[i + 1 :] not in inside:
                raise SaturationError(
                    f"grid point {_point(idx, spec.m)} is in the region but a lower neighbour is not"
                )
    if inside and (0,) * n not in inside:
        raise SaturationError("region misses the origin")
    heights: dict[Index, int] = {}
    for idx in inside:
        heights[idx[:-1]] = max(heights.get(idx[:-1], -1), idx[-1])
    return GridPoints(n, spec, heights)


def _columns(pred: RegionPredicate, spec: GridSpec) -> GridPoints:
    # last-axis height is non-increasing in every prefix coordinate, so each
    # column search starts from the height of its lower neighbour
    n, side, m = pred.n, spec.side, spec.m
    heights: dict[Index, int] = {}
    for prefix in itertools.product(range(side + 1), repeat=n - 1):
        hi = side
        for i in range(n - 1):
            if prefix[i]:
                below = prefix[:i] + (prefix[i] - 1,) + prefix[i + 1 :]
                hi = min(hi, heights.get(below, -1))
        h = hi
        while h >= 0 and not pred(_point(prefix + (h,), m)):
            h -= 1
        if h >= 0:
            heights[prefix] = h
    return GridPoints(n, spec, heights)


def grid_points(
    pred: RegionPredicate,
    spec: GridSpec,
    spot_checks: int = DEFAULT_SPOT_CHECKS,
    seed: int = 0,
) -> GridPoints:
    """Grid indices ``j`` (point ``j/m``, ``0 <= j_i <= mN``) inside the region.

    Small grids are scanned exhaustively and checked for downward closure;
    larger ones are scanned column by column after a randomized spot check
    of lower saturation.  Raises :class:`SaturationError` on violations.
    """
    if not pred.lower_saturated:
        raise SaturationError("region is declared not lower saturated")
    if pred.n == 0:
        return GridPoints(0, spec, {})
    if (spec.side + 1) ** pred.n <= EXHAUSTIVE_LIMIT:
        pts = _exhaustive(pred, spec)
    else:
        _spot_check(pred, spec, spot_checks, seed)
        pts = _columns(pred, spec)
    if not pts.is_downward_closed() and len(pts):
        raise SaturationError("grid point set is not downward closed")
    return pts


def inner_outer(points: GridPoints, spec: GridSpec) -> tuple[Fraction, Fraction]:
    """Volumes of the inner box union and the outer cell union.

    Inner counts cells ``[u - 1, u] / m`` with ``u`` in the set and all
    ``u_i >= 1``; outer counts one cell per point.
    """
    if not len(points):
        return Fraction(0), Fraction(0)
    scale = Fraction(1, spec.m**points.n)
    return points.interior_count() * scale, len(points) * scale


def error_bound(n: int, spec: GridSpec) -> Fraction:
    """``n (1 + N)^(n - 1) / m``."""
    if n == 0:
        return Fraction(0)
    return Fraction(n * (1 + spec.N) ** (n - 1), spec.m)


@dataclass(frozen=True)
class GridEstimate:
    spec: GridSpec
    n: int
    inner: Fraction
    outer: Fraction
    error_bound: Fraction
    grid_count: int

    @property
    def gap(self) -> Fraction:
        return self.outer - self.inner

    @property
    def midpoint(self) -> Fraction:
        return (self.inner + self.outer) / 2

    def to_json(self, digits: int | None = None) -> dict:
        out = {
            "n": self.n,
            "N": self.spec.N,
            "m": self.spec.m,
            "inner": _frac_str(self.inner),
            "outer": _frac_str(self.outer),
            "gap": _frac_str(self.gap),
            "error_bound": _frac_str(self.error_bound),
            "grid_count": self.grid_count,
        }
        if digits is not None:
            out["decimal"] = {
                k: decimal_string(getattr(self, k), digits)
                for k in ("inner", "outer", "gap", "error_bound")
            }
        return out


def _frac_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def decimal_string(x: Fraction, digits: int) -> str:
    """Round-half-even decimal rendering with ``digits`` fractional digits."""
    scaled = round(x * 10**digits)
    sign = "-" if scaled < 0 else ""
    scaled = abs(scaled)
    if digits == 0:
        return f"{sign}{scaled}"
    whole, frac = divmod(scaled, 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}"


def estimate_volume(
    pred: RegionPredicate,
    spec: GridSpec,
    spot_checks: int = DEFAULT_SPOT_CHECKS,
    seed: int = 0,
) -> GridEstimate:
    pts = grid_points(pred, spec, spot_checks, seed)
    inner, outer = inner_outer(pts, spec)
    bound = error_bound(pred.n, spec)
    assert inner <= outer and outer - inner <= bound, "grid sandwich violated"
    return GridEstimate(spec, pred.n, inner, outer, bound, len(pts))


def refine_to_tolerance(
    pred: RegionPredicate,
    N: int,
    tol,
    m_max: int = 1 << 12,
    spot_checks: int = DEFAULT_SPOT_CHECKS,
    seed: int = 0,
) -> GridEstimate:
    """Estimate on the coarsest grid ``m = 2^k`` whose error bound is at most ``tol``."""
    tol = Fraction(tol)
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    m = 1
    while error_bound(pred.n, GridSpec(N, m)) > tol:
        m *= 2
    if m > m_max:
        raise ToleranceError(f"tolerance {tol} needs m = {m} > m_max = {m_max}", m)
    return estimate_volume(pred, GridSpec(N, m), spot_checks, seed)


# region constructors


def simplex_region(d: Sequence, eps) -> RegionPredicate:
    """``{phi : sum(phi_i / d_i) <= eps}``."""
    weights = tuple(Fraction(w) for w in d)
    eps = Fraction(eps)
    return RegionPredicate(
        len(weights),
        lambda phi: weighted_norm(phi, weights) <= eps,
        description=f"simplex d={[str(w) for w in weights]} eps={eps}",
    )


def staircase_region(sigma: StaircaseSet, which: str = "delta") -> RegionPredicate:
    """Closed (``"delta"``) or half-open (``"delta_prime"``) region of a staircase."""
    if which == "delta":
        test = lambda phi: delta_contains(sigma, phi)  # noqa: E731
    elif which == "delta_prime":
        test = lambda phi: delta_prime_contains(sigma, phi)  # noqa: E731
    else:
        raise ValueError(f"unknown staircase region {which!r}")
    return RegionPredicate(sigma.n, test, description=f"staircase {which}")


def halfspace_region(rows: Sequence[Sequence]) -> RegionPredicate:
    """Intersection of ``sum(c_i x_i) <= b`` for rows ``(c_1, ..., c_n, b)``.

    Lower saturated exactly when every ``c_i >= 0`` and ``b >= 0``.
    """
    parsed = [tuple(Fraction(v) for v in row) for row in rows]
    if not parsed:
        raise ValueError("at least one half-space row is required")
    n = len(parsed[0]) - 1
    if n < 1 or any(len(r) != n + 1 for r in parsed):
        raise ValueError("half-space rows must all have n coefficients plus a bound")
    saturated = all(c >= 0 for r in parsed for c in r)
    return RegionPredicate(
        n,
        lambda phi: all(sum(c * x for c, x in zip(r[:-1], phi)) <= r[-1] for r in parsed),
        lower_saturated=saturated,
        description="halfspaces",
    )
