"""Multiplicity lower bounds from vanishing normalized derivatives.

If every generator ``g`` of an ideal ``I`` satisfies ``d_gamma(g)(a) = 0``
for all ``gamma`` in a staircase ``S`` (``d_gamma`` the divided-power
derivative), then the length of ``A/I`` localized at the point ``a`` is at
least ``#S``.  This module grows the largest such staircase, packages it as
a :class:`BoundCertificate`, checks the same hypothesis modulo a prime
ideal, builds the monomial chain witness for the support form of the
bound, computes the per-variable transcendence profile of a prime, and
evaluates the closed-form bounds for weighted simplices.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .groebner import (
    DEFAULT_CONFIRM,
    DEFAULT_MAX_ORDER,
    DEFAULT_MAX_STEPS,
    LEX,
    GroebnerBasis,
    IdealPresentation,
    LengthReport,
    buchberger,
    elimination_basis,
    krull_dimension,
    local_length_at_point,
    normal_form,
)
from .polynomial import DimensionError, Polynomial
from .staircase import AxisSubset, StaircaseSet, is_lower_saturated_grid

Exponent = tuple[int, ...]

DEFAULT_CAP = 32


def _frac_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def derivative_vanishes(f: Polynomial, gamma: Sequence[int], point: Sequence) -> tuple[bool, Fraction]:
    """Evaluate ``d_gamma(f)`` at ``point``; returns ``(value == 0, value)``."""
    if len(point) != f.n:
        raise DimensionError(f"point of length {len(point)} for n={f.n}")
    value = f.normalized_diff(gamma).evaluate(point)
    return value == 0, value


@dataclass(frozen=True)
class VanishingTable:
    """Exact values ``d_gamma(g_i)(a)`` keyed by ``(generator index, gamma)``.

    Covers every exponent in the certificate staircase, its rejection
    frontier, and the exponents probed one degree past the cap.
    """

    values: dict[tuple[int, Exponent], Fraction] = field(default_factory=dict)

    def nonzero(self, gamma: Exponent) -> list[tuple[int, Fraction]]:
        return sorted((i, v) for (i, g), v in self.values.items() if g == gamma and v)

    def exponents(self) -> set[Exponent]:
        return {g for _, g in self.values}


@dataclass(frozen=True)
class BoundCertificate:
    """A vanishing staircase at ``point`` and the resulting bound ``#staircase``.

    ``staircase`` is ``None`` when some generator is nonzero at the point;
    the bound is then 0.  ``truncated`` is set when the staircase could have
    grown past ``cap``.
    """

    point: tuple[Fraction, ...]
    staircase: StaircaseSet | None
    table: VanishingTable
    frontier: tuple[Exponent, ...]
    truncated: bool
    cap: int
    n_generators: int
    note: str = ""

    @property
    def bound(self) -> int:
        return 0 if self.staircase is None else len(self.staircase)

    def witnesses(self) -> list[dict]:
        out = []
        for gamma in self.frontier:
            for i, v in self.table.nonzero(gamma):
                out.append({"generator": i, "gamma": list(gamma), "value": _frac_str(v)})
        return out

    def staircase_values_zero(self) -> bool:
        if self.staircase is None:
            return True
        return all(
            not self.table.values[(i, g)]
            for g in self.staircase.points
            for i in range(self.n_generators)
        )

    def to_json(self) -> dict:
        pts = [] if self.staircase is None else [list(p) for p in self.staircase.sorted_points()]
        return {
            "point": [_frac_str(x) for x in self.point],
            "sigma_points": pts,
            "bound": self.bound,
            "truncated": self.truncated,
            "cap": self.cap,
            "witnesses": self.witnesses(),
            "staircase_values_all_zero": self.staircase_values_zero(),
            "note": self.note,
        }


def _taylor_coefficients(ideal: IdealPresentation, point: Sequence[Fraction]) -> list[dict]:
    # coefficient of X^gamma in g(X + a) is d_gamma(g)(a)
    return [g.translate(point).terms for g in ideal.generators]


def vanishing_staircase(
    ideal: IdealPresentation,
    point: Sequence,
    cap: int = DEFAULT_CAP,
    threads: int = 1,
) -> BoundCertificate:
    """Largest staircase (within total degree ``cap``) on which every
    generator's normalized derivatives vanish at ``point``.

    Grows by total degree: ``gamma`` is tested once all its unit
    predecessors are accepted, and accepted iff every generator vanishes.
    Checking generators suffices for the whole ideal because the staircase
    is downward closed.  Exponents of degree ``cap + 1`` are probed only to
    set the ``truncated`` flag.
    """
    if cap < 0:
        raise ValueError("cap must be non-negative")
    n = ideal.n
    a = tuple(Fraction(x) for x in point)
    if len(a) != n:
        raise DimensionError(f"point of length {len(a)} for n={n}")
    coeffs = _taylor_coefficients(ideal, a)
    zero_frac = Fraction(0)
    values: dict[tuple[int, Exponent], Fraction] = {}

    def probe(gamma: Exponent) -> list[Fraction]:
        return [c.get(gamma, zero_frac) for c in coeffs]

    def probe_all(cands: list[Exponent]) -> list[list[Fraction]]:
        if threads > 1 and len(cands) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                return list(pool.map(probe, cands))
        return [probe(g) for g in cands]

    origin = (0,) * n
    origin_vals = probe(origin)
    for i, v in enumerate(origin_vals):
        values[(i, origin)] = v
    if any(origin_vals):
        return BoundCertificate(
            a, None, VanishingTable(values), (origin,), False, cap, len(coeffs),
            "point not on variety: some generator is nonzero at the point",
        )

    accepted: set[Exponent] = {origin}
    layer = [origin]
    frontier: list[Exponent] = []
    truncated = False
    for degree in range(1, cap + 2):
        cands = sorted(
            {
                g[:i] + (g[i] + 1,) + g[i + 1 :]
                for g in layer
                for i in range(n)
            }
        )
        cands = [
            c for c in cands
            if all(c[i] == 0 or c[:i] + (c[i] - 1,) + c[i + 1 :] in accepted for i in range(n))
        ]
        if not cands:
            break
        results = probe_all(cands)
        layer = []
        for gamma, vals in zip(cands, results):
            for i, v in enumerate(vals):
                values[(i, gamma)] = v
            vanishes = not any(vals)
            if degree > cap:
                truncated = truncated or vanishes
            elif vanishes:
                layer.append(gamma)
            else:
                frontier.append(gamma)
        if degree > cap:
            break
        accepted.update(layer)
        if not layer:
            break
    sigma = StaircaseSet(n, frozenset(accepted))
    return BoundCertificate(
        a, sigma, VanishingTable(values), tuple(frontier), truncated, cap, len(coeffs)
    )


@dataclass(frozen=True)
class HypothesisCheck:
    holds: bool
    generator: int | None = None
    gamma: Exponent | None = None
    residue: Polynomial | None = None

    def __bool__(self) -> bool:
        return self.holds

    def to_json(self) -> dict:
        out: dict = {"holds": self.holds}
        if not self.holds:
            out.update(generator=self.generator, gamma=list(self.gamma), residue=str(self.residue))
        return out


def check_hypothesis_mod_prime(
    ideal: IdealPresentation, prime_basis: GroebnerBasis, sigma: StaircaseSet
) -> HypothesisCheck:
    """Whether ``d_gamma(g)`` lies in the prime for every generator ``g`` and
    ``gamma`` in ``sigma``; reports the first offending pair otherwise."""
    if not is_lower_saturated_grid(sigma.points, sigma.n):
        raise ValueError("staircase is not lower saturated")
    if prime_basis.is_unit():
        raise ValueError("prime ideal must be proper")
    if sigma.n != ideal.n or prime_basis.n != ideal.n:
        raise DimensionError("ideal, prime and staircase dimensions differ")
    for gamma in sigma.sorted_points():
        for i, g in enumerate(ideal.generators):
            r = normal_form(g.normalized_diff(gamma), prime_basis)
            if not r.is_zero():
                return HypothesisCheck(False, i, gamma, r)
    return HypothesisCheck(True)


@dataclass(frozen=True)
class ChainStep:
    gamma: Exponent
    remainder: Polynomial
    strict: bool


@dataclass(frozen=True)
class ChainReport:
    """Steps ``I_{i-1} ⊊ I_{i-1} + X^{gamma_i}`` with their normal-form witnesses."""

    steps: tuple[ChainStep, ...]

    @property
    def success(self) -> bool:
        return all(s.strict for s in self.steps)

    @property
    def certified_length(self) -> int:
        """Number of strict inclusions before the first failure."""
        count = 0
        for s in self.steps:
            if not s.strict:
                break
            count += 1
        return count

    @property
    def first_failure(self) -> Exponent | None:
        return next((s.gamma for s in self.steps if not s.strict), None)

    def to_json(self) -> dict:
        return {
            "success": self.success,
            "certified_length": self.certified_length,
            "steps": [
                {"gamma": list(s.gamma), "normal_form": str(s.remainder), "strict": s.strict}
                for s in self.steps
            ],
        }


def lemma_chain_witness(
    sigma: StaircaseSet, ideal: IdealPresentation, max_steps: int = DEFAULT_MAX_STEPS
) -> ChainReport:
    """Adjoin the monomials of ``sigma`` to ``ideal`` one at a time, in
    non-increasing total degree, and check each inclusion is strict.

    Strictness of step ``i`` means ``X^{gamma_i}`` has a nonzero normal form
    modulo the ideal built so far.  All steps strict certifies
    ``dim(A/I) >= #sigma``.
    """
    if sigma.n != ideal.n:
        raise DimensionError("staircase and ideal dimensions differ")
    order = sorted(sigma.points, key=lambda g: (-sum(g), g))
    gens = list(ideal.generators)
    steps = []
    for gamma in order:
        G = buchberger(IdealPresentation(ideal.n, tuple(gens)), max_steps=max_steps)
        mono = Polynomial.monomial(gamma)
        r = normal_form(mono, G)
        steps.append(ChainStep(gamma, r, not r.is_zero()))
        gens.append(mono)
    return ChainReport(tuple(steps))


@dataclass(frozen=True)
class PrimeProfile:
    """Transcendence-degree drops along ``Q(x_i, ..., x_n)``, ``i = 1..n``.

    ``dims[i-1]`` is the transcendence degree of ``Q(x_i, ..., x_n)`` (with
    ``dims[n] = 0``), ``sigma[i-1] = dims[i-1] - dims[i]`` and ``upsilon``
    collects the axes where ``sigma`` is 0.  Primality is taken on trust.
    """

    sigma: tuple[int, ...]
    upsilon: AxisSubset
    dims: tuple[int, ...]

    @property
    def s(self) -> int:
        return len(self.upsilon)

    @property
    def dimension(self) -> int:
        return sum(self.sigma)

    def to_json(self) -> dict:
        return {
            "sigma": list(self.sigma),
            "upsilon": sorted(self.upsilon.indices),
            "s": self.s,
            "dims": list(self.dims),
            "krull_dimension": self.dimension,
            "primality": "trusted input, not verified",
        }


def upsilon_set(prime: IdealPresentation, max_steps: int = DEFAULT_MAX_STEPS) -> PrimeProfile:
    n = prime.n
    full = buchberger(prime, LEX, max_steps=max_steps)
    if full.is_unit():
        raise ValueError("prime ideal must be proper")
    dims = []
    for i in range(1, n + 1):
        G = elimination_basis(prime, i, max_steps=max_steps)
        dims.append(krull_dimension(G, variables=range(i - 1, n)))
    dims.append(0)
    sigma = tuple(dims[i] - dims[i + 1] for i in range(n))
    if any(s not in (0, 1) for s in sigma):
        raise ArithmeticError(f"transcendence profile {sigma} is not 0/1; is the ideal prime?")
    total = krull_dimension(full)
    if sum(sigma) != total:
        raise ArithmeticError(f"profile sums to {sum(sigma)}, Krull dimension is {total}")
    upsilon = AxisSubset(n, frozenset(i + 1 for i, s in enumerate(sigma) if s == 0))
    return PrimeProfile(sigma, upsilon, tuple(dims))


def simplex_bound(d: Sequence, eps, sigma: Sequence[int]) -> Fraction:
    """``(eps^s / s!) * prod(d_i^(1 - sigma_i))`` with ``s = #{i : sigma_i = 0}``."""
    weights = [Fraction(x) for x in d]
    if len(weights) != len(sigma):
        raise DimensionError(f"{len(weights)} weights for a profile of length {len(sigma)}")
    if any(w <= 0 for w in weights):
        raise ValueError("weights must be positive")
    eps = Fraction(eps)
    if eps < 0:
        raise ValueError("eps must be non-negative")
    s = sum(1 for x in sigma if x == 0)
    value = eps**s / math.factorial(s)
    for w, x in zip(weights, sigma):
        value *= w ** (1 - x)
    return value


def grouped_simplex_bound(groups: Sequence[tuple], eps, s: int) -> Fraction:
    """``(eps^s / s!) * prod(D_i^(n_i - delta_i))`` over blocks of equal weight.

    Each group is ``(D_i, n_i, delta_i)``: weight, block size and the
    transcendence degree gained across the block.
    """
    eps = Fraction(eps)
    if eps < 0:
        raise ValueError("eps must be non-negative")
    if s < 0:
        raise ValueError("s must be non-negative")
    value = eps**s / math.factorial(s)
    delta_total = 0
    size_total = 0
    for group in groups:
        if len(group) != 3:
            raise ValueError(f"group {group!r} must be (weight, size, delta)")
        w, size, delta = Fraction(group[0]), int(group[1]), int(group[2])
        if w <= 0 or size < 1 or not 0 <= delta <= size:
            raise ValueError(f"invalid group {group!r}")
        value *= w ** (size - delta)
        delta_total += delta
        size_total += size
    if size_total - delta_total != s:
        raise ValueError(f"groups imply s={size_total - delta_total}, got s={s}")
    return value


def group_profile(d: Sequence, sigma: Sequence[int]) -> list[tuple[Fraction, int, int]]:
    """Split ``d`` into maximal runs of equal weight with their sigma sums."""
    groups: list[list] = []
    for w, x in zip((Fraction(v) for v in d), sigma):
        if groups and groups[-1][0] == w:
            groups[-1][1] += 1
            groups[-1][2] += x
        else:
            groups.append([w, 1, x])
    return [tuple(g) for g in groups]


@dataclass(frozen=True)
class Verification:
    certificate: BoundCertificate
    length: LengthReport

    @property
    def holds(self) -> bool:
        return self.certificate.bound <= self.length.value

    @property
    def tight(self) -> bool:
        return self.certificate.bound == self.length.value

    def to_json(self) -> dict:
        return {
            "certificate": self.certificate.to_json(),
            "length": self.length.to_json(),
            "verdict": "OK" if self.holds else "VIOLATION",
            "tight": self.tight,
            "assumptions": "the point's maximal ideal is taken to be a minimal prime of I",
        }


def verify_bound_at_point(
    ideal: IdealPresentation,
    point: Sequence,
    cap: int = DEFAULT_CAP,
    confirm: int = DEFAULT_CONFIRM,
    max_order: int = DEFAULT_MAX_ORDER,
    threads: int = 1,
) -> Verification:
    """Certificate plus Gröbner oracle length at ``point``; the inequality is
    checked by :attr:`Verification.holds`."""
    cert = vanishing_staircase(ideal, point, cap, threads=threads)
    length = local_length_at_point(ideal, point, confirm=confirm, max_order=max_order)
    return Verification(cert, length)
