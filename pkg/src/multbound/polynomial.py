"""Exact sparse multivariate polynomials over the rationals.

Polynomials live in ``Q[x1, ..., xn]`` and are stored as a map from exponent
tuples to nonzero :class:`fractions.Fraction` coefficients.  Besides ring
arithmetic the module provides iterated and normalized (divided-power)
partial derivatives, evaluation, translation of the origin, and a small
recursive-descent parser for the text format::

    x1^2 - 2*x1*x2 + 1/3*x2 + (x1 - 1)^2
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

Exponent = tuple[int, ...]
Scalar = Union[int, Fraction]

DEFAULT_DEGREE_LIMIT = 512
_degree_limit = DEFAULT_DEGREE_LIMIT


class DimensionError(ValueError):
    """Operands live in polynomial rings with different numbers of variables."""


class DegreeLimitError(ValueError):
    """A polynomial exceeded the configured total-degree guard."""


class ParseError(ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


def get_degree_limit() -> int:
    return _degree_limit


def set_degree_limit(limit: int) -> int:
    """Set the total-degree guard; returns the previous value."""
    global _degree_limit
    if limit < 0:
        raise ValueError("degree limit must be non-negative")
    previous, _degree_limit = _degree_limit, int(limit)
    return previous


def grlex_key(exp: Exponent) -> tuple:
    return (sum(exp), exp)


def _as_fraction(value: Scalar) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"unsupported coefficient type {type(value).__name__}")


class Polynomial:
    """Immutable sparse polynomial with rational coefficients.

    ``terms`` maps exponent tuples of length ``n`` to nonzero coefficients.
    Zero coefficients are dropped on construction, so the key set is always
    the support.
    """

    __slots__ = ("n", "_terms", "_hash")

    def __init__(self, n: int, terms: Mapping[Exponent, Scalar] | None = None):
        if n < 0:
            raise ValueError("number of variables must be non-negative")
        self.n = n
        clean: dict[Exponent, Fraction] = {}
        for exp, coef in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != n:
                raise DimensionError(f"exponent {exp} does not have length {n}")
            if any(e < 0 for e in exp):
                raise ValueError(f"negative exponent {exp}")
            c = _as_fraction(coef)
            if c:
                clean[exp] = clean.get(exp, Fraction(0)) + c
                if not clean[exp]:
                    del clean[exp]
        self._terms = clean
        self._hash = None
        self._check_degree()

    @classmethod
    def _raw(cls, n: int, terms: dict[Exponent, Fraction]) -> "Polynomial":
        # terms must already be zero-free with correct exponent lengths
        obj = cls.__new__(cls)
        obj.n = n
        obj._terms = terms
        obj._hash = None
        obj._check_degree()
        return obj

    def _check_degree(self) -> None:
        if self._terms and self.total_degree() > _degree_limit:
            raise DegreeLimitError(
                f"total degree {self.total_degree()} exceeds limit {_degree_limit}"
            )

    # construction helpers

    @classmethod
    def zero(cls, n: int) -> "Polynomial":
        return cls._raw(n, {})

    @classmethod
    def constant(cls, n: int, value: Scalar) -> "Polynomial":
        return cls(n, {(0,) * n: value})

    @classmethod
    def monomial(cls, exp: Sequence[int], coef: Scalar = 1) -> "Polynomial":
        exp = tuple(exp)
        return cls(len(exp), {exp: coef})

    @classmethod
    def variable(cls, n: int, i: int) -> "Polynomial":
        """The variable ``x{i+1}`` (0-based index ``i``)."""
        if not 0 <= i < n:
            raise IndexError(f"variable index {i} out of range for n={n}")
        exp = [0] * n
        exp[i] = 1
        return cls._raw(n, {tuple(exp): Fraction(1)})

    @classmethod
    def parse(cls, text: str, n: int) -> "Polynomial":
        return parse_polynomial(text, n)

    # accessors

    @property
    def terms(self) -> dict[Exponent, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[Exponent, Fraction]]:
        return iter(self._terms.items())

    def coefficient(self, exp: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(exp), Fraction(0))

    def support(self) -> frozenset[Exponent]:
        return frozenset(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def total_degree(self) -> int:
        """Maximum ``|gamma|`` over the support; ``-1`` for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def sorted_terms(self) -> list[tuple[Exponent, Fraction]]:
        """Terms in graded-lex descending order."""
        return sorted(self._terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    # ring structure

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.n != self.n:
                raise DimensionError(f"dimension mismatch: {self.n} vs {other.n}")
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.n, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for exp, c in other._terms.items():
            v = out.get(exp, 0) + c
            if v:
                out[exp] = v
            else:
                out.pop(exp, None)
        return Polynomial._raw(self.n, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(self.n, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def scale(self, c: Scalar) -> "Polynomial":
        c = _as_fraction(c)
        if not c:
            return Polynomial.zero(self.n)
        return Polynomial._raw(self.n, {e: c * v for e, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Polynomial._raw(self.n, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Polynomial.constant(self.n, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.n, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.n == other.n and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self._terms.items())))
        return self._hash

    # calculus

    def diff_power(self, gamma: Sequence[int]) -> "Polynomial":
        """Iterated partial derivative: ``d^|gamma| / dx1^e1 ... dxn^en``."""
        gamma = self._check_exponent(gamma)
        out: dict[Exponent, Fraction] = {}
        for exp, c in self._terms.items():
            if any(a < g for a, g in zip(exp, gamma)):
                continue
            factor = 1
            for a, g in zip(exp, gamma):
                factor *= math.perm(a, g)
            out[tuple(a - g for a, g in zip(exp, gamma))] = c * factor
        return Polynomial._raw(self.n, out)

    def normalized_diff(self, gamma: Sequence[int]) -> "Polynomial":
        """Divided-power derivative ``diff_power(gamma) / prod(e_i!)``.

        Acts on monomials by ``X^b -> prod(binom(b_i, e_i)) X^(b - gamma)``.
        """
        gamma = self._check_exponent(gamma)
        out: dict[Exponent, Fraction] = {}
        for exp, c in self._terms.items():
            if any(a < g for a, g in zip(exp, gamma)):
                continue
            factor = 1
            for a, g in zip(exp, gamma):
                factor *= math.comb(a, g)
            out[tuple(a - g for a, g in zip(exp, gamma))] = c * factor
        return Polynomial._raw(self.n, out)

    def evaluate(self, point: Sequence[Scalar]) -> Fraction:
        point = self._check_point(point)
        total = Fraction(0)
        for exp, c in self._terms.items():
            v = c
            for x, e in zip(point, exp):
                if e:
                    v *= x**e
            total += v
        return total

    def translate(self, point: Sequence[Scalar]) -> "Polynomial":
        """Return ``g`` with ``g(X) = f(X + point)``."""
        point = self._check_point(point)
        if not any(point):
            return self
        out: dict[Exponent, Fraction] = {}
        for exp, c in self._terms.items():
            # expand prod_i (X_i + a_i)^{b_i} axis by axis
            partial: dict[Exponent, Fraction] = {(): c}
            for b, a in zip(exp, point):
                nxt: dict[Exponent, Fraction] = {}
                for head, v in partial.items():
                    if a:
                        for j in range(b + 1):
                            nxt[head + (j,)] = v * math.comb(b, j) * a ** (b - j)
                    else:
                        nxt[head + (b,)] = v
                partial = nxt
            for e, v in partial.items():
                out[e] = out.get(e, 0) + v
        return Polynomial._raw(self.n, {e: c for e, c in out.items() if c})

    def _check_exponent(self, gamma: Sequence[int]) -> Exponent:
        gamma = tuple(int(g) for g in gamma)
        if len(gamma) != self.n:
            raise DimensionError(f"exponent {gamma} does not have length {self.n}")
        if any(g < 0 for g in gamma):
            raise ValueError(f"negative exponent {gamma}")
        return gamma

    def _check_point(self, point: Sequence[Scalar]) -> tuple[Fraction, ...]:
        point = tuple(_as_fraction(x) for x in point)
        if len(point) != self.n:
            raise DimensionError(f"point of length {len(point)} for n={self.n}")
        return point

    # text

    def __str__(self) -> str:
        return format_polynomial(self)

    def __repr__(self) -> str:
        return f"Polynomial({self.n}, {format_polynomial(self)!r})"


def support(f: Polynomial) -> frozenset[Exponent]:
    return f.support()


def diff_power(f: Polynomial, gamma: Sequence[int]) -> Polynomial:
    return f.diff_power(gamma)


def normalized_diff(f: Polynomial, gamma: Sequence[int]) -> Polynomial:
    return f.normalized_diff(gamma)


def evaluate(f: Polynomial, point: Sequence[Scalar]) -> Fraction:
    return f.evaluate(point)


def translate(f: Polynomial, point: Sequence[Scalar]) -> Polynomial:
    return f.translate(point)


def monomials_of_degree(n: int, d: int) -> Iterator[Exponent]:
    """All exponents of total degree ``d`` in ``n`` variables, lex descending."""
    if n == 0:
        if d == 0:
            yield ()
        return
    if n == 1:
        yield (d,)
        return
    for first in range(d, -1, -1):
        for rest in monomials_of_degree(n - 1, d - first):
            yield (first,) + rest


def power_of_maximal_ideal(n: int, d: int) -> list[Polynomial]:
    """Monomial generators of ``(x1, ..., xn)^d``."""
    return [Polynomial._raw(n, {e: Fraction(1)}) for e in monomials_of_degree(n, d)]


# formatting


def _format_fraction(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _format_monomial(exp: Exponent) -> str:
    parts = []
    for i, e in enumerate(exp, start=1):
        if e == 1:
            parts.append(f"x{i}")
        elif e > 1:
            parts.append(f"x{i}^{e}")
    return "*".join(parts)


def format_polynomial(f: Polynomial) -> str:
    """Canonical text: graded-lex descending, e.g. ``x1^2 - 2*x1*x2 + 1``."""
    if f.is_zero():
        return "0"
    pieces: list[str] = []
    for idx, (exp, c) in enumerate(f.sorted_terms()):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        mono = _format_monomial(exp)
        if not mono:
            body = _format_fraction(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{_format_fraction(mag)}*{mono}"
        if idx == 0:
            pieces.append(("-" if sign == "-" else "") + body)
        else:
            pieces.append(f" {sign} {body}")
    return "".join(pieces)


# parsing

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<var>x\d+)|(?P<op>[-+*/^()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, n: int):
        self.text = text
        self.n = n
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message: str, tok=None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(message, tok[2], self.text)

    def parse(self) -> Polynomial:
        if self.peek()[0] == "end":
            raise self.error("empty expression")
        result = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected token {self.peek()[1]!r}")
        return result

    def expr(self) -> Polynomial:
        result = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            result = result + rhs if op == "+" else result - rhs
        return result

    def term(self) -> Polynomial:
        result = self.unary()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value == "*":
                self.take()
                result = result * self.unary()
            elif kind == "var" or (kind == "op" and value == "("):
                result = result * self.unary()
            else:
                return result

    def unary(self) -> Polynomial:
        kind, value, _ = self.peek()
        if kind == "op" and value in ("+", "-"):
            self.take()
            inner = self.unary()
            return -inner if value == "-" else inner
        return self.power()

    def power(self) -> Polynomial:
        base = self.primary()
        kind, value, _ = self.peek()
        if kind == "op" and value == "^":
            self.take()
            tok = self.take()
            if tok[0] != "num":
                raise self.error("expected a non-negative integer exponent", tok)
            exponent = int(tok[1])
            if exponent > _degree_limit:
                raise DegreeLimitError(
                    f"exponent {exponent} exceeds degree limit {_degree_limit}"
                )
            nxt = self.peek()
            if nxt[0] == "op" and nxt[1] == "^":
                raise self.error("chained exponents are ambiguous; use parentheses")
            return base**exponent
        return base

    def primary(self) -> Polynomial:
        tok = self.take()
        kind, value, pos = tok
        if kind == "num":
            num = int(value)
            nxt = self.peek()
            if nxt[0] == "op" and nxt[1] == "/":
                self.take()
                den_tok = self.take()
                if den_tok[0] != "num":
                    raise self.error("expected integer denominator", den_tok)
                den = int(den_tok[1])
                if den == 0:
                    raise ParseError("zero denominator", den_tok[2], self.text)
                return Polynomial.constant(self.n, Fraction(num, den))
            return Polynomial.constant(self.n, num)
        if kind == "var":
            idx = int(value[1:])
            if not 1 <= idx <= self.n:
                raise ParseError(
                    f"variable {value} out of range x1..x{self.n}", pos, self.text
                )
            return Polynomial.variable(self.n, idx - 1)
        if kind == "op" and value == "(":
            inner = self.expr()
            close = self.take()
            if close[1] != ")":
                raise self.error("expected ')'", close)
            return inner
        if kind == "end":
            raise self.error("unexpected end of input", tok)
        raise self.error(f"unexpected token {value!r}", tok)


def parse_polynomial(text: str, n: int) -> Polynomial:
    """Parse ``text`` as an element of ``Q[x1, ..., xn]``.

    Raises :class:`ParseError` (with a character position) on malformed input
    or out-of-range variables.
    """
    return _Parser(text, n).parse()


def parse_point(values: Iterable[Scalar | str]) -> tuple[Fraction, ...]:
    return tuple(Fraction(v) if isinstance(v, str) else _as_fraction(v) for v in values)
