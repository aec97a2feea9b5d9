import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import fractions, iterated_derivative, leibniz_rhs, polynomials, random_point, random_polynomial
from multbound.polynomial import (
    DegreeLimitError,
    DimensionError,
    ParseError,
    Polynomial,
    format_polynomial,
    parse_polynomial,
    set_degree_limit,
)


def P(text, n=2):
    return parse_polynomial(text, n)


class TestParse:
    def test_basic_terms(self):
        f = P("x1^2 - 2*x1*x2 + 1")
        assert f.terms == {(2, 0): 1, (1, 1): -2, (0, 0): 1}

    def test_collection(self):
        assert P("1/2*x1 + 1/2*x1", 1).terms == {(1,): 1}

    def test_implicit_multiplication(self):
        assert P("3x1x2") == P("3*x1*x2")
        assert P("2(x1 + 1)") == P("2*x1 + 2")

    def test_parentheses_and_powers(self):
        assert P("(x1 - 1)^2", 1) == P("x1^2 - 2*x1 + 1", 1)
        assert P("-x1^2", 1).terms == {(2,): -1}

    def test_variable_out_of_range(self):
        with pytest.raises(ParseError, match="out of range"):
            P("x3")

    def test_zero_denominator(self):
        with pytest.raises(ParseError, match="zero denominator"):
            P("1/0*x1")

    @pytest.mark.parametrize("text", ["", "x1 +", "x1 ^ x2", "x1^2^3", "(x1", "x1 $ 2", "x1/2"])
    def test_syntax_errors_carry_position(self, text):
        with pytest.raises(ParseError) as info:
            P(text)
        assert info.value.position >= 0

    def test_whitespace_ignored(self):
        assert P("  x1 *  x2 +   1 ") == P("x1*x2+1")


class TestFormat:
    def test_canonical_order(self):
        assert str(P("1 + x1*x2*(-2) + x1^2")) == "x1^2 - 2*x1*x2 + 1"

    def test_rational_and_negative_leading(self):
        assert str(P("-1/3*x2 + 5/2")) == "-1/3*x2 + 5/2"

    def test_zero(self):
        assert str(Polynomial.zero(3)) == "0"

    @given(st.integers(1, 3).flatmap(lambda n: st.tuples(st.just(n), polynomials(n))))
    def test_parse_format_roundtrip(self, case):
        n, f = case
        assert parse_polynomial(format_polynomial(f), n) == f


class TestArithmetic:
    def test_difference_of_squares(self):
        assert P("x1 + x2") * P("x1 - x2") == P("x1^2 - x2^2")

    def test_additive_inverse(self):
        f = P("x1^3 - 1/2*x2 + 4")
        assert (f + (-1) * f).is_zero()

    def test_sum_of_cubes_by_evaluation(self):
        lhs = P("x1 + 1", 1) * P("x1^2 - x1 + 1", 1)
        assert lhs == P("x1^3 + 1", 1)
        rng = random.Random(3)
        for _ in range(3):
            x = Fraction(rng.randint(-9, 9), rng.randint(1, 7))
            assert lhs.evaluate([x]) == x**3 + 1

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            P("x1", 1) + P("x1", 2)

    def test_pow(self):
        assert P("x1 + x2") ** 3 == P("x1^3 + 3*x1^2*x2 + 3*x1*x2^2 + x2^3")
        assert P("x1") ** 0 == Polynomial.constant(2, 1)

    def test_degree_guard(self):
        previous = set_degree_limit(10)
        try:
            with pytest.raises(DegreeLimitError):
                P("x1^6") * P("x1^5")
            with pytest.raises(DegreeLimitError):
                P("x1^11")
        finally:
            set_degree_limit(previous)


class TestSupport:
    def test_support(self):
        assert P("x1^2*x2 - 3*x2").support() == {(2, 1), (0, 1)}
        assert Polynomial.zero(2).support() == frozenset()
        assert (P("x1 + x2") + P("-x1 - x2")).support() == frozenset()

    @given(st.integers(1, 3).flatmap(lambda n: st.tuples(polynomials(n), polynomials(n))))
    def test_support_subadditive(self, pair):
        f, g = pair
        assert (f + g).support() <= f.support() | g.support()


class TestDerivatives:
    def test_diff_power_examples(self):
        assert P("x1^3*x2").diff_power((2, 0)) == P("6*x1*x2")
        assert P("x1^3").diff_power((0, 1)).is_zero()

    def test_diff_power_of_monomial_is_factorial_product(self):
        for gamma in [(0, 0), (1, 0), (2, 3), (4, 1)]:
            mono = Polynomial.monomial(gamma)
            assert mono.diff_power(gamma) == Polynomial.constant(2, math.prod(map(math.factorial, gamma)))
            assert mono.normalized_diff(gamma) == Polynomial.constant(2, 1)

    def test_normalized_examples(self):
        assert P("x1^3*x2").normalized_diff((2, 0)) == P("3*x1*x2")
        assert P("x1^2*x2^2").normalized_diff((1, 1)) == P("4*x1*x2")

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            P("x1").normalized_diff((1,))

    @settings(max_examples=60)
    @given(
        st.integers(1, 3).flatmap(
            lambda n: st.tuples(polynomials(n, 5), st.lists(st.integers(0, 3), min_size=n, max_size=n))
        )
    )
    def test_consistency_with_iterated_partials(self, case):
        f, gamma = case
        expected = iterated_derivative(f, gamma)
        assert f.diff_power(gamma) == expected
        scale = math.prod(math.factorial(g) for g in gamma)
        assert f.normalized_diff(gamma).scale(scale) == expected

    @settings(max_examples=60)
    @given(
        st.integers(1, 3).flatmap(
            lambda n: st.tuples(
                polynomials(n, 4),
                st.lists(st.integers(0, 2), min_size=n, max_size=n),
                st.lists(fractions, min_size=n, max_size=n),
            )
        )
    )
    def test_derivative_commutes_with_translation(self, case):
        f, gamma, a = case
        assert f.normalized_diff(gamma).translate(a) == f.translate(a).normalized_diff(gamma)


class TestEvaluateTranslate:
    def test_evaluate_examples(self):
        assert P("x1^2 + x2").evaluate([2, 3]) == 7
        assert P("x1*x2^2").evaluate([0, 0]) == 0
        assert P("(x1 - 1)^2 + (x2 - 2)").evaluate([1, 2]) == 0

    def test_translate_examples(self):
        assert P("(x1 - 1)^2", 1).translate([1]) == P("x1^2", 1)
        f = P("x1^2*x2 - 7")
        assert f.translate([0, 0]) == f
        g = P("x1*x2").translate([1, 1])
        assert g == P("x1*x2 + x1 + x2 + 1")

    def test_translate_by_evaluation(self):
        rng = random.Random(11)
        for _ in range(20):
            n = rng.randint(1, 3)
            f = random_polynomial(rng, n, 5)
            a = random_point(rng, n)
            g = f.translate(a)
            assert g.total_degree() == f.total_degree()
            for _ in range(3):
                x = random_point(rng, n)
                assert g.evaluate(x) == f.evaluate([u + v for u, v in zip(x, a)])

    @given(
        st.integers(1, 3).flatmap(
            lambda n: st.tuples(polynomials(n), polynomials(n), st.lists(fractions, min_size=n, max_size=n))
        )
    )
    def test_evaluation_is_ring_homomorphism(self, case):
        f, g, a = case
        assert (f * g).evaluate(a) == f.evaluate(a) * g.evaluate(a)
        assert (f + g).evaluate(a) == f.evaluate(a) + g.evaluate(a)


def test_leibniz_small():
    f, g = P("x1^2*x2 + 3"), P("x1 - x2^3")
    for gamma in [(0, 0), (1, 0), (1, 1), (2, 2), (3, 1)]:
        assert (f * g).normalized_diff(gamma) == leibniz_rhs([f, g], gamma)
