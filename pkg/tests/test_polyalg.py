"""
Tests for the exact scalar ring: arithmetic, derivatives, parsing and printing
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings as hsettings, strategies as st

from core.errors import DegreeOverflow, InputError, ParseError
from core.polyalg import (Poly, PolyVecField, format_rational, lie_derivative, parse_rational,
                          poly_arith, poly_diff, poly_parse, poly_print)

VARS = ('x', 'y')

coefficients = st.fractions(min_value=-5, max_value=5, max_denominator=4)
exponents = st.tuples(st.integers(0, 2), st.integers(0, 2))
polys = st.dictionaries(exponents, coefficients, max_size=5).map(lambda t: Poly(VARS, t))
points = st.tuples(st.integers(-4, 4), st.integers(-4, 4))

x = Poly.var('x', VARS)
y = Poly.var('y', VARS)


class TestArithmetic:
    def test_add_zero_is_identity(self):
        p = poly_parse('x^2 - 3*y + 1/2', VARS)
        assert poly_arith('add', Poly.zero(VARS), p) == p

    def test_difference_of_squares(self):
        assert poly_arith('mul', x + y, x - y) == poly_parse('x^2 - y^2', VARS)

    def test_scalar_mul(self):
        assert poly_arith('scalar_mul', x.scalar_mul(3), Fraction(2, 3)) == x.scalar_mul(2)

    def test_zero_has_no_terms(self):
        p = x - x
        assert p.is_zero()
        assert p.terms == {}

    def test_alignment_takes_ordered_union(self):
        p = Poly.var('x') + Poly.var('z')
        assert p.variables == ('x', 'z')
        assert (p * Poly.var('y', ('y',))).variables == ('x', 'z', 'y')

    def test_equality_across_variable_lists(self):
        assert Poly.var('x') == x
        assert Poly.const(2) == 2
        assert Poly.zero(VARS) == 0

    def test_degree_cap(self):
        with pytest.raises(DegreeOverflow):
            (x ** 9) * (y ** 9)

    def test_unknown_operation(self):
        with pytest.raises(InputError):
            poly_arith('div', x, y)

    @hsettings(deadline=None, max_examples=50)
    @given(polys, polys, polys)
    def test_ring_axioms(self, p, q, s):
        assert (p + q) + s == p + (q + s)
        assert (p * q) * s == p * (q * s)
        assert p * (q + s) == p * q + p * s
        assert p + q == q + p
        assert p * q == q * p
        assert p - p == 0

    @hsettings(deadline=None, max_examples=50)
    @given(polys, polys, points)
    def test_evaluation_is_a_ring_morphism(self, p, q, pt):
        at = dict(zip(VARS, pt))
        assert (p * q).evaluate(at) == p.evaluate(at) * q.evaluate(at)
        assert (p - q).evaluate(at) == p.evaluate(at) - q.evaluate(at)


class TestDerivatives:
    def test_partial_derivatives(self):
        assert poly_diff(x * x * y, 'x') == (x * y).scalar_mul(2)
        assert poly_diff(Poly.const(7, VARS), 'y') == 0
        assert poly_diff(x + y, 'x') == 1

    def test_unknown_variable(self):
        with pytest.raises(InputError):
            poly_diff(x, 'z')

    def test_lie_derivative_examples(self):
        dx = PolyVecField(VARS, (Poly.const(1, VARS), Poly.zero(VARS)))
        x_dx = PolyVecField(VARS, (x, Poly.zero(VARS)))
        assert lie_derivative(dx, x) == 1
        assert lie_derivative(x_dx, x * x) == (x * x).scalar_mul(2)
        assert lie_derivative(x_dx, Poly.const(5, VARS)) == 0

    def test_vector_field_shape(self):
        with pytest.raises(InputError):
            PolyVecField(VARS, (x,))

    @hsettings(deadline=None, max_examples=50)
    @given(polys, polys)
    def test_leibniz(self, p, q):
        for v in VARS:
            assert poly_diff(p * q, v) == poly_diff(p, v) * q + p * poly_diff(q, v)

    @hsettings(deadline=None, max_examples=30)
    @given(polys, polys, polys, polys)
    def test_lie_derivative_is_a_derivation(self, v0, v1, p, q):
        v = PolyVecField(VARS, (v0, v1))
        assert lie_derivative(v, p * q) == lie_derivative(v, p) * q + p * lie_derivative(v, q)

    @hsettings(deadline=None, max_examples=30)
    @given(polys, polys, polys, polys)
    def test_lie_derivative_is_linear_in_the_field(self, f, v0, v1, p):
        v = PolyVecField(VARS, (v0, v1))
        fv = PolyVecField(VARS, (f * v0, f * v1))
        assert lie_derivative(fv, p) == f * lie_derivative(v, p)

    def test_derivative_matches_finite_difference(self):
        # Exact forward difference of a quadratic in x: (p(x+h) - p(x))/h = p'(x) + h/2 p''
        p = poly_parse('3*x^2*y - x + 2', VARS)
        h = Fraction(1, 7)
        for px, py in ((1, 2), (Fraction(-1, 3), 5)):
            at = {'x': px, 'y': py}
            shifted = {'x': px + h, 'y': py}
            fd = (p.evaluate(shifted) - p.evaluate(at)) / h
            second = poly_diff(poly_diff(p, 'x'), 'x').evaluate(at)
            assert fd == poly_diff(p, 'x').evaluate(at) + h / 2 * second


class TestGrammar:
    def test_parse_two_terms(self):
        p = poly_parse('3/2*x^2*y - 1', VARS)
        assert len(p.terms) == 2
        assert p.coefficient((2, 1)) == Fraction(3, 2)
        assert p.coefficient((0, 0)) == -1

    def test_like_terms_combine(self):
        assert poly_print(poly_parse('x + x')) == '2*x'

    def test_canonical_order(self):
        assert poly_print(poly_parse('1 - y + x*y + 3/2*x^2', VARS)) == '3/2*x^2 + x*y - y + 1'

    def test_leading_minus(self):
        assert poly_print(poly_parse('-(x - 1)', VARS)) == '-x + 1'

    def test_zero_prints_as_zero(self):
        assert poly_print(Poly.zero(VARS)) == '0'

    @pytest.mark.parametrize('text', ['x^-1', 'x +', '2 x', '(x + 1', '1/0', 'x ** 2', ''])
    def test_syntax_errors(self, text):
        with pytest.raises(ParseError):
            poly_parse(text, VARS)

    def test_error_location(self):
        with pytest.raises(ParseError) as info:
            poly_parse('x +\n  $y', VARS)
        assert info.value.line == 2
        assert info.value.column == 3

    def test_unknown_variable_with_fixed_list(self):
        with pytest.raises(ParseError):
            poly_parse('z', VARS)

    def test_rationals(self):
        assert parse_rational('-3/6') == Fraction(-1, 2)
        assert format_rational(Fraction(4, 2)) == '2'
        for bad in ('1/-2', '1.5', '', '3/0'):
            with pytest.raises(ParseError):
                parse_rational(bad)

    @hsettings(deadline=None, max_examples=80)
    @given(polys)
    def test_print_parse_round_trip(self, p):
        assert poly_parse(poly_print(p), VARS) == p
