from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from coxlog.linalg import RowReducer, ratfunc_matrix_det, scalar_det, scalar_inverse, solve_linear
from coxlog.poly import MultiPoly, parse_poly, poly_gcd, poly_matrix_det
from coxlog.ratfunc import LinearForm, RatFunc, ord_along, ord_of_combination, parse_ratfunc, render_ratfunc
from coxlog.scalar import ExactScalar, parse_scalar, render_scalar
from oracle import is_zero, same, symbols, to_sympy

V = ("x", "y", "z")
fractions = st.fractions(min_value=-5, max_value=5, max_denominator=6)
scalars5 = st.builds(lambda a, b: ExactScalar(a, b, 5 if b else 0), fractions, fractions)


@st.composite
def polys(draw, variables=V, max_terms=5, max_deg=3, field=5):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        exps = tuple(draw(st.integers(0, max_deg)) for _ in variables)
        a, b = draw(fractions), draw(fractions) if field else 0
        terms[exps] = ExactScalar(a, b, field if b else 0)
    return MultiPoly(variables, terms)


# -- scalars ---------------------------------------------------------------------------
@given(scalars5, scalars5, scalars5)
def test_scalar_field_axioms(a, b, c):
    assert a * (b + c) == a * b + a * c
    assert (a + b) - b == a
    if not a.is_zero():
        assert a * a.inverse() == ExactScalar(1)
        assert (b / a) * a == b


def test_sqrt_squares_to_d():
    assert ExactScalar.sqrt(5) ** 2 == ExactScalar(5)
    assert ExactScalar.sqrt(5).conjugate() == -ExactScalar.sqrt(5)


@given(scalars5)
def test_scalar_text_round_trip(a):
    assert parse_scalar(render_scalar(a)) == a


@given(scalars5)
def test_scalar_sign_matches_float(a):
    if not a.is_zero():
        assert a.sign() == (1 if float(a) > 0 else -1)


def test_scalar_rejects_bad_discriminant():
    with pytest.raises(ValueError):
        ExactScalar(0, 1, 4)


# -- polynomials -----------------------------------------------------------------------
@settings(max_examples=60, deadline=None)
@given(polys(), polys())
def test_poly_ring_operations_match_sympy(p, q):
    P, Q = to_sympy(p, V), to_sympy(q, V)
    assert same(to_sympy(p * q, V), P * Q)
    assert same(to_sympy(p - q, V), P - Q)
    x = symbols(V)[0]
    assert same(to_sympy(p.diff("x"), V), sympy.diff(P, x))


@settings(max_examples=60, deadline=None)
@given(polys())
def test_poly_text_round_trip(p):
    assert parse_poly(str(p), V) == p


@settings(max_examples=40, deadline=None)
@given(polys(), polys())
def test_exact_division(p, q):
    if q.is_zero():
        return
    assert (p * q).try_divide(q) == p


def test_scaling_by_pure_surd_is_canonical():
    s = MultiPoly.constant(V, ExactScalar.sqrt(5))
    assert (s * s).try_divide(s) == s
    assert (s * s).scale(ExactScalar.sqrt(5).inverse()) == s


@settings(max_examples=40, deadline=None)
@given(polys(), st.lists(fractions, min_size=3, max_size=3))
def test_hyperplane_filter_is_sound(p, coeffs):
    # a polynomial divisible by l must never be reported as missing ker(l)
    if not any(coeffs) or p.is_zero():
        return
    lf = LinearForm(coeffs)
    assert not (p * lf.poly(V)).misses_hyperplane(lf.coefficients)


def test_hyperplane_filter_detects_nonvanishing():
    x, y = MultiPoly.var(V, "x"), MultiPoly.var(V, "y")
    assert (x * x + y).misses_hyperplane([1, 0, 0])
    assert not (x * y).misses_hyperplane([1, 0, 0])


@settings(max_examples=30, deadline=None)
@given(polys(max_terms=3, max_deg=2, field=0), polys(max_terms=3, max_deg=2, field=0),
       polys(max_terms=3, max_deg=2, field=0))
def test_gcd_matches_sympy(a, b, c):
    if a.is_zero() or b.is_zero() or c.is_zero():
        return
    g = poly_gcd(a * c, b * c)
    ref = sympy.gcd(to_sympy(a * c, V), to_sympy(b * c, V))
    assert is_zero(sympy.cancel(to_sympy(g, V) / ref).diff(symbols(V)[0]))
    assert (a * c).try_divide(g) is not None


def test_poly_matrix_det_matches_sympy():
    rows = [[parse_poly(t, V) for t in row] for row in
            [["x", "y^2", "z"], ["1", "x*y", "sqrt(5)*z"], ["x+y", "3", "z^2"]]]
    ref = sympy.Matrix([[to_sympy(e, V) for e in row] for row in rows]).det()
    assert same(to_sympy(poly_matrix_det(rows), V), ref)


def test_parse_errors():
    with pytest.raises(ValueError):
        parse_poly("x +* y", V)
    with pytest.raises(ValueError):
        parse_poly("w", V)


# -- rational functions ----------------------------------------------------------------
def test_factored_cancellation_and_normal_form():
    x, y = MultiPoly.var(V, "x"), MultiPoly.var(V, "y")
    lx = LinearForm([1, 0, 0])
    f = RatFunc.factored(x * y, {lx: 2})
    assert f.denominator_factors == ((lx, 1),)
    assert f == RatFunc(y, x)
    assert hash(f) == hash(RatFunc(y, x))


def test_ratfunc_text_round_trip():
    f = parse_ratfunc("(x^2 - y)/(x*(x + y)^2)", V)
    assert parse_ratfunc(render_ratfunc(f), V) == f


@settings(max_examples=40, deadline=None)
@given(polys(max_terms=3, max_deg=2), polys(max_terms=3, max_deg=2), st.integers(0, 3), st.integers(0, 3))
def test_ratfunc_arithmetic_matches_sympy(p, q, e1, e2):
    lx, lxy = LinearForm([1, 0, 0]), LinearForm([1, 1, 0])
    f = RatFunc.factored(p, {lx: e1, lxy: e2})
    g = RatFunc.factored(q, {lxy: e1, lx: e2})
    F, G = to_sympy(f), to_sympy(g)
    assert same(to_sympy(f + g), F + G)
    assert same(to_sympy(f * g), F * G)
    assert same(to_sympy(f.diff("x")), sympy.diff(F, symbols(V)[0]))
    assert RatFunc.combine([2, -3], [f, g]) == f.scale(2) - g.scale(3)


@settings(max_examples=40, deadline=None)
@given(polys(max_terms=3, max_deg=2), st.integers(-3, 3), st.integers(0, 2))
def test_ord_along(p, e, extra):
    lx = LinearForm([1, 0, 0])
    x = MultiPoly.var(V, "x")
    if p.is_zero() or p.try_divide(x) is not None:
        return
    f = RatFunc(p * x ** extra) * RatFunc.linear_product(V, {lx: -e})
    assert ord_along(f, lx) == e - extra
    assert ord_of_combination([1], [f], lx) == e - extra
    assert ord_of_combination([1], [f], lx, floor=0) == max(e - extra, 0)


def test_ord_of_combination_cancellation():
    x, y = MultiPoly.var(V, "x"), MultiPoly.var(V, "y")
    lx = LinearForm([1, 0, 0])
    f = RatFunc(y + x, x * x)
    g = RatFunc(y, x * x)
    assert ord_of_combination([1, -1], [f, g], lx) == 1  # (x)/x^2
    assert ord_of_combination([1, -1], [f, f], lx) is None


# -- linear algebra --------------------------------------------------------------------
def test_solve_linear_unique_family_none():
    assert solve_linear([[1, 2], [3, 4]], [5, 6]).solution == [ExactScalar(-4), ExactScalar(Fraction(9, 2))]
    fam = solve_linear([[1, 1], [2, 2]], [1, 2])
    assert fam.status == "family" and fam.kernel_dimension == 1
    assert solve_linear([[1, 1], [1, 1]], [1, 2]).status == "none"


def test_row_reducer_reports_rank_growth():
    red = RowReducer(2)
    assert red.add_row([1, 1], 0)
    assert not red.add_row([2, 2], 0)
    assert red.add_row([0, 1], 1)
    assert red.rank == 2


def test_scalar_det_and_inverse_over_sqrt5():
    c = ExactScalar(Fraction(1, 4), Fraction(1, 4), 5)
    m = [[1, -c], [-c, 1]]
    ref = sympy.Matrix([[1, -to_sympy(c)], [-to_sympy(c), 1]])
    assert sympy.simplify(to_sympy(scalar_det(m)) - ref.det()) == 0
    inv = scalar_inverse(m)
    for i in range(2):
        for j in range(2):
            assert sum((ExactScalar.coerce(m[i][k]) * inv[k][j] for k in range(2)), ExactScalar(0)) == int(i == j)


def test_ratfunc_matrix_det_matches_sympy():
    rows = [[parse_ratfunc(t, V) for t in row] for row in
            [["(1)/(x)", "y", "(z)/(x*y)"], ["x", "(1)/(y^2)", "1"], ["(x + y)/(z)", "2", "x*z"]]]
    ref = sympy.Matrix([[to_sympy(e) for e in row] for row in rows]).det()
    assert same(to_sympy(ratfunc_matrix_det(rows)), ref)
