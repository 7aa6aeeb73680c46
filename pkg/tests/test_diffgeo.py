from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from coxlog.coxeter import COS_PI_5, build
from coxlog.diffgeo import (DerivationField, Metric, OneForm, Reflection, apply_derivation, istar_inverse, istar_map,
                            istar_pairing, nabla_on_derivation, nabla_on_form, reflect, wedge_top)
from coxlog.poly import MultiPoly
from coxlog.ratfunc import LinearForm, RatFunc, parse_ratfunc
from coxlog.scalar import ExactScalar
from oracle import same, symbols, to_sympy

V = ("x", "y")
GRAM = Metric.from_gram([[1, Fraction(-1, 2)], [Fraction(-1, 2), 1]])
coeff_texts = st.sampled_from(["x", "y^2", "(1)/(x)", "(x + y)/(y)", "(3)/(x*(x + y))", "x*y - 2", "0",
                               "(y)/(x^2)"])


def _form(cls, texts):
    return cls(V, [parse_ratfunc(t, V) for t in texts])


def test_metric_rejects_bad_gram():
    with pytest.raises(ValueError):
        Metric.from_gram([[1, 2], [2, 1]])  # indefinite
    with pytest.raises(ValueError):
        Metric.from_gram([[1, 0], [1, 1]])  # not symmetric


def test_metric_inverse():
    g = Metric.from_gram([[1, -COS_PI_5], [-COS_PI_5, 1]])
    for i in range(2):
        for j in range(2):
            s = sum((g.gram[i][k] * g.inverse_gram[k][j] for k in range(2)), ExactScalar(0))
            assert s == int(i == j)


@settings(max_examples=30, deadline=None)
@given(st.lists(coeff_texts, min_size=2, max_size=2), st.lists(coeff_texts, min_size=2, max_size=2))
def test_istar_pairing_matches_matrix_formula(a, b):
    w, e = _form(OneForm, a), _form(OneForm, b)
    G = sympy.Matrix([[to_sympy(c) for c in row] for row in GRAM.inverse_gram])
    A = sympy.Matrix([to_sympy(c) for c in w.coeffs])
    B = sympy.Matrix([to_sympy(c) for c in e.coeffs])
    assert same(to_sympy(istar_pairing(w, e, GRAM)), (A.T * G * B)[0])
    assert istar_pairing(w, e, GRAM) == istar_pairing(e, w, GRAM)


@settings(max_examples=30, deadline=None)
@given(st.lists(coeff_texts, min_size=2, max_size=2))
def test_istar_map_is_invertible(a):
    w = _form(OneForm, a)
    assert istar_inverse(istar_map(w, GRAM), GRAM) == w


@settings(max_examples=30, deadline=None)
@given(st.lists(coeff_texts, min_size=2, max_size=2), coeff_texts)
def test_apply_derivation_matches_sympy(h, f):
    xi = _form(DerivationField, h)
    F = parse_ratfunc(f, V)
    x, y = symbols(V)
    ref = to_sympy(xi.coeffs[0]) * sympy.diff(to_sympy(F), x) + to_sympy(xi.coeffs[1]) * sympy.diff(to_sympy(F), y)
    assert same(to_sympy(apply_derivation(xi, F)), ref)


def test_wedge_top_matches_sympy():
    w1 = _form(OneForm, ["(1)/(x)", "y"])
    w2 = _form(OneForm, ["x + y", "(1)/(x*y)"])
    ref = sympy.Matrix([[to_sympy(c) for c in w1.coeffs], [to_sympy(c) for c in w2.coeffs]]).det()
    assert same(to_sympy(wedge_top([w1, w2])), ref)


def test_nabla_acts_coefficientwise():
    D = _form(DerivationField, ["(1)/(x)", "0"])
    w = _form(OneForm, ["x^2", "y"])
    assert nabla_on_form(D, w) == _form(OneForm, ["2", "0"])
    assert nabla_on_derivation(D, DerivationField(V, w.coeffs)) == _form(DerivationField, ["2", "0"])


def test_reflection_is_orthogonal_involution():
    s = Reflection.along([1, 0], GRAM)
    M = s.matrix()
    M2 = [[sum((M[i][k] * M[k][j] for k in range(2)), ExactScalar(0)) for j in range(2)] for i in range(2)]
    assert M2 == [[1, 0], [0, 1]]
    # s(a) = -a for the root vector itself
    assert s.apply_vector(s.vector) == [-c for c in s.vector]
    # pullback of the covector alpha is -alpha
    assert s.apply_covector(s.covector) == [-c for c in s.covector]


@settings(max_examples=20, deadline=None)
@given(st.lists(coeff_texts, min_size=2, max_size=2))
def test_reflection_on_fields_is_involutive(a):
    w = _form(OneForm, a)
    xi = _form(DerivationField, a)
    for root in ([1, 0], [0, 1], [1, 1]):
        assert reflect(reflect(w, root, GRAM), root, GRAM) == w
        assert reflect(reflect(xi, root, GRAM), root, GRAM) == xi


def test_reflection_commutes_with_istar():
    w = _form(OneForm, ["(1)/(x)", "x*y"])
    for root in ([1, 0], [0, 1]):
        assert reflect(istar_map(w, GRAM), root, GRAM) == istar_map(reflect(w, root, GRAM), GRAM)


def test_invariants_of_catalog_types_are_reflection_fixed():
    d = build("I2(5)")
    for p in d.invariants:
        for h in d.hyperplanes:
            assert reflect(p, h.alpha, d.metric) == p


def test_form_pullback_formula():
    # s_x(x, y) = (-x + y, y) under the A2 Gram matrix; f dx pulls back to M^T f(Mx)
    s = Reflection.along([1, 0], GRAM)
    w = OneForm(V, [RatFunc(MultiPoly.var(V, "x")), RatFunc(MultiPoly.zero(V))])
    img = reflect(w, [1, 0], GRAM)
    x, y = symbols(V)
    M = sympy.Matrix([[to_sympy(c) for c in row] for row in s.matrix()])
    mx = M * sympy.Matrix([x, y])
    ref = M.T * sympy.Matrix([mx[0], 0])
    assert all(same(to_sympy(c), r) for c, r in zip(img.coeffs, ref))
    assert LinearForm(s.apply_covector([0, 1])).coefficients != (ExactScalar(0), ExactScalar(1))
