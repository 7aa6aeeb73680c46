from __future__ import annotations

from collections import Counter

import pytest
import sympy

from coxlog.certify import session
from coxlog.coxeter import MultiplicityMap, build
from coxlog.diffgeo import OneForm, apply_derivation, istar_map, nabla_on_form, wedge_top
from coxlog.logmod import saito_ziegler_check
from coxlog.poly import MultiPoly
from coxlog.primitive import FamilyEngine, g_k_matrix, primitive_derivation, t_membership, theta_basis
from coxlog.ratfunc import RatFunc
from oracle import same, symbols, to_sympy


@pytest.mark.parametrize("name", ["A2", "B2", "I2(5)", "H3", "A1xA1"])
def test_primitive_derivation_kills_all_but_top_invariant(name):
    d = build(name)
    D = primitive_derivation(d)
    for i, f in enumerate(d.factors):
        P = d.factor_invariants(i)
        for j, p in enumerate(P):
            want = 1 if j == len(P) - 1 else 0
            assert apply_derivation(D.per_factor[i], p) == RatFunc(MultiPoly.constant(d.variables, want))


def test_primitive_derivation_matches_sympy_solve():
    # independent route: solve the Jacobian system in sympy
    d = build("B2")
    D = primitive_derivation(d)
    xs = symbols(d.variables)
    P = [to_sympy(p) for p in d.invariants]
    J = sympy.Matrix([[sympy.diff(p, x) for x in xs] for p in P])
    h = J.LUsolve(sympy.Matrix([0, 1]))
    assert all(same(to_sympy(c), r) for c, r in zip(D.total.coeffs, h))


def test_b2_family_degrees():
    s = session("B2")
    got = {k: s.engine.theta(k).degrees for k in range(-1, 3)}
    # exponents 1, 3 shifted by -h*k with h = 4
    assert got == {-1: [5, 7], 0: [1, 3], 1: [-3, -1], 2: [-7, -5]}
    assert Counter(x for v in got.values() for x in v) == Counter([1, 3, -3, -1, -7, -5, 5, 7])


def _sympy_theta1_constant(name):
    # Q * det[theta^(1)] with theta_j^(1) = sum_i D(dP_j/dx_i) dx_i, computed in sympy alone
    d = build(name)
    xs = symbols(d.variables)
    P = [to_sympy(p) for p in d.invariants]
    J = sympy.Matrix([[sympy.diff(p, x) for x in xs] for p in P])
    h = J.LUsolve(sympy.Matrix([0] * (len(P) - 1) + [1]))
    rows = [[sympy.cancel(sum(h[a] * sympy.diff(sympy.diff(p, xi), xs[a]) for a in range(len(xs))))
             for xi in xs] for p in P]
    return sympy.cancel(to_sympy(d.Q) * sympy.Matrix(rows).det())


def test_b2_k1_constant_frozen():
    s = session("B2")
    r = saito_ziegler_check(s.engine.theta(1).forms, s.d, MultiplicityMap.constant(s.d, 1))
    assert r.ok
    ref = _sympy_theta1_constant("B2")
    assert ref == -6
    assert same(to_sympy(r.constant), ref)


def test_a2_k1_constant_matches_sympy():
    s = session("A2")
    r = saito_ziegler_check(s.engine.theta(1).forms, s.d, MultiplicityMap.constant(s.d, 1))
    assert r.ok and same(to_sympy(r.constant), _sympy_theta1_constant("A2"))


@pytest.mark.parametrize("name", ["A2", "B2", "I2(5)"])
def test_g_k_relates_consecutive_families(name):
    s = session(name)
    for k in (-1, 0, 1):
        fam, nxt = s.engine.theta(k), s.engine.theta(k + 1)
        G = g_k_matrix(s.d, fam, nxt)
        for j, w in enumerate(fam.forms):
            total = OneForm.zero(s.d.variables)
            for i, v in enumerate(nxt.forms):
                total = total + v * G.entries[i][j]
            assert total == w, (name, k, j)


def test_truncation_and_xi_image():
    s = session("I2(5)")
    for k in (-2, -1, 0, 1):
        fam, nxt = s.engine.xi(k), s.engine.xi(k + 1)
        for w, want in zip(fam.forms, nxt.forms):
            assert nabla_on_form(s.D.total, w) == want
        assert fam.derivations == [istar_map(w, s.d.metric) for w in fam.forms]
    assert not wedge_top(s.engine.theta(3).forms).is_zero()


def test_engine_matches_single_factor_engine():
    s = session("A1xA1")
    a1 = FamilyEngine(build("A1")).theta(1)
    assert len(s.engine.theta(1).forms) == 2 * len(a1.forms)


def test_theta_basis_rejects_far_k():
    with pytest.raises(ValueError):
        theta_basis(session("A1").engine, 50)


def test_t_membership():
    s = session("B2")
    P1, P2 = s.d.invariants
    assert t_membership(P1, s.D, s.d)
    assert not t_membership(P2, s.D, s.d)
    with pytest.raises(ValueError):
        t_membership(s.d.Q, s.D, s.d)  # Q is anti-invariant
