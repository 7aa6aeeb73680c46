"""Acceptance suite: one test per criterion, all identities checked exactly.

The summary block at the end of the pytest run prints one PASS/FAIL line per
criterion (see conftest.py).
"""

from __future__ import annotations

import json
import time
from fractions import Fraction

from conftest import criterion

from coxlog.certify import generate_document, random_rational_forms, session
from coxlog.cli import main
from coxlog.coxeter import MultiplicityMap, build, is_invariant, jacobian_determinant, product
from coxlog.diffgeo import DerivationField, OneForm, apply_derivation, istar_map, nabla_on_derivation, nabla_on_form
from coxlog.logmod import (derivation_jacobian_check, dual_criterion_check, filtration_shift_check,
                           invariant_form_samples, ord_lemma_check, ord_samples, saito_ziegler_check)
from coxlog.poly import MultiPoly
from coxlog.primitive import (FamilyEngine, apply_entrywise, embed_field, g_k_matrix, g_matrix, matrix_det,
                              t_membership, xi_basis)
from coxlog.ratfunc import RatFunc

CRITERION_TYPES = ["A2", "A3", "B2", "B3", "I2(4)", "I2(6)", "H3", "A1xA1", "A1xB2", "A2xB2"]
CATALOG = ["A1", "A2", "A3", "A4", "B2", "B3", "D4", "I2(3)", "I2(4)", "I2(5)", "I2(6)", "H3"]
PRODUCTS = ["A1xA1", "A1xB2"]
SEED = 42
SAMPLES = 8


def _criterion_pair(name: str, k: int):
    s = session(name)
    fam = s.engine.xi(k)
    forms = saito_ziegler_check(fam.forms, s.d, MultiplicityMap.constant(s.d, 2 * k - 1))
    ders = dual_criterion_check(fam.derivations, s.d, MultiplicityMap.constant(s.d, -2 * k + 1))
    return forms, ders


def _check_criterion_2(names):
    for name in names:
        for k in (-1, 0, 1, 2):
            forms, ders = _criterion_pair(name, k)
            assert forms.ok, (name, k, forms.failure())
            assert ders.ok, (name, k, ders.failure())
            assert forms.constant and ders.constant


def _check_jacobians(names):
    for name in names:
        d = build(name)
        c = jacobian_determinant(d.invariants).try_divide(d.Q)
        assert c is not None and c.is_constant() and not c.is_zero(), name


def _check_ord_lemma(names):
    for name in names:
        s = session(name)
        samples = ord_samples(s.d, SAMPLES, SEED)
        assert len(samples) >= SAMPLES
        r = ord_lemma_check(s.d, s.D, samples)
        assert r.ok, (name, r.failures())
        assert all(o == 1 for _, o in r.derivation_orders)
        assert len({p[0] for p in r.sample_pairs}) >= SAMPLES


def _check_truncation(names, ks=range(-2, 3)):
    for name in names:
        s = session(name)
        for k in ks:
            fam, nxt = s.engine.theta(k), s.engine.theta(k + 1)
            for (i, _), w, want in zip(fam.labels, fam.forms, nxt.forms):
                assert nabla_on_form(s.D.per_factor[i], w) == want, (name, k)
                assert nabla_on_form(s.D.total, w) == want, (name, k)
            if k < 0:
                assert fam.kernel_dimensions and all(x == 0 for x in fam.kernel_dimensions), (name, k)


def _check_filtration(name: str, extra: list[str]):
    s = session(name)
    samples = invariant_form_samples(s.engine, SAMPLES, SEED)
    assert len(samples) >= SAMPLES
    assert all(is_invariant(w, s.d) for _, w in samples)
    texts = [f"const:{c}" for c in range(-3, 4)] + extra
    for text in texts:
        m = MultiplicityMap.parse(s.d, text)
        r = filtration_shift_check(s.d, s.D, m, samples)
        bad = [x.sample for x in r.results if not x.ok]
        assert r.ok, (name, text, bad)


def _check_commuting(names, ks=(-2, -1, 0, 1, 2)):
    for name in names:
        s = session(name)
        for k in ks:
            xi_basis(s.engine, k)  # raises on disagreement
            fam = s.engine.xi(k)
            assert [istar_map(w, s.d.metric) for w in fam.forms] == fam.derivations
        for w in random_rational_forms(s.d, 16, SEED):
            left = istar_map(nabla_on_form(s.D.total, w), s.d.metric)
            right = nabla_on_derivation(s.D.total, istar_map(w, s.d.metric))
            assert left == right, name


@criterion(1, "A1 closed forms and constants 1/3, 1, 1")
def test_criterion_01_a1_closed_forms():
    t0 = time.perf_counter()
    s = session("A1")
    x = MultiPoly.var(s.d.variables, "x")
    one = MultiPoly.one(s.d.variables)
    assert s.D.total == DerivationField(s.d.variables, [RatFunc(one, x)])
    expected = {-1: RatFunc(x ** 3).scale(Fraction(1, 3)), 0: RatFunc(x), 1: RatFunc(one, x)}
    constants = {}
    for k, coeff in expected.items():
        fam = s.engine.theta(k)
        assert fam.forms == [OneForm(s.d.variables, [coeff])]
        r = saito_ziegler_check(fam.forms, s.d, MultiplicityMap.constant(s.d, 2 * k - 1))
        assert r.ok
        constants[k] = str(r.constant)
    assert constants == {-1: "1/3", 0: "1", 1: "1"}
    assert time.perf_counter() - t0 < 1.0


@criterion(2, "basis criterion on Theta^(k) and Xi^(k), 10 types, k=-1..2")
def test_criterion_02_basis_criterion():
    t0 = time.perf_counter()
    _check_criterion_2(CRITERION_TYPES)
    assert time.perf_counter() - t0 < 120.0


@criterion(3, "Jacobian det = c*Q and det[dh/dx] = c'*Q^-2")
def test_criterion_03_jacobians():
    _check_jacobians(CATALOG + CRITERION_TYPES)
    for name in CATALOG:
        s = session(name)
        results = derivation_jacobian_check(s.D)
        assert all(c is not None and not c.is_zero() for _, c in results), (name, results)


@criterion(4, "pole orders: ord D(alpha) = 1 and ord D(f) = ord f + 2")
def test_criterion_04_ord_lemma():
    _check_ord_lemma(CATALOG)


@criterion(5, "nabla_D theta^(k) = theta^(k+1) for k=-2..2, ansatz kernel 0")
def test_criterion_05_truncation():
    _check_truncation(CRITERION_TYPES)


@criterion(6, "filtration shift both directions on B2 and B3")
def test_criterion_06_filtration_shift():
    _check_filtration("B2", ["orbit:long=1,short=-1", "orbit:long=-2,short=3"])
    _check_filtration("B3", ["orbit:long=1,short=-1", "orbit:long=-2,short=3"])


@criterion(7, "reducible A1xA1 and A1xB2: sum of D, union of families, T-membership")
def test_criterion_07_reducible():
    for name in PRODUCTS:
        s = session(name)
        total = DerivationField.zero(s.d.variables)
        for h in s.D.per_factor:
            total = total + h
        assert total == s.D.total
        for k in range(-2, 3):
            union = []
            for f in s.d.factors:
                alone = FamilyEngine(product([f])).theta(k)
                union.extend(embed_field(w, s.d.variables, f.positions) for w in alone.forms)
            assert s.engine.theta(k).forms == union, (name, k)
        tops = [s.d.factor_invariants(i)[-1] for i in range(len(s.d.factors))]
        assert t_membership(tops[1] - tops[0], s.D, s.d)
        assert not t_membership(tops[0], s.D, s.d)
        for i in range(len(s.d.factors)):
            for p in s.d.factor_invariants(i)[:-1]:
                assert t_membership(p, s.D, s.d)
    _check_criterion_2(PRODUCTS)
    _check_jacobians(PRODUCTS)
    _check_ord_lemma(PRODUCTS)
    _check_truncation(PRODUCTS)
    _check_filtration("A1xA1", ["orbit:1.all=2,2.all=-1"])
    _check_filtration("A1xB2", ["orbit:1.all=0,2.long=1,2.short=-1"])
    _check_commuting(PRODUCTS)


@criterion(8, "G symmetric invariant, G_k in R, D[G] in T with det != 0")
def test_criterion_08_g_matrices():
    for name in CRITERION_TYPES:
        s = session(name)
        G = g_matrix(s.d)
        assert G.is_symmetric() and G.in_invariant_ring(s.d), name
        for k in (-1, 0, 1):
            Gk = g_k_matrix(s.d, s.engine.theta(k), s.engine.theta(k + 1))
            assert Gk.in_invariant_ring(s.d), (name, k)
        DG = apply_entrywise(s.D, G)
        for row in DG.entries:
            for e in row:
                assert e.is_polynomial() and is_invariant(e, s.d), name
                assert apply_derivation(s.D.total, e).is_zero(), name
        assert not matrix_det(DG).is_zero(), name


@criterion(9, "two computation paths of Xi^(k) agree; 16 random forms per type")
def test_criterion_09_commuting_diagram():
    _check_commuting(CRITERION_TYPES)


@criterion(10, "negative control: perturbed basis form gives exit 1 naming the hyperplane")
def test_criterion_10_negative_control(tmp_path, capsys):
    doc = generate_document("B2", 0, 1)
    fam = next(f for f in doc["families"] if f["k"] == 1)
    # multiply theta_1^(1) by 1/x: one more pole along x = 0
    fam["theta"][0] = [f"({c})/(x)" if "/" not in c else c.replace(")/(", ")/(x*(", 1) + ")"
                       for c in fam["theta"][0]]
    path = tmp_path / "corrupt.json"
    path.write_text(json.dumps(doc))
    code = main(["verify", "--families", str(path)])
    err = capsys.readouterr().err
    assert code == 1
    assert "FAIL B2/membership/theta[1]_1^(1)" in err
    assert "ord along x = 2 > 1" in err
