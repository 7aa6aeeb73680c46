"""Membership in Omega(A,m) and D(A,m), the basis criterion, and pole-order checks.

All pole orders are exact: ``ord_along`` divides by the linear form until
it no longer divides, so no "large enough N" is ever guessed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from .coxeter import CoxeterDatum, Hyperplane, MultiplicityMap, is_invariant
from .diffgeo import (DerivationField, OneForm, apply_derivation, apply_reflection, istar_inverse, istar_map,
                      istar_pairing, nabla_on_derivation, nabla_on_form, wedge_top)
from .linalg import RowReducer
from .poly import MultiPoly, iter_monomials
from .primitive import BasisFamily, FamilyEngine, PrimitiveDerivation, coefficient_jacobian
from .ratfunc import LinearForm, RatFunc, ord_along, ord_of_combination
from .scalar import ExactScalar


def _label(h: Hyperplane, variables: Sequence[str]) -> str:
    return str(h.alpha.poly(variables))


@dataclass
class HyperplaneWitness:
    hyperplane: str
    order: int | None  # None when the tested quantity vanishes identically
    bound: int
    ok: bool
    transverse_order: int | None = None  # worst pole order of the regularity condition

    def as_dict(self) -> dict:
        return {"hyperplane": self.hyperplane, "order": self.order, "bound": self.bound, "ok": self.ok,
                "transverse_order": self.transverse_order}


@dataclass
class MembershipVerdict:
    object_id: str
    side: str  # "omega" or "der"
    multiplicity: str
    verdict: bool
    witnesses: list[HyperplaneWitness]
    stray_denominator: str | None = None  # non-hyperplane denominator factor, if any

    @property
    def binding(self) -> HyperplaneWitness | None:
        """The first violated hyperplane condition, else the tightest satisfied one."""
        bad = [w for w in self.witnesses if not w.ok]
        if bad:
            return bad[0]
        tight = [w for w in self.witnesses if w.order is not None]
        return max(tight, key=lambda w: w.order - w.bound, default=None)

    def describe(self) -> str:
        if self.stray_denominator is not None:
            return f"denominator {self.stray_denominator} is not a product of hyperplane forms"
        b = self.binding
        if b is None:
            return "no constraint (all pairings vanish)"
        parts = []
        if b.order is not None:
            rel = "<=" if b.order <= b.bound else ">"
            parts.append(f"ord along {b.hyperplane} = {b.order} {rel} {b.bound}")
        if b.transverse_order is not None and b.transverse_order > 0:
            parts.append(f"pole of order {b.transverse_order} along {b.hyperplane} in the regularity condition")
        return "; ".join(parts) or f"no pairing constraint along {b.hyperplane}"

    def recheck(self) -> bool:
        """Re-derive the verdict from the witnesses alone."""
        if self.stray_denominator is not None:
            return not self.verdict
        ok = all((w.order is None or w.order <= w.bound) and (w.transverse_order is None or w.transverse_order <= 0)
                 for w in self.witnesses)
        return ok == self.verdict


def _denominator_outside(f: RatFunc, d: CoxeterDatum) -> MultiPoly | None:
    """Part of f's denominator not made of hyperplane forms (None if there is none)."""
    fs = f.denominator_factors
    forms = {h.alpha for h in d.hyperplanes}
    if fs is not None:
        stray = [lf for lf, _ in fs if lf not in forms]
        if not stray:
            return None
        out = MultiPoly.one(f.variables)
        for lf in stray:
            out = out * lf.poly(f.variables)
        return out
    den = f.den
    for h in d.hyperplanes:
        lp = h.poly(f.variables)
        while True:
            if den.misses_hyperplane(h.alpha.coefficients):
                break
            q = den.try_divide(lp)
            if q is None:
                break
            den = q
    return None if den.is_constant() else den


def _worst_order(combos: Sequence[Sequence[ExactScalar]], funcs: Sequence[RatFunc], alpha: LinearForm) -> int | None:
    """Largest pole order along alpha of sum c_i funcs_i over the coefficient
    vectors; 0 stands for "no pole" (orders below 0 are not resolved)."""
    orders = [o for c in combos if (o := ord_of_combination(c, funcs, alpha, floor=0)) is not None]
    return max(orders) if orders else None


def _orthogonal_covectors(alpha: LinearForm, d: CoxeterDatum) -> list[list[ExactScalar]]:
    """A basis of {beta in V* : I*(alpha, beta) = 0}."""
    w = d.metric.vector_of(alpha.coefficients)
    red = RowReducer(d.rank)
    red.add_row(w, 0)
    return red.result().kernel


def omega_membership(omega: OneForm, d: CoxeterDatum, m: MultiplicityMap, object_id: str = "omega") -> MembershipVerdict:
    """omega in Omega(A, m)?

    Requires omega in Omega(A, infinity): denominators are products of the
    alpha_H, and d(alpha_H) ^ omega has no pole along H.  Then for every H,
    ord_H I*(d alpha_H, omega) <= m(H).
    """
    if omega.is_zero():
        raise ValueError("membership of the zero form is not defined")
    v = d.variables
    for c in omega.coeffs:
        stray = _denominator_outside(c, d)
        if stray is not None:
            return MembershipVerdict(object_id, "omega", m.description, False, [], str(stray))
    witnesses = []
    for h in d.hyperplanes:
        a = [ExactScalar.coerce(x) for x in h.alpha.coefficients]
        # coefficients of d(alpha) ^ omega on dx_i ^ dx_j
        combos = []
        for i in range(d.rank):
            for j in range(i + 1, d.rank):
                if a[i] or a[j]:
                    c = [ExactScalar(0)] * d.rank
                    c[j], c[i] = a[i], -a[j]
                    combos.append(c)
        transverse = _worst_order(combos, omega.coeffs, h.alpha)
        # I*(d alpha, omega) = (G^{-1} a) . omega
        order = ord_of_combination(d.metric.vector_of(a), omega.coeffs, h.alpha)
        bound = m[h]
        ok = (order is None or order <= bound) and (transverse is None or transverse <= 0)
        witnesses.append(HyperplaneWitness(_label(h, v), order, bound, ok, transverse))
    return MembershipVerdict(object_id, "omega", m.description, all(w.ok for w in witnesses), witnesses)


def der_membership(xi: DerivationField, d: CoxeterDatum, m: MultiplicityMap, object_id: str = "xi",
                   cross_check: bool = True) -> MembershipVerdict:
    """xi in D(A, m)?

    Requires xi in D(A, -infinity): hyperplane denominators only, and
    xi(beta) pole-free along H whenever beta is I*-orthogonal to alpha_H.
    Then ord_H xi(alpha_H) <= -m(H).  With ``cross_check`` the verdict is
    compared with omega_membership(I*^{-1} xi, -m).
    """
    if xi.is_zero():
        raise ValueError("membership of the zero derivation is not defined")
    v = d.variables
    verdict = None
    for c in xi.coeffs:
        stray = _denominator_outside(c, d)
        if stray is not None:
            verdict = MembershipVerdict(object_id, "der", m.description, False, [], str(stray))
            break
    if verdict is None:
        witnesses = []
        for h in d.hyperplanes:
            transverse = _worst_order(_orthogonal_covectors(h.alpha, d), xi.coeffs, h.alpha)
            order = ord_of_combination(h.alpha.coefficients, xi.coeffs, h.alpha)
            bound = -m[h]
            ok = (order is None or order <= bound) and (transverse is None or transverse <= 0)
            witnesses.append(HyperplaneWitness(_label(h, v), order, bound, ok, transverse))
        verdict = MembershipVerdict(object_id, "der", m.description, all(w.ok for w in witnesses), witnesses)
    if cross_check:
        dual = omega_membership(istar_inverse(xi, d.metric), d, m.negated(), object_id)
        if dual.verdict != verdict.verdict:
            raise ArithmeticError(f"D(A,m) and I*(Omega(A,-m)) disagree on {object_id}")
    return verdict


@dataclass
class CriterionReport:
    multiplicity: str
    forms: list[str]
    product_scalar: RatFunc | None
    is_regular: bool
    is_constant: bool
    constant: ExactScalar | None
    memberships: list[MembershipVerdict] = field(default_factory=list)

    @property
    def precondition_ok(self) -> bool:
        return all(v.verdict for v in self.memberships)

    @property
    def ok(self) -> bool:
        return self.precondition_ok and self.is_constant

    def failure(self) -> str | None:
        for v in self.memberships:
            if not v.verdict:
                return f"{v.object_id} not in the module: {v.describe()}"
        if not self.is_regular:
            return f"Q^m * wedge = {self.product_scalar} is not regular"
        if not self.is_constant:
            return f"Q^m * wedge = {self.product_scalar} is not a nonzero constant"
        return None


def saito_ziegler_check(forms: Sequence[OneForm], d: CoxeterDatum, m: MultiplicityMap,
                        ids: Sequence[str] | None = None) -> CriterionReport:
    """Q^m * (omega_1 ^ ... ^ omega_l) regular / a nonzero constant, after the
    membership precondition on every form."""
    ids = list(ids) if ids is not None else [f"omega_{j + 1}" for j in range(len(forms))]
    if len(forms) != d.rank:
        raise ValueError(f"need exactly {d.rank} forms")
    memberships = [omega_membership(w, d, m, i) for w, i in zip(forms, ids)]
    product = _q_power_map(d, m) * wedge_top(forms)
    regular = product.is_polynomial()
    constant = product.constant_value() if product.is_constant() and not product.is_zero() else None
    return CriterionReport(m.description, ids, product, regular, constant is not None, constant, memberships)


def dual_criterion_check(derivations: Sequence[DerivationField], d: CoxeterDatum, m: MultiplicityMap,
                         ids: Sequence[str] | None = None) -> CriterionReport:
    """Basis criterion on the derivation side: members of D(A, m) with
    Q^{-m} det[xi_j(x_i)] a nonzero constant."""
    ids = list(ids) if ids is not None else [f"xi_{j + 1}" for j in range(len(derivations))]
    if len(derivations) != d.rank:
        raise ValueError(f"need exactly {d.rank} derivations")
    memberships = [der_membership(x, d, m, i) for x, i in zip(derivations, ids)]
    det = wedge_top([OneForm(x.variables, x.coeffs) for x in derivations])
    product = _q_power_map(d, m.negated()) * det
    regular = product.is_polynomial()
    constant = product.constant_value() if product.is_constant() and not product.is_zero() else None
    return CriterionReport(m.description, ids, product, regular, constant is not None, constant, memberships)


def _q_power_map(d: CoxeterDatum, m: MultiplicityMap) -> RatFunc:
    return RatFunc.linear_product(d.variables, {h.alpha: m[h] for h in d.hyperplanes})


def invariance_check(obj, d: CoxeterDatum) -> bool:
    return is_invariant(obj, d)


def antiinvariance_check(obj, d: CoxeterDatum) -> bool:
    """s(obj) = -obj for every simple reflection s."""
    return all(apply_reflection(obj, s) == -obj for s in d.reflections())


# -- pole-order lemma -------------------------------------------------------------------
@dataclass
class OrdLemmaReport:
    derivation_orders: list[tuple[str, int | None]]  # (hyperplane, ord_H D(alpha_H))
    sample_pairs: list[tuple[int, str, int, int]]  # (sample, hyperplane, ord f, ord D(f))
    skipped: list[tuple[int, str]]  # pairs with ord f = 0

    @property
    def ok(self) -> bool:
        return all(o == 1 for _, o in self.derivation_orders) and all(
            after == before + 2 for _, _, before, after in self.sample_pairs)

    def failures(self) -> list[str]:
        out = [f"ord along {h} of D(alpha) = {o}, expected 1" for h, o in self.derivation_orders if o != 1]
        out += [f"sample {s}: ord along {h} of D(f) = {a}, expected {b} + 2"
                for s, h, b, a in self.sample_pairs if a != b + 2]
        return out


def ord_lemma_check(d: CoxeterDatum, D: PrimitiveDerivation, samples: Sequence[RatFunc]) -> OrdLemmaReport:
    v = d.variables
    orders = []
    for h in d.hyperplanes:
        val = D.total.on_linear(h.alpha)
        orders.append((_label(h, v), None if val.is_zero() else ord_along(val, h.alpha)))
    pairs, skipped = [], []
    for s, f in enumerate(samples):
        Df = apply_derivation(D.total, f)
        for h in d.hyperplanes:
            before = ord_along(f, h.alpha)
            if before == 0:
                skipped.append((s, _label(h, v)))
                continue
            after = ord_along(Df, h.alpha) if not Df.is_zero() else None
            pairs.append((s, _label(h, v), before, after))
    return OrdLemmaReport(orders, pairs, skipped)


def ord_samples(d: CoxeterDatum, count: int, seed: int) -> list[RatFunc]:
    """Seeded rational functions p * prod alpha_H^(e_H) with nonzero order
    along at least one hyperplane."""
    rng = random.Random(seed)
    v = d.variables
    out = []
    while len(out) < count:
        deg = rng.randint(0, 2)
        p = MultiPoly.zero(v)
        for e in iter_monomials(d.rank, deg):
            c = rng.randint(-3, 3)
            if c:
                p = p + MultiPoly(v, {e: c})
        if p.is_zero():
            continue
        exps = {h.alpha: rng.choice((-2, -1, 0, 1, 2)) for h in d.hyperplanes}
        if not any(exps.values()):
            continue
        f = RatFunc(p) * RatFunc.linear_product(v, exps)
        if any(ord_along(f, h.alpha) != 0 for h in d.hyperplanes):
            out.append(f)
    return out


def derivation_jacobian_check(D: PrimitiveDerivation) -> list[tuple[str, ExactScalar | None]]:
    """Per irreducible factor: c' with det[dh_j/dx_i] = c' Q^-2 (None if not of that shape)."""
    out = []
    for fd in D.local:
        det = coefficient_jacobian(fd)
        val = det * RatFunc(fd.q) ** 2
        c = val.constant_value() if val.is_constant() and not val.is_zero() else None
        out.append((fd.factor.name, c))
    return out


def transverse_pole_check(d: CoxeterDatum, D: PrimitiveDerivation) -> list[tuple[str, int | None]]:
    """Worst pole order along H of D(beta) over beta I*-orthogonal to alpha_H
    (must be <= 0)."""
    v = d.variables
    out = []
    for h in d.hyperplanes:
        out.append((_label(h, v), _worst_order(_orthogonal_covectors(h.alpha, d), D.total.coeffs, h.alpha)))
    return out


def antiinvariance_order_check(omega: OneForm, d: CoxeterDatum) -> dict:
    """For invariant omega: ord_H I*(omega, d alpha_H) != 0 at every H.

    Pairings that vanish identically are listed under ``vacuous``.
    """
    if not invariance_check(omega, d):
        raise ValueError("antiinvariance order check needs an invariant form")
    if omega.is_zero():
        raise ValueError("zero form")
    v = d.variables
    orders, vacuous = [], []
    for h in d.hyperplanes:
        p = istar_pairing(omega, OneForm.of_linear(v, h.alpha), d.metric)
        if p.is_zero():
            vacuous.append(_label(h, v))
        else:
            orders.append((_label(h, v), ord_along(p, h.alpha)))
    return {"ok": all(o != 0 for _, o in orders), "orders": orders, "vacuous": vacuous}


# -- primitive filtration -----------------------------------------------------------------
@dataclass
class ShiftResult:
    sample: str
    before: MembershipVerdict
    after: MembershipVerdict
    dual_before: MembershipVerdict
    dual_after: MembershipVerdict

    @property
    def ok(self) -> bool:
        return self.before.verdict == self.after.verdict and self.dual_before.verdict == self.dual_after.verdict \
            and self.before.verdict == self.dual_before.verdict


@dataclass
class FiltrationReport:
    multiplicity: str
    results: list[ShiftResult]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    @property
    def members(self) -> int:
        return sum(r.before.verdict for r in self.results)


def filtration_shift_check(d: CoxeterDatum, D: PrimitiveDerivation, m: MultiplicityMap,
                           samples: Sequence[tuple[str, OneForm]]) -> FiltrationReport:
    """omega in Omega(A,m)^W  <=>  nabla_D omega in Omega(A,m+2)^W, per sample,
    plus the dual statement with xi = I*(omega) and multiplicities -m, -m-2."""
    m2 = m.shifted(2)
    results = []
    for sid, w in samples:
        image = nabla_on_form(D.total, w)
        xi = istar_map(w, d.metric)
        xi_image = nabla_on_derivation(D.total, xi)
        results.append(ShiftResult(
            sid,
            omega_membership(w, d, m, sid),
            omega_membership(image, d, m2, f"nabla {sid}"),
            der_membership(xi, d, m.negated(), f"I* {sid}", cross_check=False),
            der_membership(xi_image, d, m2.negated(), f"nabla I* {sid}", cross_check=False),
        ))
    return FiltrationReport(m.description, results)


def invariant_form_samples(engine: FamilyEngine, count: int, seed: int,
                           ks: Sequence[int] = (-1, 0, 1)) -> list[tuple[str, OneForm]]:
    """Basis members first, then seeded R-combinations sum r_j theta_j^(k) with
    r_j of low degree in the basic invariants."""
    d = engine.d
    rng = random.Random(seed)
    out: list[tuple[str, OneForm]] = []
    for k in ks:
        fam = engine.theta(k)
        for (i, j), w in zip(fam.labels, fam.forms):
            out.append((f"theta[{i + 1}]_{j + 1}^({k})", w))
    out = out[:max(count // 2, 1)] if len(out) > count else out
    P = d.invariants
    while len(out) < count:
        k = rng.choice(list(ks))
        fam = engine.theta(k)
        total = OneForm.zero(d.variables)
        terms = []
        for idx, w in enumerate(fam.forms):
            c = rng.randint(-2, 2)
            if not c:
                continue
            r = MultiPoly.constant(d.variables, c)
            if rng.random() < 0.5:
                b = rng.randrange(len(P))
                r = r * P[b]
                terms.append(f"{c}*P{b + 1}*theta_{idx + 1}")
            else:
                terms.append(f"{c}*theta_{idx + 1}")
            total = total + w * r
        if total.is_zero():
            continue
        out.append((f"k={k}: " + " + ".join(terms), total))
    return out
