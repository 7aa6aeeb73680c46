"""Primitive derivations, the families Theta^(k) / Xi^(k), and the G matrices."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .coxeter import CoxeterDatum, FactorDatum, is_invariant, jacobian_determinant
from .diffgeo import (DerivationField, OneForm, apply_derivation, istar_map, istar_pairing,
                      nabla_on_derivation, nabla_on_form, wedge_top)
from .linalg import RowReducer, laplace_det, ratfunc_matrix_det
from .poly import MultiPoly
from .ratfunc import LinearForm, RatFunc
from .scalar import ExactScalar

DEFAULT_K_RANGE = (-2, 3)


class TheoryViolation(RuntimeError):
    """A computed object contradicts a structural identity it must satisfy."""


def embed_ratfunc(f: RatFunc, variables: Sequence[str], positions: Sequence[int]) -> RatFunc:
    num = f.num.embed(variables, positions)
    fs = f.denominator_factors
    if fs is not None:
        n = len(variables)
        factors = {}
        for lf, e in fs:
            big = [ExactScalar(0)] * n
            for p, c in zip(positions, lf.coefficients):
                big[p] = c
            factors[LinearForm(big)] = e
        return RatFunc.factored(num, factors)
    return RatFunc(num, f.den.embed(variables, positions))


def embed_field(obj, variables: Sequence[str], positions: Sequence[int]):
    """Embed a local OneForm/DerivationField; other coordinates get coefficient 0."""
    coeffs: list = [0] * len(variables)
    for p, c in zip(positions, obj.coeffs):
        coeffs[p] = embed_ratfunc(c, variables, positions)
    return type(obj)(variables, coeffs)


def _local_hyperplanes(f: FactorDatum) -> dict[LinearForm, int]:
    return {LinearForm(f.root_form(r)): 1 for r in f.positive_roots}


@dataclass
class FactorDerivation:
    """D[i] = d/dP_top for one irreducible factor, in the factor's own variables.

    ``q_times`` holds the polynomial coefficients of Q[i]*D[i].
    """

    factor: FactorDatum
    field: DerivationField
    q_times: tuple[MultiPoly, ...]
    q: MultiPoly
    jacobian_constant: ExactScalar


@dataclass
class PrimitiveDerivation:
    total: DerivationField
    per_factor: tuple[DerivationField, ...]  # hatted: zero on other factors
    local: tuple[FactorDerivation, ...]

    @property
    def variables(self) -> tuple[str, ...]:
        return self.total.variables


def _factor_derivation(f: FactorDatum) -> FactorDerivation:
    v = f.variables
    n = f.rank
    P = f.invariants
    # M[j][i] = dP_j/dx_i; solve M h = e_top
    M = [[P[j].diff(i) for i in range(n)] for j in range(n)]
    hyper = _local_hyperplanes(f)
    q = MultiPoly.one(v)
    for lf in hyper:
        q = q * lf.poly(v)
    det = jacobian_determinant(P)
    c = det.try_divide(q)
    if c is None or not c.is_constant() or c.is_zero():
        raise TheoryViolation(f"singular or malformed invariant Jacobian for {f.name}")
    c = c.constant_value()
    top = n - 1
    numerators = []
    zero, one = MultiPoly.zero(v), MultiPoly.one(v)
    for i in range(n):
        minor = [[M[r][col] for col in range(n) if col != i] for r in range(n) if r != top]
        cof = laplace_det(minor, zero, one) if minor else one
        if (i + top) % 2:
            cof = -cof
        numerators.append(cof.scale(c.inverse()))
    D = DerivationField(v, [RatFunc.factored(a, hyper) for a in numerators])
    for j in range(n):
        val = apply_derivation(D, P[j])
        want = 1 if j == top else 0
        if val != RatFunc(MultiPoly.constant(v, want)):
            raise TheoryViolation(f"D(P_{j + 1}) = {val}, expected {want} for {f.name}")
    return FactorDerivation(f, D, tuple(numerators), q, c)


def primitive_derivation(d: CoxeterDatum) -> PrimitiveDerivation:
    local = tuple(_factor_derivation(f) for f in d.factors)
    hatted = tuple(embed_field(fd.field, d.variables, fd.factor.positions) for fd in local)
    total = hatted[0]
    for h in hatted[1:]:
        total = total + h
    return PrimitiveDerivation(total, hatted, local)


def t_membership(f: MultiPoly | RatFunc, D: PrimitiveDerivation, d: CoxeterDatum) -> bool:
    """True iff the invariant f is killed by D."""
    if not is_invariant(f, d):
        raise ValueError("t_membership needs a W-invariant input")
    return apply_derivation(D.total, f).is_zero()


# -- basis families ------------------------------------------------------------------
@dataclass
class BasisFamily:
    k: int
    forms: list[OneForm]
    derivations: list[DerivationField] = field(default_factory=list)
    degrees: list[int] = field(default_factory=list)
    labels: list[tuple[int, int]] = field(default_factory=list)  # (factor, j), 0-based
    kernel_dimensions: list[int] = field(default_factory=list)  # negative k only


def _weighted_monomials(degrees: Sequence[int], target: int) -> list[tuple[int, ...]]:
    """Exponent vectors e with sum e_b * degrees[b] = target."""
    out: list[tuple[int, ...]] = []

    def rec(b: int, left: int, acc: list[int]) -> None:
        if b == len(degrees):
            if left == 0:
                out.append(tuple(acc))
            return
        for e in range(left // degrees[b], -1, -1):
            acc.append(e)
            rec(b + 1, left - e * degrees[b], acc)
            acc.pop()

    if target >= 0:
        rec(0, target, [])
    return out


class FactorFamilies:
    """Theta^(k)[i] for one irreducible factor, memoized over k (local variables)."""

    def __init__(self, fd: FactorDerivation) -> None:
        self.fd = fd
        self.factor = fd.factor
        self._forms: dict[int, list[OneForm]] = {0: [OneForm.exact(p) for p in self.factor.invariants]}
        self.kernel_dimensions: dict[int, list[int]] = {}
        self._invariant_powers: dict[tuple[int, ...], MultiPoly] = {}

    def degree(self, j: int, k: int) -> int:
        return self.factor.exponents[j] - k * self.factor.coxeter_number

    def forms(self, k: int) -> list[OneForm]:
        if k not in self._forms:
            if k > 0:
                prev = self.forms(k - 1)
                self._forms[k] = [nabla_on_form(self.fd.field, w) for w in prev]
            else:
                nxt = self.forms(k + 1)
                solved = [self._solve_preimage(j, k, nxt[j]) for j in range(self.factor.rank)]
                self._forms[k] = [s[0] for s in solved]
                self.kernel_dimensions[k] = [s[1] for s in solved]
        return self._forms[k]

    def _power(self, e: tuple[int, ...]) -> MultiPoly:
        if e not in self._invariant_powers:
            P = self.factor.invariants
            acc = MultiPoly.one(self.factor.variables)
            for b, eb in enumerate(e):
                if eb:
                    acc = acc * P[b] ** eb
            self._invariant_powers[e] = acc
        return self._invariant_powers[e]

    def _q_nabla(self, coeffs: Sequence[MultiPoly]) -> list[MultiPoly]:
        """Coefficients of Q * nabla_D(sum coeffs_a dx_a), all polynomial."""
        q_times = self.fd.q_times
        out = []
        for f in coeffs:
            acc = MultiPoly.zero(self.factor.variables)
            for i, qi in enumerate(q_times):
                if not qi.is_zero():
                    acc = acc + qi * f.diff(i)
            out.append(acc)
        return out

    def _solve_preimage(self, j: int, k: int, target: OneForm) -> tuple[OneForm, int]:
        """Invariant polynomial form theta with nabla_D theta = target.

        The ansatz is sum_a g_a(P) dP_a with g_a weighted-homogeneous in the
        basic invariants, which spans all invariant polynomial forms of the
        required degree.
        """
        f = self.factor
        n = f.rank
        v = f.variables
        deg = self.degree(j, k)
        dP = [OneForm.exact(p) for p in f.invariants]
        unknowns: list[list[MultiPoly]] = []
        for a in range(n):
            for e in _weighted_monomials(f.degrees, deg - f.exponents[a]):
                g = self._power(e)
                unknowns.append([g * c.as_poly() for c in dP[a].coeffs])
        if not unknowns:
            raise TheoryViolation(f"no invariant forms of degree {deg} for {f.name}")
        images = [self._q_nabla(u) for u in unknowns]
        rhs = [(c * RatFunc(self.fd.q)).as_poly() for c in target.coeffs]
        # one equation per (component, monomial)
        keys: set[tuple[int, tuple[int, ...]]] = set()
        for img in images + [rhs]:
            for comp, p in enumerate(img):
                keys.update((comp, e) for e in p.terms())
        red = RowReducer(len(unknowns))
        for comp, e in sorted(keys, reverse=True):
            row = [img[comp].coefficient(e) for img in images]
            red.add_row(row, rhs[comp].coefficient(e))
            # once the rank is full the solution is determined; the exact
            # identity check below covers the remaining equations
            if red.inconsistent or red.rank == len(unknowns):
                break
        sol = red.result()
        if sol.status == "none":
            raise TheoryViolation(f"no invariant preimage for theta_{j + 1}^({k + 1}) of {f.name}")
        coeffs = [MultiPoly.zero(v) for _ in range(n)]
        for c, u in zip(sol.solution, unknowns):
            if c:
                coeffs = [acc + p.scale(c) for acc, p in zip(coeffs, u)]
        theta = OneForm(v, coeffs)
        if nabla_on_form(self.fd.field, theta) != target:
            raise TheoryViolation(f"preimage check failed for theta_{j + 1}^({k}) of {f.name}")
        return theta, sol.kernel_dimension


class FamilyEngine:
    """All families of a datum, with per-factor memoization."""

    def __init__(self, d: CoxeterDatum, D: PrimitiveDerivation | None = None) -> None:
        self.d = d
        self.D = D or primitive_derivation(d)
        self.factors = [FactorFamilies(fd) for fd in self.D.local]
        self._theta: dict[int, BasisFamily] = {}

    def theta(self, k: int) -> BasisFamily:
        if k not in self._theta:
            d = self.d
            forms, degrees, labels, kernels = [], [], [], []
            for i, ff in enumerate(self.factors):
                local = ff.forms(k)
                pos = ff.factor.positions
                for j, w in enumerate(local):
                    forms.append(embed_field(w, d.variables, pos))
                    degrees.append(ff.degree(j, k))
                    labels.append((i, j))
                if k < 0:
                    kernels.extend(ff.kernel_dimensions[k])
            self._theta[k] = BasisFamily(k, forms, [], degrees, labels, kernels)
        return self._theta[k]

    def xi(self, k: int) -> BasisFamily:
        fam = self.theta(k)
        if not fam.derivations:
            fam.derivations = [istar_map(w, self.d.metric) for w in fam.forms]
        return fam

    def xi_direct(self, k: int) -> list[DerivationField]:
        """Xi^(k) by iterating nabla on derivations from I*(dP_j) (k >= 0).

        For k < 0 there is nothing to iterate from; the families are then
        linked by nabla_D xi^(k) = xi^(k+1) instead (see :func:`xi_basis`).
        """
        if k < 0:
            raise ValueError("direct iteration needs k >= 0")
        d = self.d
        out = []
        for (i, j), w in zip(self.theta(0).labels, self.theta(0).forms):
            xi = istar_map(w, d.metric)
            for _ in range(k):
                xi = nabla_on_derivation(self.D.per_factor[i], xi)
            out.append(xi)
        return out


def theta_basis(engine: FamilyEngine, k: int) -> BasisFamily:
    lo, hi = DEFAULT_K_RANGE
    if not lo - 8 <= k <= hi + 8:
        raise ValueError(f"k = {k} outside the supported range")
    return engine.theta(k)


def xi_basis(engine: FamilyEngine, k: int) -> BasisFamily:
    """Populate derivations via I* and compare with the second computation path."""
    fam = engine.xi(k)
    if k >= 0:
        direct = engine.xi_direct(k)
        if direct != fam.derivations:
            raise TheoryViolation(f"commuting-diagram mismatch at k={k}")
    else:
        nxt = engine.xi(k + 1)
        for (i, _), xi, want in zip(fam.labels, fam.derivations, nxt.derivations):
            if nabla_on_derivation(engine.D.per_factor[i], xi) != want:
                raise TheoryViolation(f"commuting-diagram mismatch at k={k}")
    return fam


# -- G matrices -----------------------------------------------------------------------
@dataclass
class GMatrix:
    entries: list[list[RatFunc]]
    kind: str  # "G" or "G_k"
    k: int | None = None

    def is_polynomial(self) -> bool:
        return all(e.is_polynomial() for row in self.entries for e in row)

    def is_symmetric(self) -> bool:
        n = len(self.entries)
        return all(self.entries[i][j] == self.entries[j][i] for i in range(n) for j in range(n))

    def in_invariant_ring(self, d: CoxeterDatum) -> bool:
        return self.is_polynomial() and all(is_invariant(e, d) for row in self.entries for e in row)


def g_matrix(d: CoxeterDatum) -> GMatrix:
    dP = [OneForm.exact(p) for p in d.invariants]
    return GMatrix([[istar_pairing(a, b, d.metric) for b in dP] for a in dP], "G")


def criterion_constant(d: CoxeterDatum, forms: Sequence[OneForm], m: int) -> ExactScalar | None:
    """c with Q^m * wedge(forms) = c, or None if not a nonzero constant."""
    val = d.q_power(m) * wedge_top(forms)
    if val.is_constant() and not val.is_zero():
        return val.constant_value()
    return None


def g_k_matrix(d: CoxeterDatum, fam_k: BasisFamily, fam_next: BasisFamily) -> GMatrix:
    """G_k with [theta^(k)] = [theta^(k+1)] G_k, by Cramer's rule."""
    if fam_next.k != fam_k.k + 1:
        raise ValueError("need consecutive families")
    k = fam_k.k
    c = criterion_constant(d, fam_next.forms, 2 * k + 1)
    if c is None:
        raise TheoryViolation(f"Theta^({k + 1}) fails the basis criterion")
    scale = d.q_power(2 * k + 1).scale(c.inverse())
    n = len(fam_k.forms)
    entries = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            replaced = list(fam_next.forms)
            replaced[i] = fam_k.forms[j]
            entries[i][j] = wedge_top(replaced) * scale
    return GMatrix(entries, "G_k", k)


def apply_entrywise(D: PrimitiveDerivation, G: GMatrix) -> GMatrix:
    return GMatrix([[apply_derivation(D.total, e) for e in row] for row in G.entries], "D[G]")


def matrix_det(G: GMatrix) -> RatFunc:
    return ratfunc_matrix_det(G.entries)


def coefficient_jacobian(fd: FactorDerivation) -> RatFunc:
    """det[dh_j/dx_i] for the coefficients h_j of an irreducible factor's D."""
    h = fd.field.coeffs
    n = len(h)
    return ratfunc_matrix_det([[h[j].diff(i) for j in range(n)] for i in range(n)])
