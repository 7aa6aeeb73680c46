"""Catalog of Coxeter arrangements: roots, hyperplanes, basic invariants, Q.

Every irreducible factor is presented in a basis of its simple roots (or the
standard orthonormal basis for types A1, B and D) with an explicit Gram
matrix; the coordinate functions are the dual basis.  Products stack the
factors block-diagonally with disjoint variables.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .diffgeo import Metric, Reflection, apply_reflection
from .linalg import laplace_det
from .poly import MultiPoly, poly_matrix_det
from .ratfunc import LinearForm, RatFunc
from .scalar import ExactScalar

SQRT5 = ExactScalar.sqrt(5)
# cos(pi/5) = golden ratio / 2
COS_PI_5 = (1 + SQRT5) / 4

CATALOG_LIMITS = {"A": (1, 4), "B": (2, 3), "D": (4, 4)}
DIHEDRAL_ORDERS = (3, 4, 5, 6)


class CatalogError(ValueError):
    """Unsupported or malformed arrangement type."""


@dataclass(frozen=True)
class Hyperplane:
    alpha: LinearForm
    orbit_id: int
    factor: int

    def poly(self, variables: Sequence[str]) -> MultiPoly:
        return self.alpha.poly(variables)


@dataclass(frozen=True)
class FactorDatum:
    """One irreducible factor, in its own variables."""

    tag: str  # "A", "B", "D", "I2", "H3"
    rank: int
    param: int  # the dihedral order for I2, else the rank
    variables: tuple[str, ...]
    offset: int  # position of the first variable in the ambient ring
    metric: Metric
    simple_roots: tuple[tuple[ExactScalar, ...], ...]  # root vectors
    positive_roots: tuple[tuple[ExactScalar, ...], ...]
    invariants: tuple[MultiPoly, ...]
    degrees: tuple[int, ...]
    discriminant: int

    @property
    def name(self) -> str:
        if self.tag == "I2":
            return f"I2({self.param})"
        if self.tag == "H3":
            return "H3"
        return f"{self.tag}{self.rank}"

    @property
    def exponents(self) -> tuple[int, ...]:
        return tuple(d - 1 for d in self.degrees)

    @property
    def coxeter_number(self) -> int:
        return self.degrees[-1]

    @property
    def positions(self) -> tuple[int, ...]:
        return tuple(range(self.offset, self.offset + self.rank))

    def root_form(self, root: Sequence[ExactScalar]) -> tuple[ExactScalar, ...]:
        """Covector (root, .) in this factor's coordinates."""
        g = self.metric.gram
        return tuple(sum((g[i][j] * root[j] for j in range(self.rank)), ExactScalar(0)) for i in range(self.rank))

    def reflections(self) -> list[Reflection]:
        return [Reflection.along(self.root_form(a), self.metric) for a in self.simple_roots]

    def root_length(self, root: Sequence[ExactScalar]) -> ExactScalar:
        return sum((a * b for a, b in zip(self.root_form(root), root)), ExactScalar(0))


@dataclass(frozen=True)
class CoxeterDatum:
    factors: tuple[FactorDatum, ...]
    variables: tuple[str, ...]
    metric: Metric
    hyperplanes: tuple[Hyperplane, ...]
    invariants: tuple[MultiPoly, ...]  # ordered by (factor, degree)
    orbit_names: tuple[str, ...]
    Q: MultiPoly
    jacobian_constant: ExactScalar

    @property
    def name(self) -> str:
        return "x".join(f.name for f in self.factors)

    @property
    def rank(self) -> int:
        return len(self.variables)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(d for f in self.factors for d in f.degrees)

    @property
    def exponents(self) -> tuple[int, ...]:
        return tuple(d - 1 for d in self.degrees)

    @property
    def coxeter_numbers(self) -> tuple[int, ...]:
        return tuple(f.coxeter_number for f in self.factors)

    @property
    def discriminant(self) -> int:
        return max((f.discriminant for f in self.factors), default=0)

    def factor_of_invariant(self, j: int) -> int:
        """Index of the factor owning the j-th invariant."""
        for i, f in enumerate(self.factors):
            if j < f.rank:
                return i
            j -= f.rank
        raise IndexError(j)

    def factor_invariants(self, i: int) -> tuple[MultiPoly, ...]:
        start = sum(f.rank for f in self.factors[:i])
        return self.invariants[start:start + self.factors[i].rank]

    def embed(self, p: MultiPoly, factor: int) -> MultiPoly:
        f = self.factors[factor]
        return p.embed(self.variables, f.positions)

    def q_factors(self) -> dict[LinearForm, int]:
        return {h.alpha: 1 for h in self.hyperplanes}

    def q_power(self, m: MultiplicityMap | int) -> RatFunc:
        """Q^m = prod alpha_H^m(H) as an exact rational function."""
        if isinstance(m, int):
            exps = {h.alpha: m for h in self.hyperplanes}
        else:
            exps = {h.alpha: m[h] for h in self.hyperplanes}
        return RatFunc.linear_product(self.variables, exps)

    def reflections(self) -> list[Reflection]:
        """Simple reflections of all factors, acting on the ambient space."""
        out = []
        for i, f in enumerate(self.factors):
            for a in f.simple_roots:
                cov = [ExactScalar(0)] * self.rank
                for p, c in zip(f.positions, f.root_form(a)):
                    cov[p] = c
                out.append(Reflection.along(cov, self.metric))
        return out

    def orbits(self) -> list[list[Hyperplane]]:
        out: list[list[Hyperplane]] = [[] for _ in self.orbit_names]
        for h in self.hyperplanes:
            out[h.orbit_id].append(h)
        return out

    def normalization_note(self) -> str:
        parts = [f"P{j + 1}={p}" for j, p in enumerate(self.invariants)]
        return "; ".join(parts) + f"; Q=product of normalized alpha_H (first nonzero coefficient 1) = {self.Q}"


@dataclass(frozen=True)
class MultiplicityMap:
    """Integer multiplicity on every hyperplane of a datum."""

    values: tuple[tuple[LinearForm, int], ...]
    description: str

    def __getitem__(self, h: Hyperplane | LinearForm) -> int:
        alpha = h.alpha if isinstance(h, Hyperplane) else h
        for a, v in self.values:
            if a == alpha:
                return v
        raise KeyError(alpha)

    def as_dict(self) -> dict[LinearForm, int]:
        return dict(self.values)

    def shifted(self, s: int) -> MultiplicityMap:
        return MultiplicityMap(tuple((a, v + s) for a, v in self.values), _shift_description(self.description, s))

    def negated(self) -> MultiplicityMap:
        return MultiplicityMap(tuple((a, -v) for a, v in self.values), f"neg({self.description})")

    @classmethod
    def constant(cls, d: CoxeterDatum, value: int) -> MultiplicityMap:
        return cls(tuple((h.alpha, value) for h in d.hyperplanes), f"const:{value}")

    @classmethod
    def per_orbit(cls, d: CoxeterDatum, values: Mapping[str | int, int]) -> MultiplicityMap:
        """Orbit-constant map; keys are orbit names or orbit indices."""
        by_id: dict[int, int] = {}
        for key, v in values.items():
            if isinstance(key, int) or (isinstance(key, str) and key.isdigit()):
                oid = int(key)
                if not 0 <= oid < len(d.orbit_names):
                    raise ValueError(f"no orbit with index {oid}")
            elif key in d.orbit_names:
                oid = d.orbit_names.index(key)
            else:
                raise ValueError(f"unknown orbit {key!r}; orbits are {', '.join(d.orbit_names)}")
            by_id[oid] = v
        missing = [d.orbit_names[i] for i in range(len(d.orbit_names)) if i not in by_id]
        if missing:
            raise ValueError(f"multiplicity missing for orbit(s) {', '.join(missing)}")
        desc = "orbit:" + ",".join(f"{d.orbit_names[i]}={by_id[i]}" for i in sorted(by_id))
        return cls(tuple((h.alpha, by_id[h.orbit_id]) for h in d.hyperplanes), desc)

    @classmethod
    def parse(cls, d: CoxeterDatum, text: str) -> MultiplicityMap:
        """'const:-1' or 'orbit:long=1,short=-1'."""
        kind, _, body = text.strip().partition(":")
        if kind == "const":
            try:
                return cls.constant(d, int(body))
            except ValueError:
                raise ValueError(f"bad constant multiplicity {text!r}") from None
        if kind == "orbit":
            values: dict[str, int] = {}
            for item in body.split(","):
                name, eq, v = item.partition("=")
                if not eq:
                    raise ValueError(f"bad orbit assignment {item!r}")
                try:
                    values[name.strip()] = int(v)
                except ValueError:
                    raise ValueError(f"bad orbit multiplicity {item!r}") from None
            return cls.per_orbit(d, values)
        raise ValueError(f"multiplicity must start with 'const:' or 'orbit:', got {text!r}")


def _shift_description(desc: str, s: int) -> str:
    if desc.startswith("const:"):
        return f"const:{int(desc[6:]) + s}"
    if desc.startswith("orbit:"):
        items = [item.partition("=") for item in desc[6:].split(",")]
        return "orbit:" + ",".join(f"{n}={int(v) + s}" for n, _, v in items)
    return f"({desc})+{s}"


# -- irreducible factors -----------------------------------------------------------
def _elementary_symmetric(values: Sequence[MultiPoly], j: int) -> MultiPoly:
    # coefficients of prod (1 + v t), built incrementally
    zero = MultiPoly.zero(values[0].variables)
    e = [MultiPoly.one(values[0].variables)] + [zero] * j
    for v in values:
        for k in range(j, 0, -1):
            e[k] = e[k] + e[k - 1] * v
    return e[j]


def _covector_orbit(start: Sequence[ExactScalar], reflections: Sequence[Reflection]) -> list[tuple[ExactScalar, ...]]:
    seen = {tuple(start)}
    frontier = [tuple(start)]
    while frontier:
        nxt = []
        for c in frontier:
            for s in reflections:
                img = tuple(s.apply_covector(c))
                if img not in seen:
                    seen.add(img)
                    nxt.append(img)
        frontier = nxt
    return sorted(seen, key=lambda c: [(x.rational, x.surd) for x in c])


def _orbit_power_sum(variables, start, reflections, degree) -> MultiPoly:
    total = MultiPoly.zero(variables)
    for c in _covector_orbit(start, reflections):
        total = total + MultiPoly.linear(variables, c) ** degree
    if total.is_zero():
        raise CatalogError("orbit power sum vanished")
    return total.scale(total.leading_coefficient().inverse())


def _root_closure(simple: Sequence[tuple[ExactScalar, ...]], reflections: Sequence[Reflection]):
    seen = set(simple)
    frontier = list(simple)
    while frontier:
        nxt = []
        for r in frontier:
            for s in reflections:
                img = tuple(s.apply_vector(r))
                if img not in seen:
                    seen.add(img)
                    nxt.append(img)
        frontier = nxt
    return seen


def _std_vectors(n: int, rows: Sequence[Sequence[int]]) -> tuple[tuple[ExactScalar, ...], ...]:
    return tuple(tuple(ExactScalar(x) for x in r) for r in rows)


def build_irreducible(tag: str, param: int, variables: Sequence[str] | None = None, offset: int = 0) -> FactorDatum:
    """Construct an irreducible factor.  ``param`` is the rank, or m for I2(m)."""
    tag = tag.upper()
    if tag == "I2":
        if param not in DIHEDRAL_ORDERS:
            raise CatalogError(f"I2(m) supported for m in {DIHEDRAL_ORDERS}, got {param}")
        rank = 2
    elif tag == "H3":
        rank = 3
    elif tag in CATALOG_LIMITS:
        lo, hi = CATALOG_LIMITS[tag]
        if not lo <= param <= hi:
            raise CatalogError(f"type {tag} supported for rank {lo}..{hi}, got {param}")
        rank = param
    else:
        raise CatalogError(f"unsupported type {tag!r}")
    if variables is None:
        variables = default_variables(rank)
    variables = tuple(variables)
    if len(variables) != rank:
        raise CatalogError("variable count does not match the rank")
    x = [MultiPoly.var(variables, v) for v in variables]
    half = Fraction(1, 2)
    d = 0

    if tag == "A" and rank == 1:
        gram = [[1]]
        simple = _std_vectors(1, [[1]])
        metric = Metric.from_gram(gram)
        invariants = [(x[0] ** 2).scale(half)]
    elif tag == "A":
        # simple-root basis; Gram = Cartan matrix
        gram = [[2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(rank)] for i in range(rank)]
        metric = Metric.from_gram(gram)
        simple = _std_vectors(rank, [[int(i == j) for j in range(rank)] for i in range(rank)])
        # standard coordinates u_j = x_j - x_{j-1} of the vector sum x_i alpha_i
        zero = MultiPoly.zero(variables)
        u = [(x[j] if j < rank else zero) - (x[j - 1] if j > 0 else zero) for j in range(rank + 1)]
        invariants = [sum((uj ** k for uj in u), zero).scale(Fraction(1, k)) for k in range(2, rank + 2)]
    elif tag in ("B", "D"):
        metric = Metric.identity(rank)
        rows = [[int(j == i) - int(j == i + 1) for j in range(rank)] for i in range(rank - 1)]
        if tag == "B":
            rows.append([int(j == rank - 1) for j in range(rank)])
        else:
            rows.append([int(j >= rank - 2) for j in range(rank)])
        simple = _std_vectors(rank, rows)
        squares = [(xi ** 2).scale(half) for xi in x]
        if tag == "B":
            invariants = [_elementary_symmetric(squares, j) for j in range(1, rank + 1)]
        else:
            prod = MultiPoly.one(variables)
            for xi in x:
                prod = prod * xi
            invariants = [_elementary_symmetric(squares, j) for j in range(1, rank)] + [prod]
    else:
        if tag == "I2":
            m = param
            if m == 5:
                gram = [[1, -COS_PI_5], [-COS_PI_5, 1]]
                d = 5
            else:
                # roots scaled so that the Gram matrix stays rational
                gram = {3: [[1, Fraction(-1, 2)], [Fraction(-1, 2), 1]],
                        4: [[1, -1], [-1, 2]],
                        6: [[1, Fraction(-3, 2)], [Fraction(-3, 2), 3]]}[m]
            top = m
        else:
            gram = [[1, Fraction(-1, 2), 0], [Fraction(-1, 2), 1, -COS_PI_5], [0, -COS_PI_5, 1]]
            d = 5
        metric = Metric.from_gram(gram)
        simple = _std_vectors(rank, [[int(i == j) for j in range(rank)] for i in range(rank)])
        refl = [Reflection.along(metric.gram[i], metric) for i in range(rank)]
        quad = MultiPoly.zero(variables)
        for i in range(rank):
            for j in range(rank):
                if metric.gram[i][j]:
                    quad = quad + (x[i] * x[j]).scale(metric.gram[i][j] * half)
        # orbit of the coordinate form x_1, i.e. of a vector on a reflecting line
        start = [ExactScalar(int(j == 0)) for j in range(rank)]
        if tag == "I2":
            invariants = [quad, _orbit_power_sum(variables, start, refl, top)]
        else:
            invariants = [quad] + [_orbit_power_sum(variables, start, refl, k) for k in (6, 10)]

    invariants = sorted(invariants, key=MultiPoly.total_degree)
    degrees = tuple(p.total_degree() for p in invariants)
    factor = FactorDatum(
        tag=tag, rank=rank, param=param if tag == "I2" else rank, variables=variables, offset=offset,
        metric=metric, simple_roots=simple, positive_roots=(), invariants=tuple(invariants),
        degrees=degrees, discriminant=d,
    )
    roots = _root_closure(simple, factor.reflections())
    positive: dict[LinearForm, tuple[ExactScalar, ...]] = {}
    for r in sorted(roots, key=lambda c: [(v.rational, v.surd) for v in c], reverse=True):
        lf = LinearForm(factor.root_form(r))
        positive.setdefault(lf, r)
    return FactorDatum(
        tag=tag, rank=rank, param=factor.param, variables=variables, offset=offset, metric=metric,
        simple_roots=simple, positive_roots=tuple(positive.values()), invariants=tuple(invariants),
        degrees=degrees, discriminant=d,
    )


def default_variables(n: int) -> tuple[str, ...]:
    if n <= 4:
        return ("x", "y", "z", "w")[:n]
    return tuple(f"x{i + 1}" for i in range(n))


def jacobian_determinant(invariants: Sequence[MultiPoly]) -> MultiPoly:
    n = len(invariants)
    rows = [[invariants[j].diff(i) for j in range(n)] for i in range(n)]
    variables = invariants[0].variables
    if n <= 4:
        return laplace_det(rows, MultiPoly.zero(variables), MultiPoly.one(variables))
    return poly_matrix_det(rows)


def product(factors: Sequence[FactorDatum | CoxeterDatum]) -> CoxeterDatum:
    """Assemble a (possibly reducible) datum with disjoint coordinates."""
    irreducible: list[FactorDatum] = []
    for f in factors:
        irreducible.extend(f.factors if isinstance(f, CoxeterDatum) else [f])
    if not irreducible:
        raise CatalogError("need at least one factor")
    dims = [f.rank for f in irreducible]
    fields = {f.discriminant for f in irreducible} - {0}
    if len(fields) > 1:
        raise CatalogError("factors need different quadratic fields")
    variables = default_variables(sum(dims))
    rebuilt: list[FactorDatum] = []
    offset = 0
    for f in irreducible:
        own = variables[offset:offset + f.rank]
        rebuilt.append(_rename(f, own, offset))
        offset += f.rank
    return _assemble(tuple(rebuilt), variables)


def _rename(f: FactorDatum, variables: tuple[str, ...], offset: int) -> FactorDatum:
    if f.variables == variables and f.offset == offset:
        return f
    return FactorDatum(
        tag=f.tag, rank=f.rank, param=f.param, variables=variables, offset=offset, metric=f.metric,
        simple_roots=f.simple_roots, positive_roots=f.positive_roots,
        invariants=tuple(MultiPoly(variables, p.terms()) for p in f.invariants),
        degrees=f.degrees, discriminant=f.discriminant,
    )


def _assemble(factors: tuple[FactorDatum, ...], variables: tuple[str, ...]) -> CoxeterDatum:
    metric = factors[0].metric
    for f in factors[1:]:
        metric = metric.block_sum(f.metric)
    n = len(variables)

    hyperplanes: list[Hyperplane] = []
    orbit_names: list[str] = []
    invariants: list[MultiPoly] = []
    for i, f in enumerate(factors):
        refl = f.reflections()
        forms = sorted({LinearForm(f.root_form(r)) for r in f.positive_roots},
                       key=lambda lf: [(-c.rational, -c.surd) for c in lf.coefficients])
        # orbit decomposition by closure under the simple reflections
        orbit_of: dict[LinearForm, int] = {}
        local: list[list[LinearForm]] = []
        for lf in forms:
            if lf in orbit_of:
                continue
            oid = len(local)
            members = [lf]
            orbit_of[lf] = oid
            stack = [lf]
            while stack:
                cur = stack.pop()
                for s in refl:
                    img = LinearForm(s.apply_covector(cur.coefficients))
                    if img not in orbit_of:
                        orbit_of[img] = oid
                        members.append(img)
                        stack.append(img)
            local.append(members)
        names = _orbit_labels(f, local)
        prefix = f"{i + 1}." if len(factors) > 1 else ""
        base = len(orbit_names)
        orbit_names.extend(prefix + nm for nm in names)
        for lf in forms:
            big = [ExactScalar(0)] * n
            for p, c in zip(f.positions, lf.coefficients):
                big[p] = c
            hyperplanes.append(Hyperplane(LinearForm(big), base + orbit_of[lf], i))
        invariants.extend(p.embed(variables, f.positions) for p in f.invariants)

    Q = MultiPoly.one(variables)
    for h in hyperplanes:
        Q = Q * h.poly(variables)
    jac = jacobian_determinant(invariants)
    c = jac.try_divide(Q)
    if c is None or not c.is_constant() or c.is_zero():
        raise CatalogError("Jacobian self-test failed: det of the invariant Jacobian is not c*Q")
    return CoxeterDatum(
        factors=factors, variables=variables, metric=metric, hyperplanes=tuple(hyperplanes),
        invariants=tuple(invariants), orbit_names=tuple(orbit_names), Q=Q,
        jacobian_constant=c.constant_value(),
    )


def _orbit_labels(f: FactorDatum, orbits: list[list[LinearForm]]) -> list[str]:
    if len(orbits) == 1:
        return ["all"]
    by_form = {LinearForm(f.root_form(r)): f.root_length(r) for r in f.positive_roots}
    lengths = [by_form[members[0]] for members in orbits]
    if len(orbits) == 2 and lengths[0] != lengths[1]:
        return ["long", "short"] if lengths[0] > lengths[1] else ["short", "long"]
    return [str(j) for j in range(len(orbits))]


# -- type strings ------------------------------------------------------------------
_FACTOR_RE = re.compile(r"^(?:([ABD])(\d+)|I2\((\d+)\)|(H3))$")


def parse_type(text: str) -> list[tuple[str, int]]:
    """'A1xB2xI2(5)' -> [('A', 1), ('B', 2), ('I2', 5)] (case-insensitive)."""
    s = text.strip().upper().replace(" ", "")
    if not s:
        raise CatalogError("empty type string")
    out = []
    for part in s.split("X"):
        m = _FACTOR_RE.match(part)
        if not m:
            raise CatalogError(f"cannot parse arrangement factor {part!r} in {text!r}")
        if m.group(1):
            out.append((m.group(1), int(m.group(2))))
        elif m.group(3):
            out.append(("I2", int(m.group(3))))
        else:
            out.append(("H3", 3))
    return out


_CACHE: dict[str, CoxeterDatum] = {}


def build(text: str) -> CoxeterDatum:
    """Datum for a type string such as 'A1xB2'; cached per canonical name."""
    parsed = parse_type(text)
    key = "x".join(f"I2({p})" if t == "I2" else (t if t == "H3" else f"{t}{p}") for t, p in parsed)
    if key not in _CACHE:
        _CACHE[key] = product([build_irreducible(t, p) for t, p in parsed])
    return _CACHE[key]


def orbit_decomposition(d: CoxeterDatum) -> list[list[Hyperplane]]:
    return d.orbits()


def is_invariant(obj, d: CoxeterDatum) -> bool:
    """Fixed by every simple reflection of d."""
    return all(apply_reflection(obj, s) == obj for s in d.reflections())
