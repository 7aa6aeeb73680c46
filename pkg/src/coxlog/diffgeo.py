"""Rational 1-forms, derivations, the metric pairing and covariant derivatives.

Everything is expressed in one fixed linear coordinate system ``x_1..x_l`` of
``V``.  ``Metric.gram`` is the Gram matrix of the basis of ``V`` dual to those
coordinates, so the induced pairing on covectors uses its inverse.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

from .linalg import ratfunc_matrix_det, scalar_det, scalar_inverse
from .poly import MultiPoly
from .ratfunc import LinearForm, RatFunc
from .scalar import ExactScalar, Number

Coefficient = Union[RatFunc, MultiPoly, int, ExactScalar]


def _as_ratfunc(c: Coefficient, variables: tuple[str, ...]) -> RatFunc:
    if isinstance(c, RatFunc):
        if c.variables != variables:
            raise ValueError("coefficient lives in a different ring")
        return c
    if isinstance(c, MultiPoly):
        return RatFunc(c)
    return RatFunc(MultiPoly.constant(variables, c))


class _Field:
    """Shared storage for OneForm / DerivationField: a vector of RatFunc."""

    __slots__ = ("variables", "coeffs")

    def __init__(self, variables: Sequence[str], coeffs: Sequence[Coefficient]) -> None:
        variables = tuple(variables)
        if len(coeffs) != len(variables):
            raise ValueError(f"expected {len(variables)} coefficients, got {len(coeffs)}")
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "coeffs", tuple(_as_ratfunc(c, variables) for c in coeffs))

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    @classmethod
    def zero(cls, variables: Sequence[str]):
        variables = tuple(variables)
        return cls(variables, [0] * len(variables))

    @property
    def dim(self) -> int:
        return len(self.variables)

    def _check(self, other) -> None:
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.variables != self.variables:
            raise ValueError("dimension or variable mismatch")

    def __add__(self, other):
        self._check(other)
        return type(self)(self.variables, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        self._check(other)
        return type(self)(self.variables, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return type(self)(self.variables, [-a for a in self.coeffs])

    def __mul__(self, f: Coefficient):
        f = _as_ratfunc(f, self.variables)
        return type(self)(self.variables, [f * a for a in self.coeffs])

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        return type(other) is type(self) and self.variables == other.variables and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.coeffs))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def is_polynomial(self) -> bool:
        return all(c.is_polynomial() for c in self.coeffs)

    def degree(self) -> int | None:
        """Common homogeneity degree of the nonzero coefficients, if any."""
        degs = {c.degree() for c in self.coeffs if not c.is_zero()}
        if len(degs) != 1 or None in degs:
            return None
        return degs.pop()


class OneForm(_Field):
    """omega = sum_i coeffs[i] dx_i."""

    __slots__ = ()

    @classmethod
    def exact(cls, f: MultiPoly | RatFunc) -> OneForm:
        """The differential df."""
        if isinstance(f, MultiPoly):
            return cls(f.variables, [f.diff(i) for i in range(f.nvars)])
        return cls(f.variables, [f.diff(i) for i in range(len(f.variables))])

    @classmethod
    def of_linear(cls, variables: Sequence[str], alpha: LinearForm) -> OneForm:
        return cls(variables, list(alpha.coefficients))

    def __str__(self) -> str:
        parts = [f"({c})*d{v}" for c, v in zip(self.coeffs, self.variables) if not c.is_zero()]
        return " + ".join(parts) if parts else "0"

    def __repr__(self) -> str:
        return f"OneForm({self})"


class DerivationField(_Field):
    """xi = sum_i coeffs[i] d/dx_i.

    Derivations with factored denominators cache a common-denominator form so
    repeated application to large rational functions stays cheap.
    """

    __slots__ = ("_common",)

    def __init__(self, variables: Sequence[str], coeffs: Sequence[Coefficient]) -> None:
        super().__init__(variables, coeffs)
        object.__setattr__(self, "_common", None)

    def on_linear(self, alpha: LinearForm | Sequence[Number]) -> RatFunc:
        """xi(alpha) = sum_i h_i * alpha_i."""
        coeffs = alpha.coefficients if isinstance(alpha, LinearForm) else alpha
        if len(coeffs) != self.dim:
            raise ValueError("linear form dimension mismatch")
        common = self.common_denominator()
        if common is None:
            return RatFunc.combine(coeffs, self.coeffs)
        nums, need = common
        num = MultiPoly.zero(self.variables)
        for p, a in zip(nums, coeffs):
            a = ExactScalar.coerce(a)
            if a:
                num = num + p.scale(a)
        return RatFunc.factored(num, need)

    def common_denominator(self):
        """(numerators a_i, factors B) with h_i = a_i / B, or None if unfactored."""
        if self._common is None:
            need: dict[LinearForm, int] = {}
            for h in self.coeffs:
                fs = h.denominator_factors
                if fs is None:
                    object.__setattr__(self, "_common", False)
                    return None
                for lf, e in fs:
                    need[lf] = max(need.get(lf, 0), e)
            v = self.variables
            nums = []
            for h in self.coeffs:
                have = dict(h.denominator_factors)
                p = h.num
                for lf, e in need.items():
                    if e - have.get(lf, 0):
                        p = p * lf.poly(v) ** (e - have.get(lf, 0))
                nums.append(p)
            object.__setattr__(self, "_common", (nums, need))
        return self._common or None

    def __str__(self) -> str:
        parts = [f"({c})*D{v}" for c, v in zip(self.coeffs, self.variables) if not c.is_zero()]
        return " + ".join(parts) if parts else "0"

    def __repr__(self) -> str:
        return f"DerivationField({self})"


@dataclass(frozen=True)
class Metric:
    """Gram matrix of the coordinate basis of V and its inverse."""

    gram: tuple[tuple[ExactScalar, ...], ...]
    inverse_gram: tuple[tuple[ExactScalar, ...], ...]

    @classmethod
    def from_gram(cls, gram: Sequence[Sequence[Number]]) -> Metric:
        g = tuple(tuple(ExactScalar.coerce(x) for x in row) for row in gram)
        n = len(g)
        if any(len(r) != n for r in g):
            raise ValueError("Gram matrix must be square")
        if any(g[i][j] != g[j][i] for i in range(n) for j in range(n)):
            raise ValueError("Gram matrix must be symmetric")
        for k in range(1, n + 1):
            if scalar_det([row[:k] for row in g[:k]]).sign() <= 0:
                raise ValueError("Gram matrix must be positive definite")
        inv = tuple(tuple(r) for r in scalar_inverse(g))
        return cls(g, inv)

    @classmethod
    def identity(cls, n: int) -> Metric:
        return cls.from_gram([[int(i == j) for j in range(n)] for i in range(n)])

    @property
    def dim(self) -> int:
        return len(self.gram)

    def block_sum(self, other: Metric) -> Metric:
        n, m = self.dim, other.dim
        zero = ExactScalar(0)

        def block(a, b):
            rows = [tuple(r) + (zero,) * m for r in a]
            rows += [(zero,) * n + tuple(r) for r in b]
            return tuple(rows)

        return Metric(block(self.gram, other.gram), block(self.inverse_gram, other.inverse_gram))

    def covector_product(self, a: Sequence[Number], b: Sequence[Number]) -> ExactScalar:
        """I*(a, b) for constant covectors."""
        a = [ExactScalar.coerce(x) for x in a]
        b = [ExactScalar.coerce(x) for x in b]
        acc = ExactScalar(0)
        for i in range(self.dim):
            if a[i]:
                for j in range(self.dim):
                    if b[j] and self.inverse_gram[i][j]:
                        acc = acc + a[i] * self.inverse_gram[i][j] * b[j]
        return acc

    def vector_of(self, alpha: Sequence[Number]) -> list[ExactScalar]:
        """Coordinates of the vector v with (v, .) = alpha."""
        return [sum((self.inverse_gram[i][j] * ExactScalar.coerce(alpha[j]) for j in range(self.dim)),
                    ExactScalar(0)) for i in range(self.dim)]


def _check_dim(n: int, g: Metric) -> None:
    if n != g.dim:
        raise ValueError(f"dimension mismatch: {n} vs metric of dimension {g.dim}")


def istar_pairing(omega: OneForm, eta: OneForm, g: Metric) -> RatFunc:
    """I*(omega, eta) = coeffs(omega)^T G^{-1} coeffs(eta)."""
    _check_dim(omega.dim, g)
    _check_dim(eta.dim, g)
    if omega.variables != eta.variables:
        raise ValueError("forms live in different rings")
    if all(a.is_constant() for a in omega.coeffs):
        # common case omega = d(alpha): contract G^{-1} with the constant covector first
        a = [c.constant_value() if not c.is_zero() else ExactScalar(0) for c in omega.coeffs]
        v = [sum((g.inverse_gram[j][i] * a[i] for i in range(g.dim)), ExactScalar(0)) for j in range(g.dim)]
        return RatFunc.combine(v, eta.coeffs)
    terms = []
    for i, a in enumerate(omega.coeffs):
        if a.is_zero():
            continue
        inner = RatFunc.combine(g.inverse_gram[i], eta.coeffs)
        terms.append(a * inner)
    if not terms:
        return RatFunc(MultiPoly.zero(omega.variables))
    return RatFunc.combine([1] * len(terms), terms)


def istar_map(omega: OneForm, g: Metric) -> DerivationField:
    """The derivation I*(omega) with I*(omega)(f) = I*(omega, df)."""
    _check_dim(omega.dim, g)
    out = []
    for i in range(g.dim):
        out.append(RatFunc.combine(g.inverse_gram[i], omega.coeffs))
    return DerivationField(omega.variables, out)


def istar_inverse(xi: DerivationField, g: Metric) -> OneForm:
    _check_dim(xi.dim, g)
    out = []
    for i in range(g.dim):
        out.append(RatFunc.combine(g.gram[i], xi.coeffs))
    return OneForm(xi.variables, out)


def wedge_top(forms: Sequence[OneForm]) -> RatFunc:
    """c with omega_1 ^ ... ^ omega_l = c dx_1 ^ ... ^ dx_l."""
    if not forms:
        raise ValueError("need at least one form")
    n = forms[0].dim
    if len(forms) != n:
        raise ValueError(f"top wedge needs exactly {n} forms, got {len(forms)}")
    matrix = [[forms[j].coeffs[i] for j in range(n)] for i in range(n)]
    return ratfunc_matrix_det(matrix)


def apply_derivation(xi: DerivationField, f: RatFunc | MultiPoly) -> RatFunc:
    """xi(f) = sum_i h_i df/dx_i, exact."""
    if isinstance(f, MultiPoly):
        f = RatFunc(f)
    if f.variables != xi.variables:
        raise ValueError("derivation and function live in different rings")
    if f.is_constant():
        return RatFunc(MultiPoly.zero(f.variables))
    common = xi.common_denominator()
    fs = f.denominator_factors
    if common is None or fs is None:
        acc = RatFunc(MultiPoly.zero(f.variables))
        for i, h in enumerate(xi.coeffs):
            if not h.is_zero():
                acc = acc + h * f.diff(i)
        return acc
    # f = p / prod l^e, h_i = a_i / B:
    # xi(f) = (L * sum a_i dp/dx_i - p * sum_l e_l a(l) L/l) / (B * prod l^e * L)
    nums, bfac = common
    v = f.variables
    p = f.num
    L = MultiPoly.one(v)
    for lf, _ in fs:
        L = L * lf.poly(v)
    grad = MultiPoly.zero(v)
    for i, a in enumerate(nums):
        if not a.is_zero():
            grad = grad + a * p.diff(i)
    log_part = MultiPoly.zero(v)
    for lf, e in fs:
        a_l = MultiPoly.zero(v)
        for a, c in zip(nums, lf.coefficients):
            if c and not a.is_zero():
                a_l = a_l + a.scale(c)
        if not a_l.is_zero():
            log_part = log_part + (a_l * L.divexact(lf.poly(v))).scale(e)
    num = grad * L - p * log_part
    den: dict[LinearForm, int] = dict(bfac)
    for lf, e in fs:
        den[lf] = den.get(lf, 0) + e + 1
    return RatFunc.factored(num, den)


def nabla_on_form(D: DerivationField, omega: OneForm) -> OneForm:
    """Covariant derivative: coefficient-wise D in linear coordinates."""
    if D.variables != omega.variables:
        raise ValueError("derivation and form live in different rings")
    return OneForm(omega.variables, [apply_derivation(D, c) for c in omega.coeffs])


def nabla_on_derivation(D: DerivationField, xi: DerivationField) -> DerivationField:
    if D.variables != xi.variables:
        raise ValueError("derivations live in different rings")
    return DerivationField(xi.variables, [apply_derivation(D, c) for c in xi.coeffs])


# -- reflections -----------------------------------------------------------------
@dataclass(frozen=True)
class Reflection:
    """Orthogonal reflection s(v) = v - 2 (alpha, v)/(alpha, alpha) a.

    ``covector`` holds the coefficients of alpha in the coordinates and
    ``vector`` the coordinates of the root a itself (a = G^{-1} alpha).
    """

    covector: tuple[ExactScalar, ...]
    vector: tuple[ExactScalar, ...]
    factor: ExactScalar  # 2 / alpha(a)

    @classmethod
    def along(cls, alpha: LinearForm | Sequence[Number], g: Metric) -> Reflection:
        cov = tuple(ExactScalar.coerce(c) for c in (alpha.coefficients if isinstance(alpha, LinearForm) else alpha))
        _check_dim(len(cov), g)
        vec = tuple(g.vector_of(cov))
        norm = sum((c * a for c, a in zip(cov, vec)), ExactScalar(0))
        if norm.is_zero():
            raise ValueError("cannot reflect along the zero form")
        return cls(cov, vec, ExactScalar(2) / norm)

    def matrix(self) -> list[list[ExactScalar]]:
        """M with s(x) = M x in coordinates."""
        n = len(self.vector)
        return [[ExactScalar(int(i == j)) - self.factor * self.vector[i] * self.covector[j] for j in range(n)]
                for i in range(n)]

    def apply_vector(self, v: Sequence[Number]) -> list[ExactScalar]:
        t = self.factor * sum((c * ExactScalar.coerce(x) for c, x in zip(self.covector, v)), ExactScalar(0))
        return [ExactScalar.coerce(x) - t * a for x, a in zip(v, self.vector)]

    def apply_covector(self, alpha: Sequence[Number]) -> list[ExactScalar]:
        """alpha o s (the pullback of a linear form)."""
        alpha = [ExactScalar.coerce(x) for x in alpha]
        t = self.factor * sum((c * a for c, a in zip(alpha, self.vector)), ExactScalar(0))
        return [c - t * b for c, b in zip(alpha, self.covector)]


def _pull_poly(p: MultiPoly, s: Reflection) -> MultiPoly:
    if p.is_constant():
        return p
    t = MultiPoly.linear(p.variables, [s.factor * c for c in s.covector])
    return p.rank_one_shift(s.vector, t)


def _pull_ratfunc(f: RatFunc, s: Reflection) -> RatFunc:
    num = _pull_poly(f.num, s)
    fs = f.denominator_factors
    if fs is None:
        return RatFunc(num, _pull_poly(f.den, s))
    factors: dict[LinearForm, int] = {}
    scalar = ExactScalar(1)
    for lf, e in fs:
        img = LinearForm(s.apply_covector(lf.coefficients))
        factors[img] = factors.get(img, 0) + e
        scalar = scalar * img.scale ** e
    return RatFunc.factored(num, factors, scalar)


def reflect(obj, root: LinearForm | Sequence[Number], g: Metric):
    """Act by the reflection through ker(root) on a polynomial, rational
    function, 1-form (pullback) or derivation (pushforward)."""
    s = Reflection.along(root, g)
    return apply_reflection(obj, s)


def apply_reflection(obj, s: Reflection):
    if isinstance(obj, MultiPoly):
        _check_dim(obj.nvars, Metric.identity(len(s.vector)))
        return _pull_poly(obj, s)
    if isinstance(obj, RatFunc):
        return _pull_ratfunc(obj, s)
    if isinstance(obj, (OneForm, DerivationField)):
        n = obj.dim
        pulled = [_pull_ratfunc(c, s) for c in obj.coeffs]
        M = s.matrix()
        out = []
        for j in range(n):
            # forms: (M^T f(Mx))_j ; derivations: (M h(Mx))_j
            row = [M[i][j] if isinstance(obj, OneForm) else M[j][i] for i in range(n)]
            out.append(RatFunc.combine(row, pulled))
        return type(obj)(obj.variables, out)
    raise TypeError(f"cannot reflect a {type(obj).__name__}")
