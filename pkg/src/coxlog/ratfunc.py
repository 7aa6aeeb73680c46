"""Rational functions, linear forms and pole orders along hyperplanes."""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

from .poly import MultiPoly, parse_poly, poly_gcd
from .scalar import ExactScalar, Number


class LinearForm:
    """Nonzero linear form, scaled so its first nonzero coefficient is 1."""

    __slots__ = ("coefficients", "scale", "_polys")

    def __init__(self, coefficients: Sequence[Number]) -> None:
        coeffs = tuple(ExactScalar.coerce(c) for c in coefficients)
        lead = next((c for c in coeffs if not c.is_zero()), None)
        if lead is None:
            raise ValueError("linear form must be nonzero")
        inv = lead.inverse()
        object.__setattr__(self, "coefficients", tuple(c * inv for c in coeffs))
        # original = scale * normalized
        object.__setattr__(self, "scale", lead)
        object.__setattr__(self, "_polys", {})

    def __setattr__(self, name, value):
        raise AttributeError("LinearForm is immutable")

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LinearForm) and self.coefficients == other.coefficients

    def __hash__(self) -> int:
        return hash(self.coefficients)

    def __len__(self) -> int:
        return len(self.coefficients)

    def poly(self, variables: Sequence[str]) -> MultiPoly:
        variables = tuple(variables)
        p = self._polys.get(variables)
        if p is None:
            p = MultiPoly.linear(variables, self.coefficients)
            self._polys[variables] = p
        return p

    def __call__(self, vector: Sequence[Number]) -> ExactScalar:
        return sum((c * ExactScalar.coerce(v) for c, v in zip(self.coefficients, vector)), ExactScalar(0))

    @classmethod
    def from_poly(cls, p: MultiPoly) -> LinearForm:
        if p.degrees() != {1}:
            raise ValueError(f"not a linear form: {p}")
        n = p.nvars
        return cls([p.coefficient(tuple(int(j == i) for j in range(n))) for i in range(n)])

    def __repr__(self) -> str:
        return f"LinearForm({[str(c) for c in self.coefficients]})"


Factors = tuple[tuple[LinearForm, int], ...]


def _sorted_factors(fs: Mapping[LinearForm, int]) -> Factors:
    return tuple(sorted(((l, e) for l, e in fs.items() if e), key=lambda t: [(c.rational, c.surd) for c in t[0].coefficients]))


class RatFunc:
    """Quotient num/den in normal form.

    The denominator is monic (graded-lex leading coefficient 1) and coprime to
    the numerator.  When the denominator is known to be a product of linear
    forms the factorization is kept alongside; arithmetic between such values
    then cancels by exact division instead of a general gcd.
    """

    __slots__ = ("num", "_den", "_factors")

    def __init__(self, num: MultiPoly, den: MultiPoly | None = None) -> None:
        if den is None:
            self._set(num, MultiPoly.one(num.variables), ())
            return
        if den.variables != num.variables:
            raise ValueError("numerator and denominator live in different rings")
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if den.is_constant():
            self._set(num.scale(den.constant_value().inverse()), MultiPoly.one(num.variables), ())
            return
        if den.total_degree() == 1 and den.is_homogeneous():
            lf = LinearForm.from_poly(den)
            self._set_factored(num.scale(lf.scale.inverse()), {lf: 1})
            return
        g = poly_gcd(num, den)
        num, den = num.divexact(g), den.divexact(g)
        lc = den.leading_coefficient()
        self._set(num.scale(lc.inverse()), den.scale(lc.inverse()), None)

    def _set(self, num: MultiPoly, den: MultiPoly | None, factors: Factors | None) -> None:
        # den may be None when factors is given; it is then expanded on demand
        if num.is_zero():
            den, factors = MultiPoly.one(num.variables), ()
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "_den", den)
        object.__setattr__(self, "_factors", factors)

    @property
    def den(self) -> MultiPoly:
        if self._den is None:
            v = self.num.variables
            den = MultiPoly.one(v)
            for lf, e in self._factors:
                den = den * lf.poly(v) ** e
            object.__setattr__(self, "_den", den)
        return self._den

    def _set_factored(self, num: MultiPoly, factors: Mapping[LinearForm, int]) -> None:
        """num / prod(l^e) with cancellation of common linear factors."""
        variables = num.variables
        remaining = {}
        for lf, e in factors.items():
            if e <= 0:
                continue
            lp = lf.poly(variables)
            while e and not num.is_zero():
                if num.misses_hyperplane(lf.coefficients):
                    break
                q = num.try_divide(lp)
                if q is None:
                    break
                num = q
                e -= 1
            if e:
                remaining[lf] = e
        fs = _sorted_factors(remaining)
        self._set(num, None if fs else MultiPoly.one(variables), fs)

    @classmethod
    def factored(cls, num: MultiPoly, factors: Mapping[LinearForm, int], scalar: Number = 1) -> RatFunc:
        """num / (scalar * prod l^e) for normalized linear forms l."""
        r = cls.__new__(cls)
        r._set_factored(num.scale(ExactScalar.coerce(scalar).inverse()), factors)
        return r

    @classmethod
    def linear_product(cls, variables: Sequence[str], exponents: Mapping[LinearForm, int],
                       scalar: Number = 1) -> RatFunc:
        """scalar * prod l^e with integer (possibly negative) exponents."""
        num = MultiPoly.constant(variables, scalar)
        for lf, e in exponents.items():
            if e > 0:
                num = num * lf.poly(variables) ** e
        return cls.factored(num, {lf: -e for lf, e in exponents.items() if e < 0})

    def __setattr__(self, name, value):
        raise AttributeError("RatFunc is immutable")

    # -- access -----------------------------------------------------------
    @property
    def variables(self) -> tuple[str, ...]:
        return self.num.variables

    @property
    def denominator_factors(self) -> Factors | None:
        return self._factors

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self) -> bool:
        return not self.is_zero()

    def is_polynomial(self) -> bool:
        if self._factors is not None:
            return not self._factors
        return self.den.is_constant()

    def is_constant(self) -> bool:
        return self.is_polynomial() and self.num.is_constant()

    def constant_value(self) -> ExactScalar:
        if not self.is_constant():
            raise ValueError("rational function is not constant")
        return self.num.constant_value()

    def as_poly(self) -> MultiPoly:
        if not self.is_polynomial():
            raise ValueError("rational function has a nontrivial denominator")
        return self.num

    def degree(self) -> int | None:
        """Homogeneity degree, or None when num or den is inhomogeneous or f = 0."""
        if self.is_zero() or not self.num.is_homogeneous():
            return None
        if self._factors is not None:
            return self.num.total_degree() - sum(e for _, e in self._factors)
        if not self.den.is_homogeneous():
            return None
        return self.num.total_degree() - self.den.total_degree()

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> RatFunc | None:
        if isinstance(other, RatFunc):
            if other.variables != self.variables:
                raise ValueError(f"variable mismatch: {self.variables} vs {other.variables}")
            return other
        if isinstance(other, MultiPoly):
            return RatFunc(other)
        if isinstance(other, (int, Fraction, ExactScalar)):
            return RatFunc(MultiPoly.constant(self.variables, other))
        return None

    def __add__(self, other) -> RatFunc:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            return self
        if self.is_zero():
            return o
        if self._factors is not None and o._factors is not None:
            a, b = dict(self._factors), dict(o._factors)
            lcm = {lf: max(a.get(lf, 0), b.get(lf, 0)) for lf in a.keys() | b.keys()}
            v = self.variables
            na, nb = self.num, o.num
            for lf, e in lcm.items():
                lp = lf.poly(v)
                if e - a.get(lf, 0):
                    na = na * lp ** (e - a.get(lf, 0))
                if e - b.get(lf, 0):
                    nb = nb * lp ** (e - b.get(lf, 0))
            r = RatFunc.__new__(RatFunc)
            r._set_factored(na + nb, lcm)
            return r
        if self.den == o.den:
            return RatFunc(self.num + o.num, self.den)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    @staticmethod
    def combine(scalars: Sequence[Number], funcs: Sequence[RatFunc]) -> RatFunc:
        """sum c_i f_i with a single cancellation pass when all f_i are factored."""
        pairs = [(ExactScalar.coerce(c), f) for c, f in zip(scalars, funcs) if not f.is_zero()]
        pairs = [(c, f) for c, f in pairs if not c.is_zero()]
        if not pairs:
            return RatFunc(MultiPoly.zero(funcs[0].variables))
        if len(pairs) == 1 or any(f._factors is None for _, f in pairs):
            out = pairs[0][1].scale(pairs[0][0])
            for c, f in pairs[1:]:
                out = out + f.scale(c)
            return out
        v = pairs[0][1].variables
        lcm: dict[LinearForm, int] = {}
        for _, f in pairs:
            for lf, e in f._factors:
                lcm[lf] = max(lcm.get(lf, 0), e)
        num = MultiPoly.zero(v)
        for c, f in pairs:
            have = dict(f._factors)
            term = f.num.scale(c)
            for lf, e in lcm.items():
                if e - have.get(lf, 0):
                    term = term * lf.poly(v) ** (e - have.get(lf, 0))
            num = num + term
        r = RatFunc.__new__(RatFunc)
        r._set_factored(num, lcm)
        return r

    def __neg__(self) -> RatFunc:
        r = RatFunc.__new__(RatFunc)
        r._set(-self.num, self._den, self._factors)
        return r

    def __sub__(self, other) -> RatFunc:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other) -> RatFunc:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def scale(self, c: Number) -> RatFunc:
        r = RatFunc.__new__(RatFunc)
        r._set(self.num.scale(c), self._den, self._factors)
        return r

    def __mul__(self, other) -> RatFunc:
        if isinstance(other, (int, Fraction, ExactScalar)):
            return self.scale(other)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.is_zero() or o.is_zero():
            return RatFunc(MultiPoly.zero(self.variables))
        if self._factors is not None and o._factors is not None:
            fs = dict(self._factors)
            for lf, e in o._factors:
                fs[lf] = fs.get(lf, 0) + e
            r = RatFunc.__new__(RatFunc)
            r._set_factored(self.num * o.num, fs)
            return r
        return RatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> RatFunc:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other) -> RatFunc:
        if isinstance(other, (int, Fraction, ExactScalar)):
            return self.scale(ExactScalar.coerce(other).inverse())
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_constant():
            return self.scale(o.constant_value().inverse())
        if o.num.is_homogeneous() and o.num.total_degree() == 1 and o._factors is not None:
            lf = LinearForm.from_poly(o.num)
            inv = RatFunc.linear_product(self.variables, {lf: -1}, lf.scale.inverse())
            return self * inv * RatFunc(o.den)
        return self * o.inverse()

    def __rtruediv__(self, other) -> RatFunc:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, n: int) -> RatFunc:
        if n < 0:
            return self.inverse() ** (-n)
        result = RatFunc(MultiPoly.one(self.variables))
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction, ExactScalar, MultiPoly)):
            other = self._coerce(other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        if self.num != other.num:
            return False
        if self._factors is not None and other._factors is not None:
            return self._factors == other._factors
        return self.den == other.den

    def __hash__(self) -> int:
        # the numerator of the normal form determines the value up to den
        return hash(self.num)

    # -- calculus ---------------------------------------------------------
    def diff(self, var: str | int) -> RatFunc:
        if self.is_polynomial():
            return RatFunc(self.num.diff(var))
        if self._factors is not None:
            # d(p/q) = (p' L - p * sum_l e_l l' L/l) / (q L),  L = prod of distinct l
            v = self.variables
            i = self.num._index(var)
            lin = [(lf, e, lf.coefficients[i]) for lf, e in self._factors]
            total = MultiPoly.one(v)
            for lf, _, _ in lin:
                total = total * lf.poly(v)
            log_part = MultiPoly.zero(v)
            for lf, e, c in lin:
                if c:
                    rest = total.divexact(lf.poly(v))
                    log_part = log_part + rest.scale(c * e)
            num = self.num.diff(i) * total - self.num * log_part
            fs = {lf: e + 1 for lf, e, _ in lin}
            r = RatFunc.__new__(RatFunc)
            r._set_factored(num, fs)
            return r
        return RatFunc(self.num.diff(var) * self.den - self.num * self.den.diff(var), self.den * self.den)

    def evaluate(self, point: Sequence[Number]) -> ExactScalar:
        d = self.den.evaluate(point)
        if d.is_zero():
            raise ZeroDivisionError("point lies on the polar locus")
        return self.num.evaluate(point) / d

    # -- text -------------------------------------------------------------
    def __str__(self) -> str:
        return render_ratfunc(self)

    def __repr__(self) -> str:
        return f"RatFunc({render_ratfunc(self)!r})"


def render_ratfunc(f: RatFunc) -> str:
    """``num`` or ``(num)/(den)`` using canonical polynomial text."""
    if f.is_polynomial():
        return str(f.num)
    return f"({f.num})/({f.den})"


def parse_ratfunc(text: str, variables: Sequence[str]) -> RatFunc:
    text = text.strip()
    if text.startswith("("):
        depth = 0
        for k, ch in enumerate(text):
            depth += ch == "("
            depth -= ch == ")"
            if depth == 0:
                break
        rest = text[k + 1:].strip()
        if rest.startswith("/"):
            num = parse_poly(text[1:k], variables)
            den_text = rest[1:].strip()
            if den_text.startswith("(") and den_text.endswith(")"):
                den_text = den_text[1:-1]
            return RatFunc(num, parse_poly(den_text, variables))
    return RatFunc(parse_poly(text, variables))


def _multiplicity(p: MultiPoly, lp: MultiPoly, cap: int | None = None) -> int:
    """Largest k with lp^k | p, or at most ``cap`` when given."""
    k = 0
    coeffs = [p_.constant_value() for p_ in (lp.diff(i) for i in range(lp.nvars))]
    while True:
        if cap is not None and k >= cap:
            return k
        if p.misses_hyperplane(coeffs):
            return k
        q = p.try_divide(lp)
        if q is None:
            return k
        p = q
        k += 1


def ord_along(f: RatFunc, alpha: LinearForm) -> int:
    """Pole order of f along ker(alpha): negative for a zero of f."""
    if f.is_zero():
        raise ValueError("pole order of the zero function is undefined")
    if len(alpha) != len(f.variables):
        raise ValueError("linear form dimension does not match the ring")
    lp = alpha.poly(f.variables)
    if f._factors is not None:
        e = dict(f._factors).get(alpha, 0)
        if e:
            return e
        return -_multiplicity(f.num, lp)
    return _multiplicity(f.den, lp) - _multiplicity(f.num, lp)


def ord_of_combination(scalars: Sequence[Number], funcs: Sequence[RatFunc], alpha: LinearForm,
                       floor: int | None = None) -> int | None:
    """ord along ker(alpha) of sum c_i f_i, or None when the sum vanishes.

    For factored inputs the sum is formed over the common denominator and only
    the multiplicity of alpha is extracted, skipping the full normal form.
    With ``floor`` the result is max(ord, floor), which saves divisions.
    """
    pairs = [(ExactScalar.coerce(c), f) for c, f in zip(scalars, funcs) if not f.is_zero()]
    pairs = [(c, f) for c, f in pairs if not c.is_zero()]
    if not pairs:
        return None
    if any(f._factors is None for _, f in pairs):
        total = RatFunc.combine([c for c, _ in pairs], [f for _, f in pairs])
        if total.is_zero():
            return None
        o = ord_along(total, alpha)
        return o if floor is None else max(o, floor)
    v = pairs[0][1].variables
    lcm: dict[LinearForm, int] = {}
    for _, f in pairs:
        for lf, e in f._factors:
            lcm[lf] = max(lcm.get(lf, 0), e)
    num = MultiPoly.zero(v)
    for c, f in pairs:
        have = dict(f._factors)
        term = f.num.scale(c)
        for lf, e in lcm.items():
            if e - have.get(lf, 0):
                term = term * lf.poly(v) ** (e - have.get(lf, 0))
        num = num + term
    if num.is_zero():
        return None
    top = lcm.get(alpha, 0)
    cap = None if floor is None else top - floor
    return top - _multiplicity(num, alpha.poly(v), cap)

