"""Sparse multivariate polynomials over Q or Q(sqrt d).

A polynomial is stored as ``(A + sqrt(d) * B) / den`` where ``A`` and ``B``
map packed monomials to integers and ``den`` is a positive integer coprime to
every stored coefficient.  That normal form is unique, so equality is a plain
field comparison.

Monomials are packed into one int: the total degree sits in the top field and
the exponent of variable ``i`` in field ``n - 1 - i`` below it.  Integer
comparison of packed monomials is then the graded lexicographic order with
``x_0 > x_1 > ...``, and monomial multiplication is integer addition.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from .scalar import ExactScalar, Number, common_field, render_scalar

WIDTH = 16
MASK = (1 << WIDTH) - 1

Exps = tuple[int, ...]


def pack(exps: Sequence[int]) -> int:
    m = sum(exps)
    for e in exps:
        if e < 0 or e > MASK:
            raise ValueError(f"exponent out of range: {e}")
        m = (m << WIDTH) | e
    return m


def unpack(m: int, n: int) -> Exps:
    out = [0] * n
    for i in range(n - 1, -1, -1):
        out[i] = m & MASK
        m >>= WIDTH
    return tuple(out)


def mono_degree(m: int, n: int) -> int:
    return m >> (WIDTH * n)


def _var_unit(i: int, n: int) -> int:
    return (1 << (WIDTH * n)) | (1 << (WIDTH * (n - 1 - i)))


def _imul(a: Mapping[int, int], b: Mapping[int, int]) -> dict[int, int]:
    if len(a) < len(b):
        a, b = b, a
    res: dict[int, int] = {}
    get = res.get
    for mb, cb in b.items():
        for ma, ca in a.items():
            m = ma + mb
            res[m] = get(m, 0) + ca * cb
    return {m: c for m, c in res.items() if c}


def _iadd(a: Mapping[int, int], fa: int, b: Mapping[int, int], fb: int) -> dict[int, int]:
    """fa*a + fb*b with zero terms dropped."""
    if not fa:
        res: dict[int, int] = {}
    else:
        res = {m: c * fa for m, c in a.items()} if fa != 1 else dict(a)
    get = res.get
    for m, c in b.items():
        v = get(m, 0) + c * fb
        if v:
            res[m] = v
        else:
            res.pop(m, None)
    return res


def _scalar_parts(c: ExactScalar) -> tuple[int, int, int]:
    """Write c as (alpha + beta*sqrt(d)) / delta with integers."""
    delta = math.lcm(c.rational.denominator, c.surd.denominator)
    return (int(c.rational * delta), int(c.surd * delta), delta)


class MultiPoly:
    """Polynomial in a fixed ordered tuple of variables.

    Construct with ``MultiPoly(variables, {exponent_tuple: coefficient})`` or
    through :meth:`var`, :meth:`constant`, :meth:`linear` and
    :func:`parse_poly`.  Instances are immutable.
    """

    __slots__ = ("variables", "_d", "_den", "_rat", "_sur", "_hash", "_mod")

    def __init__(self, variables: Sequence[str], terms: Mapping[Exps, Number] | None = None) -> None:
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise ValueError(f"duplicate variable names in {variables}")
        n = len(variables)
        coeffs = {}
        d = 0
        for exps, c in (terms or {}).items():
            if len(exps) != n:
                raise ValueError(f"exponent vector {exps} does not match {n} variables")
            c = ExactScalar.coerce(c)
            if c.is_zero():
                continue
            d = common_field(d, c.d)
            m = pack(exps)
            coeffs[m] = coeffs[m] + c if m in coeffs else c
        den = 1
        for c in coeffs.values():
            den = math.lcm(den, c.rational.denominator, c.surd.denominator)
        rat = {m: int(c.rational * den) for m, c in coeffs.items() if c.rational}
        sur = {m: int(c.surd * den) for m, c in coeffs.items() if c.surd}
        self._set(variables, d, den, rat, sur)

    def _set(self, variables, d, den, rat, sur) -> None:
        g = den
        if g != 1:
            g = math.gcd(g, *rat.values(), *sur.values())
            if g != 1:
                den //= g
                rat = {m: c // g for m, c in rat.items()}
                sur = {m: c // g for m, c in sur.items()}
        if not sur:
            d = 0
        if not rat and not sur:
            den = 1
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "_d", d)
        object.__setattr__(self, "_den", den)
        object.__setattr__(self, "_rat", rat)
        object.__setattr__(self, "_sur", sur)
        object.__setattr__(self, "_hash", None)
        object.__setattr__(self, "_mod", None)

    @classmethod
    def _raw(cls, variables, d, den, rat, sur) -> MultiPoly:
        p = cls.__new__(cls)
        p._set(variables, d, den, rat, sur)
        return p

    def __setattr__(self, name, value):
        raise AttributeError("MultiPoly is immutable")

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, variables: Sequence[str]) -> MultiPoly:
        return cls._raw(tuple(variables), 0, 1, {}, {})

    @classmethod
    def constant(cls, variables: Sequence[str], c: Number) -> MultiPoly:
        variables = tuple(variables)
        c = ExactScalar.coerce(c)
        alpha, beta, delta = _scalar_parts(c)
        rat = {pack([0] * len(variables)): alpha} if alpha else {}
        sur = {pack([0] * len(variables)): beta} if beta else {}
        return cls._raw(variables, c.d, delta, rat, sur)

    @classmethod
    def one(cls, variables: Sequence[str]) -> MultiPoly:
        return cls.constant(variables, 1)

    @classmethod
    def var(cls, variables: Sequence[str], name: str) -> MultiPoly:
        variables = tuple(variables)
        if name not in variables:
            raise ValueError(f"unknown variable {name!r}")
        i = variables.index(name)
        return cls._raw(variables, 0, 1, {_var_unit(i, len(variables)): 1}, {})

    @classmethod
    def linear(cls, variables: Sequence[str], coeffs: Sequence[Number]) -> MultiPoly:
        n = len(variables)
        if len(coeffs) != n:
            raise ValueError("coefficient vector length does not match variable count")
        terms = {}
        for i, c in enumerate(coeffs):
            e = [0] * n
            e[i] = 1
            terms[tuple(e)] = c
        return cls(variables, terms)

    # -- basic access -----------------------------------------------------
    @property
    def nvars(self) -> int:
        return len(self.variables)

    @property
    def discriminant(self) -> int:
        return self._d

    def _monomials(self) -> set[int]:
        return self._rat.keys() | self._sur.keys()

    def _coeff(self, m: int) -> ExactScalar:
        return ExactScalar(Fraction(self._rat.get(m, 0), self._den),
                           Fraction(self._sur.get(m, 0), self._den), self._d)

    def terms(self) -> dict[Exps, ExactScalar]:
        """Exponent tuple -> coefficient, in descending graded-lex order."""
        n = self.nvars
        return {unpack(m, n): self._coeff(m) for m in sorted(self._monomials(), reverse=True)}

    def items(self) -> Iterator[tuple[Exps, ExactScalar]]:
        return iter(self.terms().items())

    def coefficient(self, exps: Sequence[int]) -> ExactScalar:
        return self._coeff(pack(exps))

    def __len__(self) -> int:
        return len(self._monomials())

    def is_zero(self) -> bool:
        return not self._rat and not self._sur

    def __bool__(self) -> bool:
        return not self.is_zero()

    def is_constant(self) -> bool:
        return all(mono_degree(m, self.nvars) == 0 for m in self._monomials())

    def constant_value(self) -> ExactScalar:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self._coeff(pack([0] * self.nvars))

    def total_degree(self) -> int:
        """Largest total degree; -1 for the zero polynomial."""
        n = self.nvars
        return max((mono_degree(m, n) for m in self._monomials()), default=-1)

    def degrees(self) -> set[int]:
        n = self.nvars
        return {mono_degree(m, n) for m in self._monomials()}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def leading_monomial(self) -> Exps:
        if self.is_zero():
            raise ValueError("zero polynomial has no leading term")
        return unpack(max(self._monomials()), self.nvars)

    def leading_coefficient(self) -> ExactScalar:
        if self.is_zero():
            raise ValueError("zero polynomial has no leading term")
        return self._coeff(max(self._monomials()))

    def degree_in(self, var: str | int) -> int:
        i = self._index(var)
        off = WIDTH * (self.nvars - 1 - i)
        return max(((m >> off) & MASK for m in self._monomials()), default=-1)

    def support(self) -> set[int]:
        """Indices of variables that occur."""
        n = self.nvars
        out = set()
        for m in self._monomials():
            for i, e in enumerate(unpack(m, n)):
                if e:
                    out.add(i)
        return out

    def _index(self, var: str | int) -> int:
        if isinstance(var, int):
            if not 0 <= var < self.nvars:
                raise ValueError(f"variable index {var} out of range")
            return var
        try:
            return self.variables.index(var)
        except ValueError:
            raise ValueError(f"unknown variable {var!r}") from None

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> MultiPoly | None:
        if isinstance(other, MultiPoly):
            if other.variables != self.variables:
                raise ValueError(f"variable mismatch: {self.variables} vs {other.variables}")
            return other
        if isinstance(other, (int, Fraction, ExactScalar)):
            return MultiPoly.constant(self.variables, other)
        return None

    def __add__(self, other) -> MultiPoly:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            return self
        if self.is_zero():
            return o
        d = common_field(self._d, o._d)
        den = math.lcm(self._den, o._den)
        fa, fb = den // self._den, den // o._den
        rat = _iadd(self._rat, fa, o._rat, fb)
        sur = _iadd(self._sur, fa, o._sur, fb)
        return MultiPoly._raw(self.variables, d, den, rat, sur)

    __radd__ = __add__

    def __neg__(self) -> MultiPoly:
        return MultiPoly._raw(self.variables, self._d, self._den,
                              {m: -c for m, c in self._rat.items()},
                              {m: -c for m, c in self._sur.items()})

    def __sub__(self, other) -> MultiPoly:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other) -> MultiPoly:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def scale(self, c: Number) -> MultiPoly:
        c = ExactScalar.coerce(c)
        if c.is_zero() or self.is_zero():
            return MultiPoly.zero(self.variables)
        d = common_field(self._d, c.d)
        alpha, beta, delta = _scalar_parts(c)
        A, B = self._rat, self._sur
        rat = _iadd(A, alpha, B, d * beta) if beta else {m: v * alpha for m, v in A.items()}
        sur = _iadd(A, beta, B, alpha) if beta else {m: v * alpha for m, v in B.items()}
        den = self._den * delta
        return MultiPoly._raw(self.variables, d, den, rat, sur)

    def __mul__(self, other) -> MultiPoly:
        if isinstance(other, (int, Fraction, ExactScalar)):
            return self.scale(other)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.is_zero() or o.is_zero():
            return MultiPoly.zero(self.variables)
        d = common_field(self._d, o._d)
        A1, B1, A2, B2 = self._rat, self._sur, o._rat, o._sur
        rat = _imul(A1, A2)
        if B1 and B2:
            rat = _iadd(rat, 1, _imul(B1, B2), d)
        sur: dict[int, int] = {}
        if B2:
            sur = _imul(A1, B2)
        if B1:
            sur = _iadd(sur, 1, _imul(B1, A2), 1)
        return MultiPoly._raw(self.variables, d, self._den * o._den, rat, sur)

    __rmul__ = __mul__

    def __truediv__(self, other) -> MultiPoly:
        """Division by a nonzero scalar, or exact division by a polynomial."""
        if isinstance(other, (int, Fraction, ExactScalar)):
            return self.scale(ExactScalar.coerce(other).inverse())
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.divexact(o)

    def __pow__(self, n: int) -> MultiPoly:
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers must be non-negative integers")
        result = MultiPoly.one(self.variables)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction, ExactScalar)):
            other = MultiPoly.constant(self.variables, other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return (self.variables == other.variables and self._d == other._d and self._den == other._den
                and self._rat == other._rat and self._sur == other._sur)

    def __hash__(self) -> int:
        if self._hash is None:
            h = hash((self.variables, self._d, self._den,
                      frozenset(self._rat.items()), frozenset(self._sur.items())))
            object.__setattr__(self, "_hash", h)
        return self._hash

    def monic(self) -> MultiPoly:
        """Scale so the graded-lex leading coefficient is 1."""
        if self.is_zero():
            return self
        return self.scale(self.leading_coefficient().inverse())

    # -- calculus ---------------------------------------------------------
    def diff(self, var: str | int) -> MultiPoly:
        i = self._index(var)
        n = self.nvars
        off = WIDTH * (n - 1 - i)
        unit = _var_unit(i, n)

        def d(part: Mapping[int, int]) -> dict[int, int]:
            out = {}
            for m, c in part.items():
                e = (m >> off) & MASK
                if e:
                    out[m - unit] = c * e
            return out

        return MultiPoly._raw(self.variables, self._d, self._den, d(self._rat), d(self._sur))

    def directional_derivative(self, direction: Sequence[Number]) -> MultiPoly:
        """sum_i direction[i] * d/dx_i."""
        out = MultiPoly.zero(self.variables)
        for i, a in enumerate(direction):
            a = ExactScalar.coerce(a)
            if a:
                out = out + self.diff(i).scale(a)
        return out

    # -- evaluation and substitution -------------------------------------
    def evaluate(self, point: Sequence[Number]) -> ExactScalar:
        if len(point) != self.nvars:
            raise ValueError("point dimension mismatch")
        pt = [ExactScalar.coerce(p) for p in point]
        total = ExactScalar(0)
        powers: list[dict[int, ExactScalar]] = [{0: ExactScalar(1)} for _ in pt]
        for exps, c in self.terms().items():
            term = c
            for i, e in enumerate(exps):
                if e:
                    cache = powers[i]
                    if e not in cache:
                        cache[e] = pt[i] ** e
                    term = term * cache[e]
            total = total + term
        return total

    def substitute(self, images: Sequence[MultiPoly]) -> MultiPoly:
        """Replace variable i by images[i] (all in one common target ring)."""
        if len(images) != self.nvars:
            raise ValueError("need one image per variable")
        target = images[0].variables if images else ()
        out = MultiPoly.zero(target)
        power_cache: list[dict[int, MultiPoly]] = [{0: MultiPoly.one(target), 1: img} for img in images]

        def power(i: int, e: int) -> MultiPoly:
            cache = power_cache[i]
            if e not in cache:
                cache[e] = power(i, e - 1) * images[i]
            return cache[e]

        for exps, c in self.terms().items():
            term = MultiPoly.constant(target, c)
            for i, e in enumerate(exps):
                if e:
                    term = term * power(i, e)
            out = out + term
        return out

    def rank_one_shift(self, direction: Sequence[Number], t: MultiPoly) -> MultiPoly:
        """Return f(x - t(x) * direction) via the terminating Taylor series.

        ``t`` must be a polynomial in the same ring; reflections use a linear
        ``t``.  Horner in ``t`` keeps every intermediate small.
        """
        derivs = [self]
        while not derivs[-1].is_zero():
            derivs.append(derivs[-1].directional_derivative(direction))
        derivs.pop()
        if not derivs:
            return self
        neg_t = -t
        acc = derivs[-1]
        for n in range(len(derivs) - 2, -1, -1):
            acc = derivs[n] + (neg_t * acc).scale(Fraction(1, n + 1))
        return acc

    def embed(self, variables: Sequence[str], positions: Sequence[int]) -> MultiPoly:
        """Move into a larger ring: variable i becomes variables[positions[i]]."""
        variables = tuple(variables)
        n, N = self.nvars, len(variables)
        if len(positions) != n:
            raise ValueError("need one position per variable")

        def move(part: Mapping[int, int]) -> dict[int, int]:
            out = {}
            for m, c in part.items():
                exps = unpack(m, n)
                big = [0] * N
                for i, e in enumerate(exps):
                    big[positions[i]] = e
                out[pack(big)] = c
            return out

        return MultiPoly._raw(variables, self._d, self._den, move(self._rat), move(self._sur))

    def coefficients_in(self, var: str | int) -> dict[int, MultiPoly]:
        """Split as sum_k var^k * c_k; returns {k: c_k} with c_k free of var."""
        i = self._index(var)
        n = self.nvars
        off = WIDTH * (n - 1 - i)
        unit = _var_unit(i, n)
        rat: dict[int, dict[int, int]] = {}
        sur: dict[int, dict[int, int]] = {}
        for src, dst in ((self._rat, rat), (self._sur, sur)):
            for m, c in src.items():
                e = (m >> off) & MASK
                dst.setdefault(e, {})[m - e * unit] = c
        return {k: MultiPoly._raw(self.variables, self._d, self._den, rat.get(k, {}), sur.get(k, {}))
                for k in sorted(rat.keys() | sur.keys())}

    def times_var_power(self, var: str | int, k: int) -> MultiPoly:
        i = self._index(var)
        shift = k * _var_unit(i, self.nvars)
        return MultiPoly._raw(self.variables, self._d, self._den,
                              {m + shift: c for m, c in self._rat.items()},
                              {m + shift: c for m, c in self._sur.items()})

    # -- division ---------------------------------------------------------
    def misses_hyperplane(self, coeffs: Sequence[Number]) -> bool:
        """True when self provably does not vanish on {sum c_i x_i = 0}.

        Reduces modulo a large prime (sqrt d sent to a square root mod p) and
        evaluates at one point of the hyperplane.  A nonzero residue is a proof;
        False only means "undecided", so callers fall back to exact division.
        """
        cs = [ExactScalar.coerce(c) for c in coeffs]
        d = self._d
        for c in cs:
            d = common_field(d, c.d)
        field = _modular_field(d)
        if field is None or self.is_zero():
            return False
        P, r = field
        terms = self._mod_image(P, r)
        if terms is None:
            return False
        images = [_scalar_mod(c, P, r) for c in cs]
        if any(x is None for x in images):
            return False
        lead = next((i for i, x in enumerate(images) if x), None)
        if lead is None:
            return False
        n = self.nvars
        point = [pow(3, 17 + 11 * j, P) for j in range(n)]
        point[lead] = 0
        point[lead] = -sum(a * x for a, x in zip(images, point)) * pow(images[lead], -1, P) % P
        top = max((e for exps, _ in terms for _, e in exps), default=0)
        powers = []
        for x in point:
            row = [1] * (top + 1)
            for e in range(1, top + 1):
                row[e] = row[e - 1] * x % P
            powers.append(row)
        total = 0
        for exps, c in terms:
            for i, e in exps:
                c = c * powers[i][e] % P
            total += c
        return total % P != 0

    def _mod_image(self, P: int, r: int) -> list[tuple[tuple[tuple[int, int], ...], int]] | None:
        """Terms as ((var, exp) pairs, coefficient mod P), cached per prime."""
        cached = self._mod
        if cached is not None and cached[0] == P:
            return cached[1]
        if self._den % P == 0:
            return None
        n = self.nvars
        coeffs: dict[int, int] = dict(self._rat)
        for m, c in self._sur.items():
            coeffs[m] = coeffs.get(m, 0) + c * r
        terms = []
        for m, c in coeffs.items():
            c %= P
            if c:
                terms.append((tuple((i, e) for i, e in enumerate(unpack(m, n)) if e), c))
        object.__setattr__(self, "_mod", (P, terms))
        return terms

    def divexact(self, other: MultiPoly) -> MultiPoly:
        q = self.try_divide(other)
        if q is None:
            raise ValueError("polynomial division is not exact")
        return q

    def divides(self, other: MultiPoly) -> bool:
        """True when self divides other."""
        return other.try_divide(self) is not None

    def try_divide(self, other: MultiPoly) -> MultiPoly | None:
        """Exact quotient self/other, or None if other does not divide self."""
        o = self._coerce(other)
        if o.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if self.is_zero():
            return self
        if o.is_constant():
            return self.scale(o.constant_value().inverse())
        # main variable: the first variable the divisor depends on
        p = min(o.support())
        if o.total_degree() == 1 and o.is_homogeneous():
            return _divide_linear(self, o, p)
        return _divide_recursive(self, o, p)

    # -- text -------------------------------------------------------------
    def __str__(self) -> str:
        return render_poly(self)

    def __repr__(self) -> str:
        return f"MultiPoly({self.variables!r}, {render_poly(self)!r})"


_FILTER_PRIMES = (2 ** 61 - 1, 2 ** 89 - 1, 2 ** 107 - 1, 2 ** 127 - 1)  # all = 3 mod 4
_FIELDS: dict[int, tuple[int, int] | None] = {}


def _modular_field(d: int) -> tuple[int, int] | None:
    """(p, r) with r^2 = d mod p for one of the filter primes, cached per d."""
    if d not in _FIELDS:
        _FIELDS[d] = None
        for P in _FILTER_PRIMES:
            if d == 0:
                _FIELDS[d] = (P, 0)
                break
            if pow(d, (P - 1) // 2, P) == 1:
                _FIELDS[d] = (P, pow(d, (P + 1) // 4, P))
                break
    return _FIELDS[d]


def _scalar_mod(c: ExactScalar, P: int, r: int) -> int | None:
    out = 0
    for q, unit in ((c.rational, 1), (c.surd, r)):
        if q:
            if q.denominator % P == 0:
                return None
            out += q.numerator * unit * pow(q.denominator, -1, P)
    return out % P


def _divide_linear(f: MultiPoly, g: MultiPoly, p: int) -> MultiPoly | None:
    """Synthetic division by g = c*x_p + r, r free of x_p."""
    gc = g.coefficients_in(p)
    inv = gc[1].constant_value().inverse()
    r = gc.get(0, MultiPoly.zero(f.variables))
    slices = f.coefficients_in(p)
    top = max(slices)
    zero = MultiPoly.zero(f.variables)
    quotient = zero
    q = zero
    for k in range(top, 0, -1):
        q = (slices.get(k, zero) - r * q).scale(inv)
        quotient = quotient + q.times_var_power(p, k - 1)
    if slices.get(0, zero) != r * q:
        return None
    return quotient


def _divide_recursive(f: MultiPoly, g: MultiPoly, p: int) -> MultiPoly | None:
    gc = g.coefficients_in(p)
    n = max(gc)
    lead = gc[n]
    quotient = MultiPoly.zero(f.variables)
    rem = f
    while not rem.is_zero():
        rc = rem.coefficients_in(p)
        k = max(rc)
        if k < n:
            return None
        c = rc[k].try_divide(lead)
        if c is None:
            return None
        c = c.times_var_power(p, k - n)
        quotient = quotient + c
        rem = rem - c * g
    return quotient


# -- gcd ----------------------------------------------------------------------
def _content_in(f: MultiPoly, p: int) -> MultiPoly:
    g = MultiPoly.zero(f.variables)
    for c in f.coefficients_in(p).values():
        g = poly_gcd(g, c)
        if g.is_constant():
            return MultiPoly.one(f.variables)
    return g


def _prem(a: MultiPoly, b: MultiPoly, p: int) -> MultiPoly:
    """Pseudo-remainder of a by b as univariate polynomials in variable p."""
    bc = b.coefficients_in(p)
    n = max(bc)
    lead = bc[n]
    r = a
    while not r.is_zero():
        rc = r.coefficients_in(p)
        k = max(rc)
        if k < n:
            break
        r = r * lead - (rc[k] * b).times_var_power(p, k - n)
    return r


def poly_gcd(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    """Monic greatest common divisor by recursive primitive remainder sequences."""
    if a.is_zero():
        return b.monic()
    if b.is_zero():
        return a.monic()
    if a.is_constant() or b.is_constant():
        return MultiPoly.one(a.variables)
    if a.try_divide(b) is not None:
        return b.monic()
    if b.try_divide(a) is not None:
        return a.monic()
    sa, sb = a.support(), b.support()
    p = min(sa | sb)
    if p not in sa:
        return poly_gcd(a, _content_in(b, p))
    if p not in sb:
        return poly_gcd(_content_in(a, p), b)
    ca, cb = _content_in(a, p), _content_in(b, p)
    content = poly_gcd(ca, cb)
    f, g = a.divexact(ca), b.divexact(cb)
    if f.degree_in(p) < g.degree_in(p):
        f, g = g, f
    while not g.is_zero() and g.degree_in(p) > 0:
        r = _prem(f, g, p)
        f, g = g, (r.divexact(_content_in(r, p)) if not r.is_zero() else r)
    if g.is_zero():
        prim = f.divexact(_content_in(f, p))
    else:
        prim = MultiPoly.one(a.variables)
    return (content * prim).monic()


# -- canonical text -----------------------------------------------------------
def _render_monomial(exps: Exps, variables: Sequence[str]) -> str:
    parts = []
    for v, e in zip(variables, exps):
        if e == 1:
            parts.append(v)
        elif e > 1:
            parts.append(f"{v}^{e}")
    return "*".join(parts)


def render_poly(p: MultiPoly) -> str:
    """Canonical graded-lex text such as ``3*x^2*y - 1/2*y^3``."""
    if p.is_zero():
        return "0"
    out = []
    for k, (exps, c) in enumerate(p.terms().items()):
        mono = _render_monomial(exps, p.variables)
        negative = c.is_rational() and c.rational < 0
        mag = -c if negative else c
        if mono:
            body = mono if mag == 1 else f"{render_scalar(mag)}*{mono}"
        else:
            body = render_scalar(mag)
        if k == 0:
            out.append(f"-{body}" if negative else body)
        else:
            out.append(f" - {body}" if negative else f" + {body}")
    return "".join(out)


_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\*\*|[-+*/^()]))")


class _Parser:
    def __init__(self, text: str, variables: Sequence[str]) -> None:
        self.variables = tuple(variables)
        self.tokens: list[tuple[str, str]] = []
        pos = 0
        text = text.rstrip()
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if not m or m.end() == pos:
                raise ValueError(f"cannot parse polynomial near {text[pos:pos + 10]!r}")
            if m.group(1):
                self.tokens.append(("num", m.group(1)))
            elif m.group(2):
                self.tokens.append(("name", m.group(2)))
            else:
                op = m.group(3)
                self.tokens.append(("op", "^" if op == "**" else op))
            pos = m.end()
        self.i = 0

    def peek(self) -> tuple[str, str] | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self) -> tuple[str, str]:
        tok = self.peek()
        if tok is None:
            raise ValueError("unexpected end of polynomial text")
        self.i += 1
        return tok

    def expect(self, op: str) -> None:
        tok = self.take()
        if tok != ("op", op):
            raise ValueError(f"expected {op!r}, got {tok[1]!r}")

    def parse(self) -> MultiPoly:
        if not self.tokens:
            raise ValueError("empty polynomial text")
        p = self.expr()
        if self.peek() is not None:
            raise ValueError(f"trailing input at {self.peek()[1]!r}")
        return p

    def expr(self) -> MultiPoly:
        p = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> MultiPoly:
        p = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            q = self.unary()
            if op == "*":
                p = p * q
            else:
                if not q.is_constant() or q.is_zero():
                    raise ValueError("division only by nonzero constants")
                p = p.scale(q.constant_value().inverse())
        return p

    def unary(self) -> MultiPoly:
        tok = self.peek()
        if tok == ("op", "-"):
            self.take()
            return -self.unary()
        if tok == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> MultiPoly:
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            kind, val = self.take()
            if kind != "num":
                raise ValueError("exponent must be a non-negative integer")
            return base ** int(val)
        return base

    def atom(self) -> MultiPoly:
        kind, val = self.take()
        if kind == "num":
            return MultiPoly.constant(self.variables, int(val))
        if kind == "op" and val == "(":
            p = self.expr()
            self.expect(")")
            return p
        if kind == "name":
            if val == "sqrt" and val not in self.variables:
                self.expect("(")
                k, d = self.take()
                if k != "num":
                    raise ValueError("sqrt expects an integer literal")
                self.expect(")")
                return MultiPoly.constant(self.variables, ExactScalar.sqrt(int(d)))
            if val not in self.variables:
                raise ValueError(f"unknown variable {val!r}")
            return MultiPoly.var(self.variables, val)
        raise ValueError(f"unexpected token {val!r}")


def parse_poly(text: str, variables: Sequence[str]) -> MultiPoly:
    """Parse the canonical text form (and ordinary arithmetic expressions)."""
    return _Parser(text, variables).parse()


def poly_matrix_det(rows: Sequence[Sequence[MultiPoly]]) -> MultiPoly:
    """Fraction-free Bareiss determinant of a square polynomial matrix."""
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("determinant needs a square matrix")
    if n == 0:
        raise ValueError("empty matrix")
    variables = rows[0][0].variables
    m = [list(r) for r in rows]
    sign = 1
    prev = MultiPoly.one(variables)
    for k in range(n - 1):
        if m[k][k].is_zero():
            for r in range(k + 1, n):
                if not m[r][k].is_zero():
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return MultiPoly.zero(variables)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]).divexact(prev)
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return -det if sign < 0 else det


def iter_monomials(nvars: int, degree: int) -> Iterable[Exps]:
    """All exponent vectors of the given total degree, descending graded-lex."""
    if nvars == 0:
        if degree == 0:
            yield ()
        return
    for e in range(degree, -1, -1):
        for rest in iter_monomials(nvars - 1, degree - e):
            yield (e,) + rest
