"""Independent reference computations in sympy (test-only)."""

from __future__ import annotations

import sympy

from coxlog.poly import MultiPoly
from coxlog.ratfunc import RatFunc
from coxlog.scalar import ExactScalar


def symbols(variables):
    return sympy.symbols(list(variables))


def to_sympy(obj, variables=None):
    if isinstance(obj, ExactScalar):
        if not obj.d:
            return sympy.Rational(obj.rational)
        return sympy.Rational(obj.rational) + sympy.Rational(obj.surd) * sympy.sqrt(obj.d)
    if isinstance(obj, MultiPoly):
        variables = variables or obj.variables
        syms = dict(zip(variables, symbols(variables))) if variables else {}
        return sympy.sympify(str(obj).replace("^", "**"), locals=syms)
    if isinstance(obj, RatFunc):
        return to_sympy(obj.num) / to_sympy(obj.den, obj.variables)
    raise TypeError(type(obj))


def is_zero(expr) -> bool:
    return sympy.simplify(sympy.expand(sympy.together(expr))) == 0


def same(a, b) -> bool:
    return is_zero(a - b)
