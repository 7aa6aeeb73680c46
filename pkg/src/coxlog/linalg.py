"""Exact linear algebra over scalars, polynomials and rational functions."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Sequence, TypeVar

from .poly import MultiPoly, poly_matrix_det
from .ratfunc import LinearForm, RatFunc
from .scalar import ExactScalar, Number

T = TypeVar("T")


@dataclass
class LinearSolution:
    """Outcome of :func:`solve_linear`.

    ``status`` is ``"unique"``, ``"none"`` (inconsistent) or ``"family"``
    (consistent with a nontrivial kernel).  For a family, ``solution`` is the
    particular solution with free variables set to zero.
    """

    status: str
    rank: int
    nunknowns: int
    solution: list[ExactScalar] | None = None
    kernel: list[list[ExactScalar]] = field(default_factory=list)

    @property
    def kernel_dimension(self) -> int:
        return self.nunknowns - self.rank


class RowReducer:
    """Incremental reduced row echelon form of an augmented system.

    Rows are fed one at a time; dependent rows are dropped as they arrive, so
    very tall systems cost O(rows * rank * width).
    """

    def __init__(self, nunknowns: int) -> None:
        self.n = nunknowns
        self.pivots: dict[int, list[ExactScalar]] = {}
        self.inconsistent = False

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def add_row(self, coeffs: Sequence[Number], rhs: Number) -> bool:
        """Add one equation; returns True when it raised the rank."""
        row = [ExactScalar.coerce(c) for c in coeffs] + [ExactScalar.coerce(rhs)]
        if len(row) != self.n + 1:
            raise ValueError("row length does not match the number of unknowns")
        for col, prow in self.pivots.items():
            f = row[col]
            if f:
                row = [a - f * b if b else a for a, b in zip(row, prow)]
        lead = next((j for j in range(self.n) if row[j]), None)
        if lead is None:
            if row[self.n]:
                self.inconsistent = True
            return False
        inv = row[lead].inverse()
        row = [a * inv for a in row]
        for col, prow in self.pivots.items():
            f = prow[lead]
            if f:
                self.pivots[col] = [a - f * b if b else a for a, b in zip(prow, row)]
        self.pivots[lead] = row
        return True

    def result(self) -> LinearSolution:
        if self.inconsistent:
            return LinearSolution("none", self.rank, self.n)
        sol = [ExactScalar(0)] * self.n
        for col, prow in self.pivots.items():
            sol[col] = prow[self.n]
        free = [j for j in range(self.n) if j not in self.pivots]
        kernel = []
        for fj in free:
            vec = [ExactScalar(0)] * self.n
            vec[fj] = ExactScalar(1)
            for col, prow in self.pivots.items():
                vec[col] = -prow[fj]
            kernel.append(vec)
        status = "unique" if not free else "family"
        return LinearSolution(status, self.rank, self.n, sol, kernel)


def solve_linear(matrix: Sequence[Sequence[Number]], rhs: Sequence[Number]) -> LinearSolution:
    """Solve matrix @ x = rhs exactly, reporting rank and kernel."""
    if len(matrix) != len(rhs):
        raise ValueError(f"dimension mismatch: {len(matrix)} rows but {len(rhs)} right-hand sides")
    if not matrix:
        raise ValueError("empty system")
    n = len(matrix[0])
    if any(len(r) != n for r in matrix):
        raise ValueError("ragged coefficient matrix")
    red = RowReducer(n)
    for row, b in zip(matrix, rhs):
        red.add_row(row, b)
    return red.result()


def laplace_det(m: Sequence[Sequence[T]], zero: T, one: T) -> T:
    """Cofactor expansion with memoized minors; works over any commutative ring."""
    n = len(m)
    if any(len(r) != n for r in m):
        raise ValueError("determinant needs a square matrix")
    if n == 0:
        return one
    # minors on the last k rows, keyed by their column subset
    minors: dict[tuple[int, ...], T] = {(c,): m[n - 1][c] for c in range(n)}
    for k in range(2, n + 1):
        r = n - k
        nxt: dict[tuple[int, ...], T] = {}
        for cols in combinations(range(n), k):
            acc = zero
            for pos, c in enumerate(cols):
                entry = m[r][c]
                if isinstance(entry, (MultiPoly, RatFunc)) and entry.is_zero():
                    continue
                sub = minors[cols[:pos] + cols[pos + 1:]]
                term = entry * sub
                acc = acc + term if pos % 2 == 0 else acc - term
            nxt[cols] = acc
        minors = nxt
    return minors[tuple(range(n))]


def scalar_det(m: Sequence[Sequence[Number]]) -> ExactScalar:
    """Determinant of a scalar matrix by Gaussian elimination."""
    rows = [[ExactScalar.coerce(x) for x in r] for r in m]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("determinant needs a square matrix")
    det = ExactScalar(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if rows[i][k]), None)
        if piv is None:
            return ExactScalar(0)
        if piv != k:
            rows[k], rows[piv] = rows[piv], rows[k]
            det = -det
        det = det * rows[k][k]
        inv = rows[k][k].inverse()
        for i in range(k + 1, n):
            f = rows[i][k] * inv
            if f:
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[k])]
    return det


def scalar_inverse(m: Sequence[Sequence[Number]]) -> list[list[ExactScalar]]:
    n = len(m)
    inv = []
    for j in range(n):
        e = [int(i == j) for i in range(n)]
        sol = solve_linear(m, e)
        if sol.status != "unique":
            raise ZeroDivisionError("matrix is singular")
        inv.append(sol.solution)
    return [[inv[j][i] for j in range(n)] for i in range(n)]


def matmul(a: Sequence[Sequence[T]], b: Sequence[Sequence[T]], zero: T) -> list[list[T]]:
    n, k, m = len(a), len(b), len(b[0])
    if any(len(r) != k for r in a):
        raise ValueError("inner dimension mismatch")
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = zero
            for t in range(k):
                acc = acc + a[i][t] * b[t][j]
            row.append(acc)
        out.append(row)
    return out


def _clear_factored(f: RatFunc, need: dict[LinearForm, int]) -> MultiPoly:
    """f * prod l^need[l] as a polynomial, by multiplying in the missing factors."""
    have = dict(f.denominator_factors)
    out = f.num
    if out.is_zero():
        return out
    for lf, e in need.items():
        missing = e - have.get(lf, 0)
        if missing:
            out = out * lf.poly(f.variables) ** missing
    return out


def _column_common_denominator(col: Iterable[RatFunc]) -> dict[LinearForm, int] | None:
    """Product of linear factors clearing every entry, when all are factored."""
    need: dict[LinearForm, int] = {}
    for f in col:
        fs = f.denominator_factors
        if fs is None:
            return None
        for lf, e in fs:
            need[lf] = max(need.get(lf, 0), e)
    return need


def ratfunc_matrix_det(m: Sequence[Sequence[RatFunc]]) -> RatFunc:
    """Exact determinant: clear column denominators, expand over polynomials."""
    n = len(m)
    if n == 0 or any(len(r) != n for r in m):
        raise ValueError("determinant needs a nonempty square matrix")
    variables = m[0][0].variables
    cols = [[m[i][j] for i in range(n)] for j in range(n)]
    poly_cols = []
    clearing: dict[LinearForm, int] = {}
    general_den = MultiPoly.one(variables)
    for col in cols:
        need = _column_common_denominator(col)
        if need is not None:
            for lf, e in need.items():
                clearing[lf] = clearing.get(lf, 0) + e
            poly_cols.append([_clear_factored(f, need) for f in col])
            continue
        else:
            den = MultiPoly.one(variables)
            for f in col:
                den = den * f.den.divexact(_gcd_cached(den, f.den))
            scale = RatFunc(den)
            general_den = general_den * den
        poly_cols.append([(f * scale).as_poly() for f in col])
    rows = [[poly_cols[j][i] for j in range(n)] for i in range(n)]
    zero = MultiPoly.zero(variables)
    if n <= 4:
        det = laplace_det(rows, zero, MultiPoly.one(variables))
    else:
        det = poly_matrix_det(rows)
    out = RatFunc.factored(det, clearing)
    if not general_den.is_constant():
        out = out / RatFunc(general_den)
    return out


def _gcd_cached(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    from .poly import poly_gcd

    return poly_gcd(a, b)


def adjugate(m: Sequence[Sequence[T]], det: Callable[[list[list[T]]], T]) -> list[list[T]]:
    n = len(m)
    adj = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[m[r][c] for c in range(n) if c != j] for r in range(n) if r != i]
            cof = det(minor)
            adj[j][i] = cof if (i + j) % 2 == 0 else -cof
    return adj
